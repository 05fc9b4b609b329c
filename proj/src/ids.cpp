#include "pam/ids.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "pam/field.hpp"
#include "pam/math_util.hpp"
#include "pam/rng.hpp"

namespace pam {

IDSHistogram ids_estimate(const PotentialDistribution& dist, double kappa, int d,
                          const std::vector<int>& box_radii,
                          const std::vector<double>& energy_grid, long n_samples,
                          std::uint64_t seed) {
    if (box_radii.empty() || energy_grid.empty() || n_samples < 1) {
        throw std::invalid_argument("ids_estimate: empty inputs");
    }
    for (double e : energy_grid) {
        if (e < 0.0) throw std::invalid_argument("ids_estimate: energy grid must be >= 0");
    }
    IDSHistogram out;
    out.energies = energy_grid;
    out.box_radii = box_radii;
    out.dist_tag = dist.tag();

    for (std::size_t s = 0; s < box_radii.size(); ++s) {
        const LatticeBox box(d, box_radii[s]);
        const double norm = std::pow(2.0 * box_radii[s], d);
        std::vector<double> acc(energy_grid.size(), 0.0);
        for (long sample = 0; sample < n_samples; ++sample) {
            const std::uint64_t field_seed =
                CounterRng::substream(seed, (static_cast<std::uint64_t>(s) << 32) |
                                                static_cast<std::uint64_t>(sample))
                    .next_u64();
            const auto V = sample_field(dist, box, field_seed);
            if (V.active_count() == 0) continue;
            const auto spec = dirichlet_spectrum(V, kappa);
            // eigenvalues descend, so energies E_k = -lambda_k ascend
            for (std::size_t i = 0; i < energy_grid.size(); ++i) {
                long count = 0;
                for (long k = 0; k < spec.eigenvalues.size(); ++k) {
                    if (ids_energy(spec.eigenvalues[k]) <= energy_grid[i]) ++count;
                }
                acc[i] += static_cast<double>(count);
            }
        }
        for (double& a : acc) a /= static_cast<double>(n_samples) * norm;
        out.estimates.push_back(std::move(acc));
        out.sample_counts.push_back(n_samples);
        out.sites_sampled.push_back(n_samples * box.site_count());
    }
    return out;
}

double laplace_transform_ids(const DirichletSpectrum& spectrum, double t) {
    if (t < 0.0) throw std::invalid_argument("laplace_transform_ids: t must be >= 0");
    double sum = 0.0;
    for (long k = 0; k < spectrum.eigenvalues.size(); ++k) {
        sum += std::exp(t * spectrum.eigenvalues[k]);
    }
    return sum / static_cast<double>(spectrum.total_sites);
}

double laplace_transform_ids(const IDSHistogram& histogram, double t) {
    if (t < 0.0) throw std::invalid_argument("laplace_transform_ids: t must be >= 0");
    const auto& n = histogram.largest_box();
    double sum = 0.0;
    double prev = 0.0;
    for (std::size_t i = 0; i < n.size(); ++i) {
        sum += std::exp(-t * histogram.energies[i]) * (n[i] - prev);
        prev = n[i];
    }
    return sum;
}

std::pair<double, double> default_fit_window(const IDSHistogram& histogram) {
    const auto& n = histogram.largest_box();
    const double floor_n =
        10.0 / static_cast<double>(histogram.sites_sampled.back());
    for (std::size_t i = 0; i < n.size(); ++i) {
        if (histogram.energies[i] > 0.0 && n[i] >= floor_n) {
            return {histogram.energies[i], 10.0 * histogram.energies[i]};
        }
    }
    throw std::runtime_error("default_fit_window: histogram never clears the count floor");
}

LifshitzFit lifshitz_fit(const IDSHistogram& histogram, const ScalingProfile& profile,
                         std::pair<double, double> window) {
    const auto& n = histogram.largest_box();
    std::vector<double> xs, ys;
    double scaled_sum = 0.0;
    for (std::size_t i = 0; i < n.size(); ++i) {
        const double E = histogram.energies[i];
        if (E < window.first || E > window.second) continue;
        if (!(n[i] > 0.0 && n[i] < 1.0)) {
            throw std::runtime_error("lifshitz_fit: histogram not in (0,1) on the window");
        }
        xs.push_back(std::log(1.0 / E));
        ys.push_back(std::log(-std::log(n[i])));
        scaled_sum += std::log(n[i]) / (E * profile.alpha_inverse(1.0 / std::sqrt(E)));
    }
    if (xs.size() < 2) throw std::runtime_error("lifshitz_fit: window too narrow");
    const auto fit = linear_fit(xs, ys);
    LifshitzFit out;
    out.exponent = fit.slope;
    out.intercept = fit.intercept;
    out.r2 = fit.r2;
    out.scaled_limit = scaled_sum / static_cast<double>(xs.size());
    out.window_lo = window.first;
    out.window_hi = window.second;
    out.points_used = static_cast<long>(xs.size());
    return out;
}

}  // namespace pam
