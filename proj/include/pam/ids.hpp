#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pam/distribution.hpp"
#include "pam/scaling.hpp"
#include "pam/spectrum.hpp"

namespace pam {

// Empirical integrated density of states. Convention E_k = -lambda_k, i.e.
// the spectrum of -kappa*Delta^d - xi restricted to finite-xi sites; the sign
// flip lives in ids_energy() and nowhere else. Estimates are N_R(E)/(2R)^d
// averaged over field samples, nondecreasing in E by construction.
struct IDSHistogram {
    std::vector<double> energies;                 // E grid, >= 0
    std::vector<int> box_radii;                   // R per row
    std::vector<std::vector<double>> estimates;   // [size][E]
    std::vector<long> sample_counts;              // fields averaged per size
    std::vector<long> sites_sampled;              // n_samples * #Q_R per size
    std::string dist_tag;

    const std::vector<double>& largest_box() const { return estimates.back(); }
};

// Centralized lambda -> E conversion.
inline double ids_energy(double lambda) { return -lambda; }

IDSHistogram ids_estimate(const PotentialDistribution& dist, double kappa, int d,
                          const std::vector<int>& box_radii,
                          const std::vector<double>& energy_grid, long n_samples,
                          std::uint64_t seed);

// L(nu_R, t) = (1/#Q_R) sum_k e^{t lambda_k}.
double laplace_transform_ids(const DirichletSpectrum& spectrum, double t);
// Stieltjes sum over the largest-box histogram row: int e^{-tE} dN(E)/(2R)^d.
double laplace_transform_ids(const IDSHistogram& histogram, double t);

struct LifshitzFit {
    double exponent = 0.0;       // slope of log(-log n) vs log(1/E), target 1/beta
    double scaled_limit = 0.0;   // mean of log n(E) / (E alpha^{-1}(E^{-1/2}))
    double intercept = 0.0;
    double r2 = 0.0;
    double window_lo = 0.0;
    double window_hi = 0.0;
    long points_used = 0;
};

// Lowest decade of E where the largest-box estimate clears 10 states per
// total sites sampled.
std::pair<double, double> default_fit_window(const IDSHistogram& histogram);

LifshitzFit lifshitz_fit(const IDSHistogram& histogram, const ScalingProfile& profile,
                         std::pair<double, double> window);

}  // namespace pam
