#include "pam/walk.hpp"

#include <cmath>
#include <stdexcept>

#include "pam/rng.hpp"

namespace pam {

WalkRecord simulate_walk(double kappa, int d, const std::vector<int>& start, double horizon,
                         std::optional<int> guard_radius, std::uint64_t seed) {
    if (kappa < 0.0) throw std::invalid_argument("simulate_walk: kappa must be >= 0");
    if (static_cast<int>(start.size()) != d) {
        throw std::invalid_argument("simulate_walk: start dimension mismatch");
    }
    WalkRecord rec;
    rec.d = d;
    rec.horizon = horizon;
    rec.sites.push_back(start);

    CounterRng rng(CounterRng::mix64(seed));
    const double rate = 2.0 * d * kappa;
    std::vector<int> z = start;
    double now = 0.0;
    const auto in_guard = [&](const std::vector<int>& s) {
        if (!guard_radius) return true;
        for (int c : s) {
            if (c < -*guard_radius || c > *guard_radius) return false;
        }
        return true;
    };
    while (true) {
        const double hold = rng.exponential(rate);
        const double stay_until = std::min(now + hold, horizon);
        rec.local_times[z] += stay_until - now;
        if (now + hold >= horizon) break;
        now += hold;
        const auto dir = static_cast<int>(rng.below(static_cast<std::uint64_t>(2 * d)));
        z[dir / 2] += (dir % 2 == 0) ? 1 : -1;
        rec.jump_times.push_back(now);
        rec.sites.push_back(z);
        if (!rec.exited && !in_guard(z)) {
            rec.exited = true;
            rec.exit_time = now;
        }
    }
    return rec;
}

FkEstimate feynman_kac_estimate(const PotentialField& V, double kappa, double t,
                                const std::vector<int>& z, long n_walks, std::uint64_t seed,
                                std::optional<int> dirichlet_radius) {
    if (n_walks < 1) throw std::invalid_argument("feynman_kac_estimate: n_walks must be >= 1");
    if (t < 0.0) throw std::invalid_argument("feynman_kac_estimate: t must be >= 0");
    const int d = V.box().dim();
    double sum = 0.0, sum_sq = 0.0;
    for (long w = 0; w < n_walks; ++w) {
        auto rec = simulate_walk(kappa, d, z, t, dirichlet_radius,
                                 CounterRng::substream(seed, static_cast<std::uint64_t>(w)).next_u64());
        double weight;
        if (dirichlet_radius && rec.exited) {
            weight = 0.0;
        } else {
            double integral = 0.0;
            bool killed = false;
            for (const auto& [site, ltime] : rec.local_times) {
                if (!V.box().contains(site)) continue;  // potential 0 outside the field
                const long idx = V.box().index(site);
                if (V.hard(idx)) {
                    killed = true;
                    break;
                }
                integral += V.soft_value(idx) * ltime;
            }
            weight = killed ? 0.0 : std::exp(integral);
        }
        sum += weight;
        sum_sq += weight * weight;
    }
    FkEstimate est;
    est.n_walks = n_walks;
    est.mean = sum / static_cast<double>(n_walks);
    const double var =
        std::max(0.0, sum_sq / static_cast<double>(n_walks) - est.mean * est.mean);
    est.std_error = std::sqrt(var / static_cast<double>(n_walks));
    return est;
}

double scaled_local_times(const WalkRecord& record, double alpha,
                          const std::vector<double>& x) {
    if (!(record.horizon > 0.0)) throw std::invalid_argument("scaled_local_times: horizon must be > 0");
    if (!(alpha >= 1.0)) throw std::invalid_argument("scaled_local_times: alpha must be >= 1");
    std::vector<int> z(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) z[i] = static_cast<int>(std::floor(x[i] * alpha));
    const auto it = record.local_times.find(z);
    const double lt = it == record.local_times.end() ? 0.0 : it->second;
    return std::pow(alpha, record.d) / record.horizon * lt;
}

ExitBoundReport check_exit_bound(double kappa, int d, int r, double t, long n_walks,
                                 std::uint64_t seed) {
    if (r <= 0) throw std::invalid_argument("check_exit_bound: r must be a positive integer");
    ExitBoundReport rep;
    rep.bound = std::pow(2.0, d + 1) *
                std::exp(-static_cast<double>(r) * (std::log(r / (d * kappa * t)) - 1.0));
    long exits = 0;
    const std::vector<int> origin(static_cast<std::size_t>(d), 0);
    for (long w = 0; w < n_walks; ++w) {
        auto rec = simulate_walk(kappa, d, origin, t, r,
                                 CounterRng::substream(seed, static_cast<std::uint64_t>(w)).next_u64());
        exits += rec.exited ? 1 : 0;
    }
    rep.empirical = static_cast<double>(exits) / static_cast<double>(n_walks);
    return rep;
}

}  // namespace pam
