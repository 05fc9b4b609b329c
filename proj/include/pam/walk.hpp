#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "pam/field.hpp"

namespace pam {

// One continuous-time simple random walk path up to the horizon.
// Holding times are exact exponentials of rate 2*d*kappa; the final holding
// interval is truncated at the horizon so local times sum to t exactly.
struct WalkRecord {
    int d = 0;
    double horizon = 0.0;
    std::vector<double> jump_times;              // strictly increasing, < horizon
    std::vector<std::vector<int>> sites;         // visited; sites.size() == jump_times.size()+1
    std::map<std::vector<int>, double> local_times;
    bool exited = false;                         // left the guard box before horizon
    double exit_time = 0.0;                      // tau_R when exited

    const std::vector<int>& terminal() const { return sites.back(); }
};

WalkRecord simulate_walk(double kappa, int d, const std::vector<int>& start, double horizon,
                         std::optional<int> guard_radius, std::uint64_t seed);

struct FkEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    long n_walks = 0;
};

// Monte Carlo Feynman-Kac estimate of u^V(t,z) (or u^V_R with the exit
// indicator when dirichlet_radius is set). Sites outside the field's box
// carry potential 0; hard traps kill the path (weight 0).
FkEstimate feynman_kac_estimate(const PotentialField& V, double kappa, double t,
                                const std::vector<int>& z, long n_walks, std::uint64_t seed,
                                std::optional<int> dirichlet_radius = std::nullopt);

// l-bar: (alpha^d / t) * l_t(floor(x*alpha)).
double scaled_local_times(const WalkRecord& record, double alpha,
                          const std::vector<double>& x);

struct ExitBoundReport {
    double empirical = 0.0;
    double bound = 0.0;  // 2^{d+1} exp{-r(log(r/(d kappa t)) - 1)}
};

ExitBoundReport check_exit_bound(double kappa, int d, int r, double t, long n_walks,
                                 std::uint64_t seed);

}  // namespace pam
