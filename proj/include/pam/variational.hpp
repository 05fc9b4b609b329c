#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "pam/grid_function.hpp"

namespace pam {

struct VariationalResult {
    double value = 0.0;         // finest grid
    double extrapolated = 0.0;  // Richardson over (m, 2m, 4m)
    GridFunction minimizer;     // finest grid; g = sqrt(f) for chi problems, psi for chi-tilde
    double R_star = 0.0;        // optimal outer scale
    std::vector<int> grids;
    std::vector<double> grid_values;
    long iterations = 0;
    bool converged = false;
};

// Discrete chi_R objective I(g^2) - H_R(g^2) in the sphere variable g = sqrt(f)
// (boundary nodes pinned to 0), with the chi* cap and chi# support variants.
// Exposed alongside its analytic gradient for finite-difference checks.
double chi_objective(const GridFunction& g, double gamma, double H1, double kappa,
                     std::optional<double> M_cap = std::nullopt,
                     std::optional<double> eps_cross = std::nullopt);
std::vector<double> chi_objective_gradient(const GridFunction& g, double gamma, double H1,
                                           double kappa,
                                           std::optional<double> M_cap = std::nullopt,
                                           std::optional<double> eps_cross = std::nullopt);

// chi_R = inf{I(f) - H_R(f): f in F_R} by projected gradient descent on g with
// multistart; gamma = 0 (no eps_cross) reduces to the ball-support scalar
// search. M_cap selects the chi*_R(M) objective, eps_cross the chi#_R(eps) one.
VariationalResult solve_chi_R(double R, double gamma, double H1, double kappa, int d, int m,
                              std::optional<double> M_cap = std::nullopt,
                              std::optional<double> eps_cross = std::nullopt,
                              std::uint64_t seed = 1);

// chi = inf_R chi_R via the exact R-collapse over F_1 (closed-form optimal R
// per shape, envelope gradient); Richardson-extrapolated over (m, 2m, 4m).
VariationalResult solve_chi(double gamma, double H1, double kappa, int d, int m = 48,
                            std::uint64_t seed = 1);

// chi~ = inf over psi <= 0 of (L_R(psi)/d)^beta * (-lambda_R(psi)); the
// b-scaling map makes the L_R <= d constraint exact, so the objective is the
// unconstrained scale-invariant form.
VariationalResult solve_chi_tilde(double gamma, double H1, double kappa, int d, int m = 48,
                                  std::uint64_t seed = 1);

// Cross-check path: chi = inf{L_R(psi) - lambda_R(psi)} with the closed-form
// optimal b per shape.
VariationalResult chi_psi_formulation(double gamma, double H1, double kappa, int d,
                                      int m = 48, std::uint64_t seed = 1);

// chi~ = chi^{1/(1-2nu)} (1-2nu) (2nu/d)^beta.
double chi_tilde_from_chi(double chi, double nu, double beta, int d);

// chi (q^{-2nu} - p^{-2nu}).
double intermittency_gap(double p, double q, double nu, double chi);

}  // namespace pam
