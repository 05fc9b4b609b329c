#pragma once

#include <vector>

#include "pam/field.hpp"

namespace pam {

// Periodic comparison potential Phi_R(z) = kappa * sum_k |grad eta_k(z)|^2
// built from the partition of unity eta_k(z) = eta(z - 2Rk),
// eta(z) = prod_i zeta(z_i), zeta(z) = sqrt(phi(1/2 + z/R)(1 - phi(-3/2 + z/R))),
// phi(x) = sin^2(pi(x+1)/2) on [-1,0], 0 below, 1 above.
class PartitionPotential {
public:
    PartitionPotential(int R, double kappa, int d);

    int R() const { return R_; }
    int period() const { return 2 * R_; }
    int dim() const { return d_; }
    double kappa() const { return kappa_; }

    static double phi(double x);
    double zeta(double z) const;                       // 1D bump, z in lattice units
    double eta(const std::vector<int>& z) const;       // centered copy (k = 0)
    double partition_sum(const std::vector<int>& z) const;  // sum_k eta_k(z)^2
    double value(const std::vector<int>& z) const;     // Phi_R(z)

    double sup_norm() const { return sup_norm_; }
    // Constructive constant 4 d kappa ||(sqrt(phi))'||_inf^2 = kappa d pi^2;
    // bounds ||Phi_R||_inf * R^2.
    double constant() const;

private:
    double grad_sq_sum_1d(int z) const;  // sum_k |zeta_k(z+1)-zeta_k(z)| terms bundled below

    int R_;
    double kappa_;
    int d_;
    double sup_norm_;
    std::vector<double> phi_one_period_;  // Phi_R over one period cell in 1D building block
};

struct EigenComparisonReport {
    double lhs = 0.0;  // lambda^d_r(V - Phi_R)
    double rhs = 0.0;  // max_z lambda^d_{z;2R}(V), z in Q_{r+2R}
    bool holds = false;
};

// Both sides of the microbox eigenvalue comparison; the ambient field must
// cover Q_{r+4R} so every shifted window fits.
EigenComparisonReport check_eigenvalue_comparison(const PotentialField& V, double kappa,
                                                  int r, int R);

struct CompactBoundReport {
    double lhs = 0.0;  // u^V_{r_used}(t,0)
    double rhs = 0.0;  // e^{-t} + e^{Ct/R^2} (3 r(t))^d exp{t max lambda}
    bool holds = false;
    bool capped = false;
    double macro_radius = 0.0;  // r(t) = t log t before capping
    double used_radius = 0.0;
};

CompactBoundReport check_compact_bound(const PotentialField& V, double kappa, double t,
                                       int R, int cap_radius);

}  // namespace pam
