#pragma once

#include <functional>
#include <memory>

#include "pam/distribution.hpp"

namespace pam {

using ScaleFn = std::function<double(double)>;

// H~_t(y) = (alpha_t^{d+2}/t) H((t/alpha_t^d) y).
double scaled_cumulant(const PotentialDistribution& dist, int d, double t,
                       const ScaleFn& alpha, double y);

// For each t, alpha_t is the root of (alpha^{d+2}/t) H(t/alpha^d) = target
// (target < 0), found by bisection. The returned callable memoizes.
ScaleFn calibrate_alpha(const PotentialDistribution& dist, int d, double target);

// nu = (1-gamma)/(d+2-d*gamma), beta = 2nu/(1-2nu), plus the scale functions
// alpha_t, b_t (b/alpha(b)^2 = log t), gamma_t = t/alpha(b_t)^3.
struct ScalingProfile {
    double gamma;
    double H1;  // H~(1) < 0
    int d;
    double nu;
    double beta;
    ScaleFn alpha;

    static ScalingProfile make(double gamma, double H1, int d, ScaleFn alpha);

    double b(double t) const;        // scale_b
    double gamma_t(double t) const;  // t / alpha(b_t)^3
    double alpha_inverse(double value) const;
};

double scale_b(const ScalingProfile& profile, double t);

}  // namespace pam
