#include "pam/scaling.hpp"

#include <cmath>
#include <map>
#include <stdexcept>

#include "pam/math_util.hpp"

namespace pam {

double scaled_cumulant(const PotentialDistribution& dist, int d, double t,
                       const ScaleFn& alpha, double y) {
    if (!(t > 0.0) || !(y > 0.0)) {
        throw std::invalid_argument("scaled_cumulant: t and y must be positive");
    }
    const double a = alpha(t);
    return std::pow(a, d + 2) / t * dist.cumulant(t / std::pow(a, d) * y);
}

ScaleFn calibrate_alpha(const PotentialDistribution& dist, int d, double target) {
    if (!(target < 0.0)) throw std::invalid_argument("calibrate_alpha: target must be < 0");
    auto cache = std::make_shared<std::map<double, double>>();
    return [dist, d, target, cache](double t) {
        if (!(t > 0.0)) throw std::invalid_argument("calibrate_alpha: t must be > 0");
        if (auto it = cache->find(t); it != cache->end()) return it->second;
        // G(alpha) = (alpha^{d+2}/t) H(t/alpha^d) is nonincreasing in alpha
        // (H(l)/l nondecreasing), with G -> 0- as alpha -> 0.
        const auto G = [&](double a) {
            return std::pow(a, d + 2) / t * dist.cumulant(t / std::pow(a, d));
        };
        double lo = 1e-6, hi = 1.0;
        while (G(hi) > target) {
            hi *= 2.0;
            if (hi > 1e12) throw std::runtime_error("calibrate_alpha: no bracket above");
        }
        while (G(lo) < target) {
            lo *= 0.5;
            if (lo < 1e-15) throw std::runtime_error("calibrate_alpha: no bracket below");
        }
        const double a = bisect([&](double x) { return G(x) - target; }, lo, hi, 0.0, 1e-13);
        (*cache)[t] = a;
        return a;
    };
}

ScalingProfile ScalingProfile::make(double gamma, double H1, int d, ScaleFn alpha) {
    if (gamma < 0.0 || gamma >= 1.0) {
        throw std::invalid_argument("ScalingProfile: gamma must be in [0,1)");
    }
    if (!(H1 < 0.0)) throw std::invalid_argument("ScalingProfile: H~(1) must be < 0");
    ScalingProfile p;
    p.gamma = gamma;
    p.H1 = H1;
    p.d = d;
    p.nu = (1.0 - gamma) / (d + 2 - d * gamma);
    p.beta = 2.0 * p.nu / (1.0 - 2.0 * p.nu);
    p.alpha = std::move(alpha);
    return p;
}

double ScalingProfile::b(double t) const { return scale_b(*this, t); }

double ScalingProfile::gamma_t(double t) const {
    return t / std::pow(alpha(b(t)), 3);
}

double ScalingProfile::alpha_inverse(double value) const {
    if (!(value > 0.0)) throw std::invalid_argument("alpha_inverse: value must be > 0");
    double lo = 1e-8, hi = 2.0;
    while (alpha(hi) < value) {
        hi *= 2.0;
        if (hi > 1e300) throw std::runtime_error("alpha_inverse: value not attained");
    }
    while (alpha(lo) > value) lo *= 0.5;
    return bisect([&](double t) { return alpha(t) - value; }, lo, hi, 0.0, 1e-12);
}

double scale_b(const ScalingProfile& profile, double t) {
    const double e = std::exp(1.0);
    if (!(t > e)) throw std::invalid_argument("scale_b: t must exceed e");
    const double target = std::log(t);
    const auto g = [&](double b) { return b / std::pow(profile.alpha(b), 2); };
    double lo = 1e-8, hi = 2.0;
    double glo = g(lo), ghi = g(hi);
    while (ghi < target) {
        hi *= 2.0;
        const double gn = g(hi);
        if (gn < ghi) throw std::runtime_error("scale_b: t/alpha_t^2 not increasing");
        ghi = gn;
        if (hi > 1e300) throw std::runtime_error("scale_b: no bracket");
    }
    while (glo > target) {
        lo *= 0.5;
        glo = g(lo);
    }
    const double b = bisect([&](double x) { return g(x) - target; }, lo, hi, 0.0, 1e-13);
    if (std::abs(g(b) - target) > 1e-10 * target) {
        throw std::runtime_error("scale_b: residual above tolerance");
    }
    return b;
}

}  // namespace pam
