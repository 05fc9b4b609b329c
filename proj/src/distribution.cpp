#include "pam/distribution.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

#include "pam/math_util.hpp"

namespace pam {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

// log int e^{psi(s)} ds for a log-concave-ish psi with max at s_star;
// normalized, curvature-scaled panels keep everything representable and the
// quadrature shallow even when the peak is very sharp.
double log_integral(const std::function<double(double)>& psi, double s_star) {
    const double peak = psi(s_star);
    const auto g = [&](double s) {
        const double e = psi(s) - peak;
        return e < -745.0 ? 0.0 : std::exp(e);
    };
    const double eps = 1e-3;
    const double dd = psi(s_star + eps) - 2.0 * peak + psi(s_star - eps);
    const double w = dd < 0.0 ? std::clamp(eps / std::sqrt(-dd), 1e-6, 2.0) : 2.0;
    double total = 0.0;
    for (int k = -12; k < 12; ++k) {
        total += adaptive_simpson(g, s_star + k * w, s_star + (k + 1) * w, 1e-14, 25);
    }
    for (int side : {-1, 1}) {
        double a = 12.0 * w, width = w;
        while (a < 60.0) {
            const double b = std::min(a + width, 60.0);
            total += side > 0 ? adaptive_simpson(g, s_star + a, s_star + b, 1e-14, 25)
                              : adaptive_simpson(g, s_star - b, s_star - a, 1e-14, 25);
            a = b;
            width *= 2.0;
        }
    }
    return peak + std::log(total);
}
}

PotentialDistribution::PotentialDistribution(
    std::variant<BernoulliTrap, StretchedTail, DensityTail> spec,
    std::optional<double> truncation)
    : spec_(std::move(spec)), truncation_(truncation) {
    if (truncation_ && (*truncation_ >= 0.0 || !std::isfinite(*truncation_))) {
        throw std::invalid_argument("PotentialDistribution: truncation must be finite and < 0");
    }
}

PotentialDistribution PotentialDistribution::bernoulli(double p,
                                                       std::optional<double> truncation) {
    if (!(p > 0.0) || p > 1.0) {
        throw std::invalid_argument("BernoulliTrap: p must be in (0,1]");
    }
    return PotentialDistribution(BernoulliTrap{p}, truncation);
}

PotentialDistribution PotentialDistribution::stretched(double A, double gamma) {
    if (!(A > 0.0)) throw std::invalid_argument("StretchedTail: A must be > 0");
    if (!(gamma > 0.0) || !(gamma < 1.0)) {
        throw std::invalid_argument("StretchedTail: gamma must be in (0,1)");
    }
    return PotentialDistribution(StretchedTail{A, gamma}, std::nullopt);
}

PotentialDistribution PotentialDistribution::density_tail(double sigma) {
    if (!(sigma > -1.0)) throw std::invalid_argument("DensityTail: sigma must be > -1");
    return PotentialDistribution(DensityTail{sigma}, std::nullopt);
}

double PotentialDistribution::quantile(double u) const {
    double v;
    if (const auto* b = std::get_if<BernoulliTrap>(&spec_)) {
        v = (u < b->p) ? 0.0 : -kInf;
    } else if (const auto* s = std::get_if<StretchedTail>(&spec_)) {
        // Prob(xi > -x) = exp{-A x^{-g}} with g = gamma/(1-gamma);
        // solving exp{-A x^{-g}} = u gives x = (A / -log u)^{1/g}.
        const double g = s->gamma / (1.0 - s->gamma);
        v = -std::pow(s->A / (-std::log(u)), 1.0 / g);
    } else {
        const auto& dt = std::get<DensityTail>(spec_);
        // CDF of -xi on [0,1] is x^{sigma+1}.
        v = -std::pow(u, 1.0 / (dt.sigma + 1.0));
    }
    if (truncation_ && v < *truncation_) v = *truncation_;
    return v;
}

bool PotentialDistribution::has_hard_traps() const {
    if (truncation_) return false;
    const auto* b = std::get_if<BernoulliTrap>(&spec_);
    return b != nullptr && b->p < 1.0;
}

double PotentialDistribution::gamma_class() const {
    if (const auto* s = std::get_if<StretchedTail>(&spec_)) return s->gamma;
    return 0.0;
}

double PotentialDistribution::cumulant(double ell) const {
    if (ell < 0.0) throw std::invalid_argument("cumulant_H: ell must be >= 0");
    if (ell == 0.0) return 0.0;
    if (const auto* b = std::get_if<BernoulliTrap>(&spec_)) {
        if (!truncation_) return std::log(b->p);
        return std::log(b->p + (1.0 - b->p) * std::exp(ell * *truncation_));
    }
    // <exp(l*xi)> = int_0^inf e^{-l x} dF(x) for x = -xi; substituting x = e^s
    // and quadrating e^{psi(s)} around its saddle keeps the computation in
    // range even when the MGF itself underflows (large l).
    if (const auto* st = std::get_if<StretchedTail>(&spec_)) {
        // density of x: A g x^{-g-1} e^{-A x^{-g}}, g = gamma/(1-gamma)
        const double g = st->gamma / (1.0 - st->gamma);
        const double A = st->A;
        const auto psi = [=](double s) {
            return std::log(A * g) - g * s - A * std::exp(-g * s) - ell * std::exp(s);
        };
        const auto dpsi = [=](double s) {
            return -g + A * g * std::exp(-g * s) - ell * std::exp(s);
        };
        double lo = -1.0, hi = 1.0;
        while (dpsi(lo) <= 0.0) lo -= std::max(1.0, hi - lo);
        while (dpsi(hi) >= 0.0) hi += std::max(1.0, hi - lo);
        const double s_star = bisect(dpsi, lo, hi);
        return std::min(log_integral(psi, s_star), 0.0);
    }
    const auto& dt = std::get<DensityTail>(spec_);
    // density of x on (0,1]: (sigma+1) x^sigma
    const double sp = dt.sigma + 1.0;
    const auto psi = [=](double s) {
        if (s > 0.0) return -kInf;  // x <= 1
        return std::log(sp) + sp * s - ell * std::exp(s);
    };
    const double s_star = std::min(std::log(sp / ell), 0.0);
    return std::min(log_integral(psi, s_star), 0.0);
}

std::string PotentialDistribution::tag() const {
    char buf[128];
    if (const auto* b = std::get_if<BernoulliTrap>(&spec_)) {
        if (truncation_) {
            std::snprintf(buf, sizeof buf, "bernoulli(p=%.17g,trunc=%.17g)", b->p, *truncation_);
        } else {
            std::snprintf(buf, sizeof buf, "bernoulli(p=%.17g)", b->p);
        }
    } else if (const auto* s = std::get_if<StretchedTail>(&spec_)) {
        std::snprintf(buf, sizeof buf, "stretched(A=%.17g,gamma=%.17g)", s->A, s->gamma);
    } else {
        const auto& dt = std::get<DensityTail>(spec_);
        std::snprintf(buf, sizeof buf, "density(sigma=%.17g)", dt.sigma);
    }
    return buf;
}

PotentialDistribution PotentialDistribution::parse(const std::string& tag) {
    double a = 0, b = 0;
    if (std::sscanf(tag.c_str(), "bernoulli(p=%lf,trunc=%lf)", &a, &b) == 2) {
        return bernoulli(a, b);
    }
    if (std::sscanf(tag.c_str(), "bernoulli(p=%lf)", &a) == 1) return bernoulli(a);
    if (std::sscanf(tag.c_str(), "stretched(A=%lf,gamma=%lf)", &a, &b) == 2) {
        return stretched(a, b);
    }
    if (std::sscanf(tag.c_str(), "density(sigma=%lf)", &a) == 1) return density_tail(a);
    throw std::invalid_argument("PotentialDistribution::parse: bad tag '" + tag + "'");
}

}  // namespace pam
