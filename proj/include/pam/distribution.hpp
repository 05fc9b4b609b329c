#pragma once

#include <optional>
#include <string>
#include <variant>

namespace pam {

// Potential distributions with essential supremum 0.
//
// BernoulliTrap: value 0 with probability p, hard trap (-inf) otherwise.
// StretchedTail: Prob(xi > -x) = exp{-A x^{-gamma/(1-gamma)}}, support (-inf,0).
// DensityTail:   density proportional to (-x)^sigma on [-1,0].
struct BernoulliTrap {
    double p;
};
struct StretchedTail {
    double A;
    double gamma;
};
struct DensityTail {
    double sigma;
};

class PotentialDistribution {
public:
    static PotentialDistribution bernoulli(double p,
                                           std::optional<double> truncation = std::nullopt);
    static PotentialDistribution stretched(double A, double gamma);
    static PotentialDistribution density_tail(double sigma);

    // Inverse-CDF sampling; u in (0,1). Returns -inf for untruncated hard traps.
    double quantile(double u) const;

    bool has_hard_traps() const;

    // gamma of the gamma-class the family belongs to.
    double gamma_class() const;

    // Cumulant generating function H(l) = log <exp(l*xi)>, l >= 0.
    // Closed form for Bernoulli; adaptive quadrature otherwise.
    double cumulant(double ell) const;

    std::string tag() const;
    static PotentialDistribution parse(const std::string& tag);

    const std::optional<double>& truncation() const { return truncation_; }
    const std::variant<BernoulliTrap, StretchedTail, DensityTail>& spec() const {
        return spec_;
    }

private:
    PotentialDistribution(std::variant<BernoulliTrap, StretchedTail, DensityTail> spec,
                          std::optional<double> truncation);

    std::variant<BernoulliTrap, StretchedTail, DensityTail> spec_;
    std::optional<double> truncation_;  // lower clip level, <= 0
};

// H(l); identical to dist.cumulant, kept as a free function for call sites
// that read like the formulas.
inline double cumulant_H(const PotentialDistribution& dist, double ell) {
    return dist.cumulant(ell);
}

}  // namespace pam
