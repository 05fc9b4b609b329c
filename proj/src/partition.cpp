#include "pam/partition.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

#include "pam/solver.hpp"
#include "pam/spectrum.hpp"

namespace pam {

namespace {
constexpr double kPi = 3.14159265358979323846;

int mod_period(long z, int period) {
    long m = z % period;
    if (m < 0) m += period;
    return static_cast<int>(m);
}

// Max over shifted-window principal eigenvalues, visiting windows with larger
// potential mass first and stopping once `enough(best)` certifies the bound.
// The returned value is then a lower bound on the true max that already
// dominates, which is all the comparisons need.
template <typename Enough>
double max_window_eigenvalue(const PotentialField& V, int center_radius, int win_radius,
                             double kappa, Enough enough) {
    const int d = V.box().dim();
    LatticeBox centers(d, center_radius);
    const long n = centers.site_count();
    std::vector<std::pair<double, long>> order;
    order.reserve(static_cast<std::size_t>(n));
    LatticeBox win(d, win_radius);
    for (long i = 0; i < n; ++i) {
        const auto c = centers.coord(i);
        double mass = 0.0;
        std::vector<int> z(static_cast<std::size_t>(d));
        for (long j = 0; j < win.site_count(); ++j) {
            const auto off = win.coord(j);
            for (int a = 0; a < d; ++a) z[static_cast<std::size_t>(a)] = c[static_cast<std::size_t>(a)] + off[static_cast<std::size_t>(a)];
            const long idx = V.box().index(z);
            if (!V.hard(idx)) mass += 1.0 + V.soft_value(idx);
        }
        order.emplace_back(-mass, i);
    }
    std::sort(order.begin(), order.end());
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& [neg_mass, i] : order) {
        best = std::max(best, shifted_principal_eigenvalue(V, centers.coord(i), win_radius, kappa));
        if (enough(best)) break;
    }
    return best;
}
}  // namespace

double PartitionPotential::phi(double x) {
    if (x <= -1.0) return 0.0;
    if (x >= 0.0) return 1.0;
    const double s = std::sin(kPi * (x + 1.0) / 2.0);
    return s * s;
}

double PartitionPotential::zeta(double z) const {
    const double a = phi(0.5 + z / R_);
    const double b = 1.0 - phi(-1.5 + z / R_);
    return std::sqrt(std::max(0.0, a * b));
}

PartitionPotential::PartitionPotential(int R, double kappa, int d)
    : R_(R), kappa_(kappa), d_(d) {
    if (R < 2) throw std::invalid_argument("PartitionPotential: R must be >= 2");
    if (d < 1) throw std::invalid_argument("PartitionPotential: d must be >= 1");
    if (!(kappa > 0.0)) throw std::invalid_argument("PartitionPotential: kappa must be > 0");

    // 1D building blocks over one period: S(z) = sum_k zeta(z-2Rk)^2 must be
    // identically 1, D(z) = sum_k (zeta(z+1-2Rk) - zeta(z-2Rk))^2.
    const int P = period();
    phi_one_period_.assign(static_cast<std::size_t>(P), 0.0);
    double maxD = 0.0;
    for (int z = 0; z < P; ++z) {
        double S = 0.0, D = 0.0;
        for (int k = -2; k <= 2; ++k) {
            const double zk = z - static_cast<double>(2 * R_) * k;
            const double zc = zeta(zk);
            S += zc * zc;
            const double dz = zeta(zk + 1.0) - zc;
            D += dz * dz;
        }
        if (std::abs(S - 1.0) > 1e-12) {
            throw std::runtime_error("PartitionPotential: partition of unity violated");
        }
        phi_one_period_[static_cast<std::size_t>(z)] = kappa_ * D;
        maxD = std::max(maxD, kappa_ * D);
    }
    // Phi factorizes across axes because the per-axis sums of zeta^2 are 1.
    sup_norm_ = d_ * maxD;
    if (sup_norm_ * R_ * R_ > constant() + 1e-12) {
        throw std::runtime_error("PartitionPotential: sup-norm bound violated");
    }
}

double PartitionPotential::eta(const std::vector<int>& z) const {
    double prod = 1.0;
    for (int zi : z) prod *= zeta(zi);
    return prod;
}

double PartitionPotential::partition_sum(const std::vector<int>& z) const {
    double prod = 1.0;
    for (int zi : z) {
        double S = 0.0;
        for (int k = -2; k <= 2; ++k) {
            // shift into the period first so huge coordinates stay exact
            const double zk = mod_period(zi, period()) - static_cast<double>(period()) * k;
            const double zc = zeta(zk);
            S += zc * zc;
        }
        prod *= S;
    }
    return prod;
}

double PartitionPotential::value(const std::vector<int>& z) const {
    double sum = 0.0;
    for (int zi : z) sum += phi_one_period_[static_cast<std::size_t>(mod_period(zi, period()))];
    return sum;
}

double PartitionPotential::constant() const {
    // ||(sqrt(phi))'||_inf = pi/2 for phi = sin^2(pi(x+1)/2).
    return 4.0 * d_ * kappa_ * (kPi / 2.0) * (kPi / 2.0);
}

EigenComparisonReport check_eigenvalue_comparison(const PotentialField& V, double kappa,
                                                  int r, int R) {
    if (!(r > R && R >= 2)) {
        throw std::invalid_argument("check_eigenvalue_comparison: need r > R >= 2");
    }
    const int d = V.box().dim();
    if (V.box().radius() < r + 4 * R) {
        throw std::out_of_range("check_eigenvalue_comparison: field must cover Q_{r+4R}");
    }
    PartitionPotential part(R, kappa, d);

    const std::vector<int> origin(static_cast<std::size_t>(d), 0);
    PotentialField inner = V.restrict_window(origin, r);
    for (long i = 0; i < inner.box().site_count(); ++i) {
        if (!inner.hard(i)) {
            inner.set_soft(i, inner.soft_value(i) - part.value(inner.box().coord(i)));
        }
    }
    EigenComparisonReport rep;
    rep.lhs = principal_eigenvalue(inner, kappa);

    const double lhs = rep.lhs;
    rep.rhs = max_window_eigenvalue(V, r + 2 * R, 2 * R, kappa,
                                    [lhs](double best) { return best >= lhs; });
    rep.holds = rep.lhs == -std::numeric_limits<double>::infinity() ||
                rep.lhs <= rep.rhs + 1e-12 * std::max(1.0, std::abs(rep.rhs));
    return rep;
}

CompactBoundReport check_compact_bound(const PotentialField& V, double kappa, double t,
                                       int R, int cap_radius) {
    if (!(t > 1.0)) throw std::invalid_argument("check_compact_bound: need t > 1");
    const int d = V.box().dim();
    CompactBoundReport rep;
    rep.macro_radius = t * std::log(t);
    int r_used = static_cast<int>(std::ceil(rep.macro_radius));
    if (r_used > cap_radius) {
        r_used = cap_radius;
        rep.capped = true;
    }
    if (r_used + 4 * R > V.box().radius()) {
        r_used = V.box().radius() - 4 * R;
        rep.capped = true;
    }
    if (r_used <= R) throw std::invalid_argument("check_compact_bound: box too small");
    rep.used_radius = r_used;

    const std::vector<int> origin(static_cast<std::size_t>(d), 0);
    const auto sol = solve_dirichlet(V.restrict_window(origin, r_used), kappa, t,
                                     SolveMethod::eigen);
    rep.lhs = sol.at(origin);

    PartitionPotential part(R, kappa, d);
    const double pref = std::exp(part.constant() * t / (static_cast<double>(R) * R)) *
                        std::pow(3.0 * rep.macro_radius, d);
    const double lhs = rep.lhs;
    const double best = max_window_eigenvalue(
        V, r_used + 2 * R, 2 * R, kappa,
        [&](double b) { return std::exp(-t) + pref * std::exp(t * b) >= lhs; });
    rep.rhs = std::exp(-t) + pref * std::exp(t * best);
    rep.holds = rep.lhs <= rep.rhs * (1.0 + 1e-10);
    return rep;
}

}  // namespace pam
