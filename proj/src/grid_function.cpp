#include "pam/grid_function.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "pam/spectrum.hpp"

namespace pam {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

long ipow(long base, int e) {
    long r = 1;
    for (int i = 0; i < e; ++i) r *= base;
    return r;
}
}  // namespace

GridFunction::GridFunction(int d, int m, double R) : d_(d), m_(m), R_(R) {
    if (d < 1 || m < 1 || !(R > 0.0)) {
        throw std::invalid_argument("GridFunction: need d >= 1, m >= 1, R > 0");
    }
    values_.assign(static_cast<std::size_t>(ipow(m + 1, d)), 0.0);
}

GridFunction GridFunction::from_fn(
    int d, int m, double R, const std::function<double(const std::vector<double>&)>& fn) {
    GridFunction g(d, m, R);
    for (long i = 0; i < g.node_count(); ++i) g.set_value(i, fn(g.node_point(i)));
    return g;
}

long GridFunction::node_index(const std::vector<int>& k) const {
    long idx = 0;
    for (int i = 0; i < d_; ++i) {
        const int ki = k[static_cast<std::size_t>(i)];
        if (ki < 0 || ki > m_) throw std::out_of_range("GridFunction: node out of range");
        idx = idx * (m_ + 1) + ki;
    }
    return idx;
}

std::vector<int> GridFunction::node_coord(long idx) const {
    std::vector<int> k(static_cast<std::size_t>(d_));
    for (int i = d_ - 1; i >= 0; --i) {
        k[static_cast<std::size_t>(i)] = static_cast<int>(idx % (m_ + 1));
        idx /= (m_ + 1);
    }
    return k;
}

std::vector<double> GridFunction::node_point(long idx) const {
    const auto k = node_coord(idx);
    std::vector<double> x(static_cast<std::size_t>(d_));
    for (int i = 0; i < d_; ++i) x[static_cast<std::size_t>(i)] = -R_ + h() * k[static_cast<std::size_t>(i)];
    return x;
}

bool GridFunction::boundary_node(long idx) const {
    for (int i = d_ - 1; i >= 0; --i) {
        const int ki = static_cast<int>(idx % (m_ + 1));
        if (ki == 0 || ki == m_) return true;
        idx /= (m_ + 1);
    }
    return false;
}

double GridFunction::node_weight(long idx) const {
    double w = 1.0;
    for (int i = d_ - 1; i >= 0; --i) {
        const int ki = static_cast<int>(idx % (m_ + 1));
        w *= (ki == 0 || ki == m_) ? 0.5 * h() : h();
        idx /= (m_ + 1);
    }
    return w;
}

double GridFunction::integral() const {
    double sum = 0.0;
    for (long i = 0; i < node_count(); ++i) sum += node_weight(i) * values_[static_cast<std::size_t>(i)];
    return sum;
}

void GridFunction::normalize() {
    const double s = integral();
    if (!(s > 0.0)) throw std::runtime_error("GridFunction::normalize: nonpositive integral");
    for (double& v : values_) v /= s;
}

double GridFunction::interpolate(const std::vector<double>& x) const {
    std::vector<int> base(static_cast<std::size_t>(d_));
    std::vector<double> frac(static_cast<std::size_t>(d_));
    for (int i = 0; i < d_; ++i) {
        const double xi = x[static_cast<std::size_t>(i)];
        if (xi < -R_ || xi > R_) return 0.0;
        double u = (xi + R_) / h();
        int k = static_cast<int>(std::floor(u));
        if (k >= m_) k = m_ - 1;
        base[static_cast<std::size_t>(i)] = k;
        frac[static_cast<std::size_t>(i)] = u - k;
    }
    double out = 0.0;
    for (long corner = 0; corner < (1L << d_); ++corner) {
        double w = 1.0;
        std::vector<int> k = base;
        for (int i = 0; i < d_; ++i) {
            if ((corner >> i) & 1) {
                ++k[static_cast<std::size_t>(i)];
                w *= frac[static_cast<std::size_t>(i)];
            } else {
                w *= 1.0 - frac[static_cast<std::size_t>(i)];
            }
        }
        if (w != 0.0) out += w * values_[static_cast<std::size_t>(node_index(k))];
    }
    return out;
}

GridFunction GridFunction::resample(int m_new) const {
    GridFunction g(d_, m_new, R_);
    for (long i = 0; i < g.node_count(); ++i) g.set_value(i, interpolate(g.node_point(i)));
    return g;
}

double functional_I(const GridFunction& f, double kappa) {
    const int d = f.dim();
    const int m = f.cells();
    const double h = f.h();
    double sum = 0.0;
    for (long i = 0; i < f.node_count(); ++i) {
        const double g0 = std::sqrt(std::max(0.0, f.value(i)));
        const auto k = f.node_coord(i);
        for (int axis = 0; axis < d; ++axis) {
            if (k[static_cast<std::size_t>(axis)] == m) continue;
            auto kn = k;
            ++kn[static_cast<std::size_t>(axis)];
            const double g1 = std::sqrt(std::max(0.0, f.value(f.node_index(kn))));
            sum += (g1 - g0) * (g1 - g0);
        }
    }
    return kappa * sum * std::pow(h, d - 2);
}

namespace {
// Sum of h^d over grid cells whose 2^d corners all satisfy pred.
double cell_support_measure(const GridFunction& f, const std::function<bool(double)>& pred) {
    const int d = f.dim();
    const int m = f.cells();
    long cells = 1;
    for (int i = 0; i < d; ++i) cells *= m;
    double count = 0.0;
    std::vector<int> k(static_cast<std::size_t>(d));
    for (long c = 0; c < cells; ++c) {
        long rem = c;
        for (int i = d - 1; i >= 0; --i) {
            k[static_cast<std::size_t>(i)] = static_cast<int>(rem % m);
            rem /= m;
        }
        bool all = true;
        for (long corner = 0; corner < (1L << d) && all; ++corner) {
            auto kc = k;
            for (int i = 0; i < d; ++i) {
                if ((corner >> i) & 1) ++kc[static_cast<std::size_t>(i)];
            }
            all = pred(f.value(f.node_index(kc)));
        }
        if (all) count += 1.0;
    }
    return count * std::pow(f.h(), d);
}
}  // namespace

double functional_H_R(const GridFunction& f, double gamma, double H1) {
    if (gamma < 0.0 || gamma >= 1.0) throw std::domain_error("functional_H_R: gamma in [0,1)");
    if (!(H1 < 0.0)) throw std::domain_error("functional_H_R: H1 must be < 0");
    if (gamma == 0.0) {
        return H1 * cell_support_measure(f, [](double v) { return v > 0.0; });
    }
    double sum = 0.0;
    for (long i = 0; i < f.node_count(); ++i) {
        const double v = f.value(i);
        if (v > 0.0) sum += f.node_weight(i) * std::pow(v, gamma);
    }
    return H1 * sum;
}

double legendre_pointwise(double psi, double gamma, double H1) {
    if (gamma <= 0.0 || gamma >= 1.0) throw std::domain_error("legendre_pointwise: gamma in (0,1)");
    if (psi > 0.0) throw std::domain_error("legendre_pointwise: psi must be <= 0");
    if (psi == 0.0) return 0.0;  // support convention: sup over supp f in supp psi
    const double c = -H1;
    const double q = gamma / (1.0 - gamma);
    return (1.0 - gamma) * std::pow(gamma, q) * std::pow(c, 1.0 / (1.0 - gamma)) *
           std::pow(-psi, -q);
}

double legendre_L_R(const GridFunction& psi, double gamma, double H1) {
    if (gamma < 0.0 || gamma >= 1.0) throw std::domain_error("legendre_L_R: gamma in [0,1)");
    if (!(H1 < 0.0)) throw std::domain_error("legendre_L_R: H1 must be < 0");
    if (gamma == 0.0) {
        return -H1 * cell_support_measure(psi, [](double v) { return v < 0.0; });
    }
    double sum = 0.0;
    for (long i = 0; i < psi.node_count(); ++i) {
        sum += psi.node_weight(i) * legendre_pointwise(psi.value(i), gamma, H1);
    }
    return sum;
}

double continuum_eigenvalue(const GridFunction& psi, double kappa, bool support_restricted,
                            std::vector<double>* ground) {
    // An incoming ground vector of the right size doubles as a restart hint
    // (the previous ground state of a nearby psi), which the iterative path
    // exploits below.
    std::vector<double> hint;
    if (ground && static_cast<long>(ground->size()) == psi.node_count()) hint = *ground;
    if (ground) ground->assign(static_cast<std::size_t>(psi.node_count()), 0.0);
    const int d = psi.dim();
    const int m = psi.cells();
    const double h = psi.h();

    std::vector<long> active;
    std::vector<long> pos(static_cast<std::size_t>(psi.node_count()), -1);
    for (long i = 0; i < psi.node_count(); ++i) {
        if (psi.boundary_node(i)) continue;
        if (support_restricted && !(psi.value(i) < 0.0)) continue;
        pos[static_cast<std::size_t>(i)] = static_cast<long>(active.size());
        active.push_back(i);
    }
    const long n = static_cast<long>(active.size());
    if (n == 0) return -kInf;

    const double w = kappa / (h * h);
    std::vector<Eigen::Triplet<double>> trip;
    for (long r = 0; r < n; ++r) {
        const long node = active[static_cast<std::size_t>(r)];
        trip.emplace_back(r, r, psi.value(node) - 2.0 * d * w);
        const auto k = psi.node_coord(node);
        for (int axis = 0; axis < d; ++axis) {
            for (int s = -1; s <= 1; s += 2) {
                auto kn = k;
                kn[static_cast<std::size_t>(axis)] += s;
                if (kn[static_cast<std::size_t>(axis)] < 0 || kn[static_cast<std::size_t>(axis)] > m) continue;
                const long c = pos[static_cast<std::size_t>(psi.node_index(kn))];
                if (c >= 0) trip.emplace_back(r, c, w);
            }
        }
    }
    Eigen::SparseMatrix<double> A(n, n);
    A.setFromTriplets(trip.begin(), trip.end());

    double lambda;
    Eigen::VectorXd vec;
    if (n <= 150) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es{Eigen::MatrixXd(A)};
        lambda = es.eigenvalues()[n - 1];
        vec = es.eigenvectors().col(n - 1);
    } else {
        Eigen::VectorXd start;
        const Eigen::VectorXd* start_ptr = nullptr;
        if (!hint.empty()) {
            start.resize(n);
            for (long r = 0; r < n; ++r) {
                const double g2 = hint[static_cast<std::size_t>(active[static_cast<std::size_t>(r)])];
                start[r] = g2 > 0.0 ? std::sqrt(g2) : 0.0;
            }
            if (start.norm() > 0.0) start_ptr = &start;
        }
        auto res = lanczos_topk(
            [&A](const Eigen::VectorXd& x, Eigen::VectorXd& y) { y = A * x; }, n, 1, 1e-10,
            600, start_ptr);
        lambda = res.values[0];
        vec = res.vectors.col(0);
    }
    if (ground) {
        const double nrm2 = vec.squaredNorm();
        for (long r = 0; r < n; ++r) {
            (*ground)[static_cast<std::size_t>(active[static_cast<std::size_t>(r)])] =
                vec[r] * vec[r] / nrm2;
        }
    }
    return lambda;
}

GridFunction scaling_transform(const GridFunction& psi, double b) {
    if (!(b > 0.0)) throw std::invalid_argument("scaling_transform: b must be > 0");
    GridFunction out(psi.dim(), psi.cells(), b * psi.radius());
    const double inv = 1.0 / (b * b);
    for (long i = 0; i < psi.node_count(); ++i) out.set_value(i, psi.value(i) * inv);
    return out;
}

}  // namespace pam
