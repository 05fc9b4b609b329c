#include "pam/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace pam {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr long kDenseLimit = 2000;

// Union-find over active sites to split the operator into independent
// nearest-neighbor components.
struct UnionFind {
    std::vector<long> parent;
    explicit UnionFind(long n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    long find(long x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    }
    void unite(long a, long b) {
        a = find(a);
        b = find(b);
        if (a != b) parent[b] = a;
    }
};
}  // namespace

double DirichletSpectrum::principal() const {
    return eigenvalues.size() > 0 ? eigenvalues[0] : -kInf;
}

Eigen::SparseMatrix<double> anderson_operator(const PotentialField& V, double kappa,
                                              std::vector<long>* active_sites) {
    const auto& box = V.box();
    std::vector<long> active;
    std::vector<long> pos(static_cast<std::size_t>(box.site_count()), -1);
    for (long i = 0; i < box.site_count(); ++i) {
        if (!V.hard(i)) {
            pos[static_cast<std::size_t>(i)] = static_cast<long>(active.size());
            active.push_back(i);
        }
    }
    const long n = static_cast<long>(active.size());
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<std::size_t>(n) * (2 * box.dim() + 1));
    for (long r = 0; r < n; ++r) {
        const long site = active[static_cast<std::size_t>(r)];
        // Dirichlet drain: diagonal carries the full -2dk regardless of how
        // many neighbors survive inside the box.
        trip.emplace_back(r, r, V.soft_value(site) - 2.0 * box.dim() * kappa);
        for (long nb : box.neighbors(site)) {
            const long c = pos[static_cast<std::size_t>(nb)];
            if (c >= 0) trip.emplace_back(r, c, kappa);
        }
    }
    Eigen::SparseMatrix<double> A(n, n);
    A.setFromTriplets(trip.begin(), trip.end());
    if (active_sites) *active_sites = std::move(active);
    return A;
}

LanczosResult lanczos_topk(
    const std::function<void(const Eigen::VectorXd&, Eigen::VectorXd&)>& apply, long n,
    int k, double tol, int max_iter, const Eigen::VectorXd* start) {
    if (k < 1 || n < 1) throw std::invalid_argument("lanczos_topk: bad arguments");
    k = static_cast<int>(std::min<long>(k, n));
    const int m_max = static_cast<int>(std::min<long>(n, max_iter));

    // Deterministic start vector with all lattice symmetries broken.
    Eigen::VectorXd v(n);
    if (start && start->size() == n && start->norm() > 0.0) {
        v = *start;
    } else {
        for (long i = 0; i < n; ++i) v[i] = 1.0 + 0.001 * std::sin(1.0 + static_cast<double>(i));
    }
    v.normalize();

    Eigen::MatrixXd basis(n, m_max);
    std::vector<double> a, b, ritz;
    Eigen::VectorXd w(n);
    basis.col(0) = v;
    int m = 0;
    for (int j = 0; j < m_max; ++j) {
        apply(basis.col(j), w);
        double alpha = basis.col(j).dot(w);
        a.push_back(alpha);
        w -= alpha * basis.col(j);
        if (j > 0) w -= b.back() * basis.col(j - 1);
        // full reorthogonalization
        for (int pass = 0; pass < 2; ++pass) {
            for (int i = 0; i <= j; ++i) w -= basis.col(i).dot(w) * basis.col(i);
        }
        const double beta = w.norm();
        m = j + 1;
        if (beta < 1e-14) break;  // invariant subspace found
        if (j + 1 < m_max) {
            b.push_back(beta);
            basis.col(j + 1) = w / beta;
        }
        // convergence check every few steps: top-k Ritz values stagnant under
        // tol (O(m^2) eigenvalues-only tridiagonal solve, no vectors)
        if (m >= k + 2 && (m % 5 == 0 || j + 1 == m_max)) {
            Eigen::Map<const Eigen::VectorXd> diag(a.data(), m);
            Eigen::Map<const Eigen::VectorXd> sub(b.data(), m - 1);
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
            es.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
            if (es.info() != Eigen::Success) continue;  // check again later
            bool done = true;
            for (int q = 0; q < k; ++q) {
                const double theta = es.eigenvalues()[m - 1 - q];
                const double prev = q < static_cast<int>(ritz.size())
                                        ? ritz[static_cast<std::size_t>(q)]
                                        : kInf;
                if (std::abs(theta - prev) > tol * std::max(1.0, std::abs(theta))) {
                    done = false;
                }
                if (q < static_cast<int>(ritz.size())) {
                    ritz[static_cast<std::size_t>(q)] = theta;
                } else {
                    ritz.push_back(theta);
                }
            }
            if (done) break;
        }
    }

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    {
        Eigen::Map<const Eigen::VectorXd> diag(a.data(), m);
        Eigen::Map<const Eigen::VectorXd> sub(b.data(), std::max(0, m - 1));
        es.computeFromTridiagonal(diag, sub);
    }
    if (es.info() != Eigen::Success) {
        // the QL sweep can stall on extreme-range entries; redo densely
        Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m, m);
        for (int i = 0; i < m; ++i) T(i, i) = a[static_cast<std::size_t>(i)];
        for (int i = 0; i + 1 < m; ++i) {
            T(i, i + 1) = T(i + 1, i) = b[static_cast<std::size_t>(i)];
        }
        es.compute(T);
    }
    if (es.info() != Eigen::Success) {
        throw std::runtime_error("lanczos_topk: tridiagonal eigensolve failed");
    }
    const int kk = std::min(k, m);
    LanczosResult out;
    out.values.resize(kk);
    out.vectors.resize(n, kk);
    for (int q = 0; q < kk; ++q) {
        const int col = m - 1 - q;  // SelfAdjointEigenSolver sorts ascending
        out.values[q] = es.eigenvalues()[col];
        out.vectors.col(q) = basis.leftCols(m) * es.eigenvectors().col(col);
        out.vectors.col(q).normalize();
    }
    return out;
}

DirichletSpectrum dirichlet_spectrum(const PotentialField& V, double kappa,
                                     std::optional<int> k_max) {
    if (!(kappa > 0.0)) throw std::invalid_argument("dirichlet_spectrum: kappa must be > 0");
    const auto& box = V.box();
    std::vector<long> active;
    std::vector<long> pos(static_cast<std::size_t>(box.site_count()), -1);
    for (long i = 0; i < box.site_count(); ++i) {
        if (!V.hard(i)) {
            pos[static_cast<std::size_t>(i)] = static_cast<long>(active.size());
            active.push_back(i);
        }
    }
    const long n = static_cast<long>(active.size());
    DirichletSpectrum out;
    out.active_sites = active;
    out.total_sites = box.site_count();
    out.kappa = kappa;
    if (n == 0) {
        out.eigenvalues.resize(0);
        out.eigenvectors.resize(0, 0);
        return out;
    }

    UnionFind uf(n);
    for (long r = 0; r < n; ++r) {
        for (long nb : box.neighbors(active[static_cast<std::size_t>(r)])) {
            const long c = pos[static_cast<std::size_t>(nb)];
            if (c >= 0) uf.unite(r, c);
        }
    }
    std::vector<std::vector<long>> comps;  // rows (active-local) per component
    {
        std::vector<long> comp_id(static_cast<std::size_t>(n), -1);
        for (long r = 0; r < n; ++r) {
            const long root = uf.find(r);
            if (comp_id[static_cast<std::size_t>(root)] < 0) {
                comp_id[static_cast<std::size_t>(root)] = static_cast<long>(comps.size());
                comps.emplace_back();
            }
            comps[static_cast<std::size_t>(comp_id[static_cast<std::size_t>(root)])].push_back(r);
        }
    }

    std::vector<std::pair<double, Eigen::VectorXd>> pairs;  // eigenvector over active rows
    for (const auto& rows : comps) {
        const long cn = static_cast<long>(rows.size());
        std::vector<long> local(static_cast<std::size_t>(n), -1);
        for (long i = 0; i < cn; ++i) local[static_cast<std::size_t>(rows[static_cast<std::size_t>(i)])] = i;

        const auto assemble_dense = [&]() {
            Eigen::MatrixXd A = Eigen::MatrixXd::Zero(cn, cn);
            for (long i = 0; i < cn; ++i) {
                const long site = active[static_cast<std::size_t>(rows[static_cast<std::size_t>(i)])];
                A(i, i) = V.soft_value(site) - 2.0 * box.dim() * kappa;
                for (long nb : box.neighbors(site)) {
                    const long c = pos[static_cast<std::size_t>(nb)];
                    if (c >= 0) A(i, local[static_cast<std::size_t>(c)]) = kappa;
                }
            }
            return A;
        };

        if (cn <= kDenseLimit) {
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(assemble_dense());
            if (es.info() != Eigen::Success) {
                throw std::runtime_error("dirichlet_spectrum: dense eigensolve failed");
            }
            for (long i = 0; i < cn; ++i) {
                Eigen::VectorXd vec = Eigen::VectorXd::Zero(n);
                for (long q = 0; q < cn; ++q) {
                    vec[rows[static_cast<std::size_t>(q)]] = es.eigenvectors()(q, i);
                }
                pairs.emplace_back(es.eigenvalues()[i], std::move(vec));
            }
        } else {
            const int k = k_max.value_or(10);
            Eigen::SparseMatrix<double> A(cn, cn);
            {
                std::vector<Eigen::Triplet<double>> trip;
                for (long i = 0; i < cn; ++i) {
                    const long site = active[static_cast<std::size_t>(rows[static_cast<std::size_t>(i)])];
                    trip.emplace_back(i, i, V.soft_value(site) - 2.0 * box.dim() * kappa);
                    for (long nb : box.neighbors(site)) {
                        const long c = pos[static_cast<std::size_t>(nb)];
                        if (c >= 0) trip.emplace_back(i, local[static_cast<std::size_t>(c)], kappa);
                    }
                }
                A.setFromTriplets(trip.begin(), trip.end());
            }
            auto res = lanczos_topk(
                [&A](const Eigen::VectorXd& x, Eigen::VectorXd& y) { y = A * x; }, cn, k);
            for (int q = 0; q < res.values.size(); ++q) {
                Eigen::VectorXd vec = Eigen::VectorXd::Zero(n);
                for (long i = 0; i < cn; ++i) {
                    vec[rows[static_cast<std::size_t>(i)]] = res.vectors(i, q);
                }
                pairs.emplace_back(res.values[q], std::move(vec));
            }
        }
    }

    std::sort(pairs.begin(), pairs.end(),
              [](const auto& a, const auto& b) { return a.first > b.first; });
    long keep = static_cast<long>(pairs.size());
    if (k_max && *k_max < keep) keep = *k_max;
    out.eigenvalues.resize(keep);
    out.eigenvectors.resize(n, keep);
    for (long i = 0; i < keep; ++i) {
        out.eigenvalues[i] = pairs[static_cast<std::size_t>(i)].first;
        out.eigenvectors.col(i) = pairs[static_cast<std::size_t>(i)].second;
    }
    return out;
}

double principal_eigenvalue(const PotentialField& V, double kappa) {
    const auto& box = V.box();
    std::vector<long> active;
    std::vector<long> pos(static_cast<std::size_t>(box.site_count()), -1);
    for (long i = 0; i < box.site_count(); ++i) {
        if (!V.hard(i)) {
            pos[static_cast<std::size_t>(i)] = static_cast<long>(active.size());
            active.push_back(i);
        }
    }
    const long n = static_cast<long>(active.size());
    if (n == 0) return -kInf;

    UnionFind uf(n);
    for (long r = 0; r < n; ++r) {
        for (long nb : box.neighbors(active[static_cast<std::size_t>(r)])) {
            const long c = pos[static_cast<std::size_t>(nb)];
            if (c >= 0) uf.unite(r, c);
        }
    }
    std::vector<std::vector<long>> comps;
    {
        std::vector<long> comp_id(static_cast<std::size_t>(n), -1);
        for (long r = 0; r < n; ++r) {
            const long root = uf.find(r);
            if (comp_id[static_cast<std::size_t>(root)] < 0) {
                comp_id[static_cast<std::size_t>(root)] = static_cast<long>(comps.size());
                comps.emplace_back();
            }
            comps[static_cast<std::size_t>(comp_id[static_cast<std::size_t>(root)])].push_back(r);
        }
    }

    double best = -kInf;
    for (const auto& rows : comps) {
        const long cn = static_cast<long>(rows.size());
        std::vector<long> local(static_cast<std::size_t>(n), -1);
        for (long i = 0; i < cn; ++i) local[static_cast<std::size_t>(rows[static_cast<std::size_t>(i)])] = i;
        if (cn <= 64) {
            Eigen::MatrixXd A = Eigen::MatrixXd::Zero(cn, cn);
            for (long i = 0; i < cn; ++i) {
                const long site = active[static_cast<std::size_t>(rows[static_cast<std::size_t>(i)])];
                A(i, i) = V.soft_value(site) - 2.0 * box.dim() * kappa;
                for (long nb : box.neighbors(site)) {
                    const long c = pos[static_cast<std::size_t>(nb)];
                    if (c >= 0) A(i, local[static_cast<std::size_t>(c)]) = kappa;
                }
            }
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A, Eigen::EigenvaluesOnly);
            best = std::max(best, es.eigenvalues()[cn - 1]);
        } else {
            Eigen::SparseMatrix<double> A(cn, cn);
            std::vector<Eigen::Triplet<double>> trip;
            for (long i = 0; i < cn; ++i) {
                const long site = active[static_cast<std::size_t>(rows[static_cast<std::size_t>(i)])];
                trip.emplace_back(i, i, V.soft_value(site) - 2.0 * box.dim() * kappa);
                for (long nb : box.neighbors(site)) {
                    const long c = pos[static_cast<std::size_t>(nb)];
                    if (c >= 0) trip.emplace_back(i, local[static_cast<std::size_t>(c)], kappa);
                }
            }
            A.setFromTriplets(trip.begin(), trip.end());
            auto res = lanczos_topk(
                [&A](const Eigen::VectorXd& x, Eigen::VectorXd& y) { y = A * x; }, cn, 1,
                1e-10);
            best = std::max(best, res.values[0]);
        }
    }
    return best;
}

double shifted_principal_eigenvalue(const PotentialField& ambient,
                                    const std::vector<int>& center, int radius,
                                    double kappa) {
    return principal_eigenvalue(ambient.restrict_window(center, radius), kappa);
}

}  // namespace pam
