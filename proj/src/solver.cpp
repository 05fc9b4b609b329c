#include "pam/solver.hpp"

#include <cmath>
#include <stdexcept>

namespace pam {

std::string to_string(SolveMethod m) {
    switch (m) {
        case SolveMethod::expm: return "expm";
        case SolveMethod::eigen: return "eigen";
        case SolveMethod::rk_adaptive: return "rk-adaptive";
    }
    return "?";
}

SolveMethod parse_method(const std::string& s) {
    if (s == "expm") return SolveMethod::expm;
    if (s == "eigen") return SolveMethod::eigen;
    if (s == "rk-adaptive" || s == "rk") return SolveMethod::rk_adaptive;
    throw std::invalid_argument("unknown solve method '" + s + "'");
}

namespace {

// Lanczos action of the matrix exponential: w = e^{tA} v for symmetric A.
// Steps are halved until the a posteriori Krylov residual estimate meets tol.
Eigen::VectorXd expm_action(const Eigen::SparseMatrix<double>& A, Eigen::VectorXd v,
                            double t, double tol = 1e-13) {
    const long n = A.rows();
    if (n == 0 || t == 0.0 || v.norm() == 0.0) return v;
    const int m_cap = static_cast<int>(std::min<long>(n, 60));

    double remaining = t;
    double dt = t;
    int guard = 0;
    while (remaining > 0.0) {
        if (++guard > 100000) throw std::runtime_error("expm_action: step control stalled");
        dt = std::min(dt, remaining);
        const double vnorm = v.norm();
        if (vnorm == 0.0) break;

        Eigen::MatrixXd basis(n, m_cap);
        std::vector<double> a, b;
        basis.col(0) = v / vnorm;
        int m = 0;
        double beta_last = 0.0;
        for (int j = 0; j < m_cap; ++j) {
            Eigen::VectorXd w = A * basis.col(j);
            const double alpha = basis.col(j).dot(w);
            a.push_back(alpha);
            w -= alpha * basis.col(j);
            if (j > 0) w -= b.back() * basis.col(j - 1);
            for (int i = 0; i <= j; ++i) w -= basis.col(i).dot(w) * basis.col(i);
            const double beta = w.norm();
            m = j + 1;
            beta_last = beta;
            if (beta < 1e-14) break;
            if (j + 1 < m_cap) {
                b.push_back(beta);
                basis.col(j + 1) = w / beta;
            }
        }

        Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m, m);
        for (int i = 0; i < m; ++i) T(i, i) = a[static_cast<std::size_t>(i)];
        for (int i = 0; i + 1 < m; ++i) {
            T(i, i + 1) = T(i + 1, i) = b[static_cast<std::size_t>(i)];
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
        Eigen::VectorXd e1 = Eigen::VectorXd::Zero(m);
        e1[0] = 1.0;
        Eigen::VectorXd coeff =
            es.eigenvectors() * (dt * es.eigenvalues().array()).exp().matrix().asDiagonal() *
            (es.eigenvectors().transpose() * e1);

        const double err = vnorm * beta_last * std::abs(coeff[m - 1]);
        if (err > tol && m == m_cap && dt > 1e-12) {
            dt *= 0.5;  // Krylov space exhausted at this step size
            continue;
        }
        v = vnorm * (basis.leftCols(m) * coeff);
        remaining -= dt;
        dt *= 2.0;
    }
    return v;
}

// Dormand-Prince RK45 for u' = A u with adaptive steps.
Eigen::VectorXd rk45_action(const Eigen::SparseMatrix<double>& A, Eigen::VectorXd u,
                            double t_end, double rtol = 1e-11, double atol = 1e-13) {
    if (A.rows() == 0 || t_end == 0.0) return u;
    static const double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    (void)c2; (void)c3; (void)c4; (void)c5;
    double t = 0.0;
    double h = std::min(0.1, t_end);
    Eigen::VectorXd k1 = A * u;
    int guard = 0;
    while (t < t_end) {
        if (++guard > 5000000) throw std::runtime_error("rk45_action: step control stalled");
        h = std::min(h, t_end - t);
        const Eigen::VectorXd k2 = A * (u + h * (1.0 / 5) * k1);
        const Eigen::VectorXd k3 = A * (u + h * ((3.0 / 40) * k1 + (9.0 / 40) * k2));
        const Eigen::VectorXd k4 =
            A * (u + h * ((44.0 / 45) * k1 - (56.0 / 15) * k2 + (32.0 / 9) * k3));
        const Eigen::VectorXd k5 =
            A * (u + h * ((19372.0 / 6561) * k1 - (25360.0 / 2187) * k2 +
                          (64448.0 / 6561) * k3 - (212.0 / 729) * k4));
        const Eigen::VectorXd k6 =
            A * (u + h * ((9017.0 / 3168) * k1 - (355.0 / 33) * k2 + (46732.0 / 5247) * k3 +
                          (49.0 / 176) * k4 - (5103.0 / 18656) * k5));
        const Eigen::VectorXd u5 =
            u + h * ((35.0 / 384) * k1 + (500.0 / 1113) * k3 + (125.0 / 192) * k4 -
                     (2187.0 / 6784) * k5 + (11.0 / 84) * k6);
        const Eigen::VectorXd k7 = A * u5;
        const Eigen::VectorXd u4 =
            u + h * ((5179.0 / 57600) * k1 + (7571.0 / 16695) * k3 + (393.0 / 640) * k4 -
                     (92097.0 / 339200) * k5 + (187.0 / 2100) * k6 + (1.0 / 40) * k7);

        double err = 0.0;
        for (long i = 0; i < u.size(); ++i) {
            const double sc = atol + rtol * std::max(std::abs(u[i]), std::abs(u5[i]));
            err = std::max(err, std::abs(u5[i] - u4[i]) / sc);
        }
        if (err <= 1.0) {
            t += h;
            u = u5;
            k1 = k7;  // FSAL
        }
        const double fac = std::clamp(0.9 * std::pow(err > 0 ? err : 1e-16, -0.2), 0.2, 5.0);
        h *= fac;
        if (h < 1e-14 * std::max(1.0, t_end)) {
            throw std::runtime_error("rk45_action: step size underflow");
        }
    }
    return u;
}

SolutionGrid propagate(const PotentialField& V, double kappa, double t, SolveMethod method,
                       const Eigen::VectorXd& init_active, const std::vector<long>& active) {
    const auto& box = V.box();
    SolutionGrid out{box, t, kappa, method,
                     std::vector<double>(static_cast<std::size_t>(box.site_count()), 0.0)};
    if (active.empty() || t == 0.0) {
        for (std::size_t r = 0; r < active.size(); ++r) {
            out.values[static_cast<std::size_t>(active[r])] = init_active[static_cast<long>(r)];
        }
        return out;
    }

    Eigen::VectorXd u;
    if (method == SolveMethod::eigen) {
        auto spec = dirichlet_spectrum(V, kappa);
        const Eigen::VectorXd proj = spec.eigenvectors.transpose() * init_active;
        u = spec.eigenvectors *
            ((t * spec.eigenvalues.array()).exp() * proj.array()).matrix();
    } else {
        Eigen::SparseMatrix<double> A = anderson_operator(V, kappa);
        u = (method == SolveMethod::expm) ? expm_action(A, init_active, t)
                                          : rk45_action(A, init_active, t);
    }
    for (std::size_t r = 0; r < active.size(); ++r) {
        out.values[static_cast<std::size_t>(active[r])] = std::max(0.0, u[static_cast<long>(r)]);
    }
    return out;
}

}  // namespace

SolutionGrid solve_dirichlet(const PotentialField& V, double kappa, double t,
                             SolveMethod method) {
    if (t < 0.0) throw std::domain_error("solve_dirichlet: t must be >= 0");
    if (!(kappa > 0.0)) throw std::invalid_argument("solve_dirichlet: kappa must be > 0");
    std::vector<long> active;
    anderson_operator(V, kappa, &active);
    Eigen::VectorXd ones = Eigen::VectorXd::Ones(static_cast<long>(active.size()));
    return propagate(V, kappa, t, method, ones, active);
}

SolutionGrid fundamental_solution(const PotentialField& V, double kappa, double t,
                                  const std::vector<int>& source, SolveMethod method) {
    if (t < 0.0) throw std::domain_error("fundamental_solution: t must be >= 0");
    if (!(kappa > 0.0)) throw std::invalid_argument("fundamental_solution: kappa must be > 0");
    std::vector<long> active;
    anderson_operator(V, kappa, &active);
    const long src_site = V.box().index(source);
    Eigen::VectorXd delta = Eigen::VectorXd::Zero(static_cast<long>(active.size()));
    for (std::size_t r = 0; r < active.size(); ++r) {
        if (active[r] == src_site) delta[static_cast<long>(r)] = 1.0;
    }
    return propagate(V, kappa, t, method, delta, active);
}

}  // namespace pam
