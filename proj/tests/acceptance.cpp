// End-to-end acceptance checks for the laboratory. Each check prints one
// [PASS]/[FAIL] line; the exit status is nonzero when any check fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>
#include <vector>

#include "pam/experiments.hpp"
#include "pam/rng.hpp"
#include "pam/ids.hpp"
#include "pam/math_util.hpp"
#include "pam/partition.hpp"
#include "pam/scaling.hpp"
#include "pam/solver.hpp"
#include "pam/variational.hpp"
#include "pam/walk.hpp"

using namespace pam;

namespace {

int failures = 0;

double now() {
    using namespace std::chrono;
    return duration<double>(steady_clock::now().time_since_epoch()).count();
}

void report(int id, const char* title, bool ok, const std::string& detail) {
    std::printf("[%s] %2d %-38s %s\n", ok ? "PASS" : "FAIL", id, title, detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
    char buf[160];
    std::snprintf(buf, sizeof(buf), f, a, b, c);
    return buf;
}

// 1. chi against the scalar interval reduction at gamma = 0, d = 1.
void check_chi_closed_form() {
    const double t0 = now();
    const double kappa = 1.0, pi = 3.14159265358979323846;
    // gamma = 0, d = 1: optimal shapes are intervals, so chi reduces to
    // min_L kappa pi^2 / L^2 + L (unit support cost per length).
    const double Ls = golden_section_min(
        [&](double L) { return kappa * pi * pi / (L * L) + L; }, 0.2, 30.0);
    const double oracle = kappa * pi * pi / (Ls * Ls) + Ls;
    const auto res = solve_chi(0.0, -1.0, kappa, 1, 16, 1);
    const double rel = std::fabs(res.extrapolated - oracle) / oracle;
    const double dt = now() - t0;
    report(1, "chi vs interval reduction (d=1)", rel < 0.02 && dt < 60.0,
           fmt("rel %.2e  (%.4f vs %.4f)", rel, res.extrapolated, oracle) +
               fmt("  %.1fs", dt));
}

// 2. chi~ from the direct solver vs the chi -> chi~ relation.
void check_chi_tilde_relation() {
    const double t0 = now();
    struct Case { double gamma; int d; int m; };
    const Case cases[] = {{0.0, 1, 16}, {0.5, 1, 32}, {0.0, 2, 16}};
    double worst = 0.0;
    std::string detail;
    for (const auto& cs : cases) {
        const double nu = (1.0 - cs.gamma) / (cs.d + 2.0 - cs.d * cs.gamma);
        const double beta = 2.0 * nu / (1.0 - 2.0 * nu);
        const auto chi = solve_chi(cs.gamma, -1.0, 1.0, cs.d, cs.m, 1);
        const auto chit = solve_chi_tilde(cs.gamma, -1.0, 1.0, cs.d, cs.m, 1);
        const double predicted = chi_tilde_from_chi(chi.extrapolated, nu, beta, cs.d);
        const double rel = std::fabs(chit.extrapolated - predicted) / predicted;
        worst = std::max(worst, rel);
        detail += fmt("g=%.2g,d=%.0f: %.1e  ", cs.gamma, static_cast<double>(cs.d), rel);
    }
    const double dt = now() - t0;
    report(2, "chi~ consistency with chi", worst < 0.05 && dt < 600.0,
           detail + fmt("%.1fs", dt));
}

// 3. Exact b-scaling of L_R and lambda_R under psi -> psi(./b)/b^2.
void check_scaling_identities() {
    const double gamma = 0.5, H1 = -1.0, kappa = 1.0, nu = 1.0 / 5.0;
    const auto shape = [](const std::vector<double>& x) {
        return -(1.2 - 0.8 * x[0] * x[0]);
    };
    double worstL = 0.0;
    for (double b : {0.5, 2.0, 3.0}) {
        const auto psi = GridFunction::from_fn(1, 128, 1.0, shape);
        const auto psib = scaling_transform(psi, b);
        const double L = legendre_L_R(psi, gamma, H1);
        const double Lb = legendre_L_R(psib, gamma, H1);
        worstL = std::max(worstL,
                          std::fabs(Lb - std::pow(b, 1.0 / nu - 2.0) * L) / std::fabs(Lb));
    }
    // lambda identity at fixed resolution: Richardson over m in {64,128,256}
    double worstE = 0.0;
    for (double b : {0.5, 2.0, 3.0}) {
        std::vector<double> lam, lamb;
        for (int m : {64, 128, 256}) {
            const auto psi = GridFunction::from_fn(1, m, 1.0, shape);
            lam.push_back(continuum_eigenvalue(psi, kappa, false));
            lamb.push_back(continuum_eigenvalue(scaling_transform(psi, b).resample(m),
                                                kappa, false));
        }
        const auto rich = [](const std::vector<double>& v) {
            const double a1 = (4.0 * v[1] - v[0]) / 3.0;
            const double a2 = (4.0 * v[2] - v[1]) / 3.0;
            return (16.0 * a2 - a1) / 15.0;
        };
        const double want = rich(lam) / (b * b);
        worstE = std::max(worstE, std::fabs(rich(lamb) - want) / std::fabs(want));
    }
    report(3, "L and lambda scaling identities", worstL < 1e-9 && worstE < 0.01,
           fmt("L rel %.1e, lambda rel %.2e", worstL, worstE));
}

// 4. Microbox eigenvalue comparison on random Bernoulli fields.
void check_eigen_comparison_sweep() {
    const double t0 = now();
    auto dist = PotentialDistribution::bernoulli(0.6);
    long violations = 0, total = 0;
    int combo = 0;
    for (int d : {1, 2}) {
        for (auto [r, R] : {std::pair<int, int>{12, 4}, {24, 8}}) {
            for (int s = 0; s < 50; ++s) {
                const auto seed = CounterRng::substream(
                                      9, (static_cast<std::uint64_t>(combo) << 32) |
                                             static_cast<std::uint64_t>(s))
                                      .next_u64();
                const auto V = sample_field(dist, LatticeBox(d, r + 4 * R), seed);
                const auto rep = check_eigenvalue_comparison(V, 1.0, r, R);
                ++total;
                if (!rep.holds) ++violations;
            }
            ++combo;
        }
    }
    const double dt = now() - t0;
    report(4, "eigenvalue comparison, 200 fields",
           violations == 0 && total == 200 && dt < 300.0,
           fmt("%.0f violations / %.0f fields, %.1fs", static_cast<double>(violations),
               static_cast<double>(total), dt));
}

// 5. Partition of unity and the sup-norm bound on Phi_R.
void check_partition_of_unity() {
    double worst = 0.0;
    bool bound_ok = true;
    for (int d : {1, 2, 3}) {
        for (int R : {2, 4, 8, 16, 32, 64}) {
            PartitionPotential part(R, 1.0, d);
            bound_ok = bound_ok && part.sup_norm() * R * R <= part.constant() + 1e-12;
            const int P = part.period();
            std::vector<int> z(static_cast<std::size_t>(d), 0);
            long cells = 1;
            for (int a = 0; a < d; ++a) cells *= 2 * P;
            for (long i = 0; i < cells; ++i) {
                long rem = i;
                for (int a = 0; a < d; ++a) {
                    z[static_cast<std::size_t>(a)] = static_cast<int>(rem % (2 * P)) - P;
                    rem /= 2 * P;
                }
                worst = std::max(worst, std::fabs(part.partition_sum(z) - 1.0));
            }
        }
    }
    report(5, "partition of unity + sup bound", worst < 1e-12 && bound_ok,
           fmt("max |sum-1| %.1e, bound ok %.0f", worst, bound_ok ? 1.0 : 0.0));
}

// 6. Three solver routes agree on random small instances.
void check_solver_triangulation() {
    double worst = 0.0;
    for (int s = 0; s < 50; ++s) {
        auto rng = CounterRng::substream(31, static_cast<std::uint64_t>(s));
        const int d = 1 + static_cast<int>(rng.below(2));
        const int R = d == 1 ? 4 + static_cast<int>(rng.below(100))
                             : 2 + static_cast<int>(rng.below(14));
        auto dist = (s % 3 == 0) ? PotentialDistribution::bernoulli(0.75)
                    : (s % 3 == 1) ? PotentialDistribution::stretched(1.0, 0.5)
                                   : PotentialDistribution::density_tail(1.0);
        const auto V = sample_field(dist, LatticeBox(d, R), rng.next_u64());
        const double kappa = 0.25 + rng.uniform();
        const double t = 0.5 + 2.0 * rng.uniform();
        const auto a = solve_dirichlet(V, kappa, t, SolveMethod::expm);
        const auto b = solve_dirichlet(V, kappa, t, SolveMethod::eigen);
        const auto c = solve_dirichlet(V, kappa, t, SolveMethod::rk_adaptive);
        for (std::size_t i = 0; i < a.values.size(); ++i) {
            worst = std::max(worst, std::fabs(a.values[i] - b.values[i]));
            worst = std::max(worst, std::fabs(a.values[i] - c.values[i]));
        }
    }
    report(6, "solver triangulation, 50 instances", worst < 1e-8,
           fmt("max abs discrepancy %.2e", worst));
}

// 7. Feynman-Kac Monte Carlo against the exact finite-box solve.
void check_feynman_kac() {
    auto dist = PotentialDistribution::stretched(1.0, 0.5);
    const auto V = sample_field(dist, LatticeBox(1, 5), 123);
    double worst_z = 0.0;
    bool deterministic = true;
    int cases = 0;
    for (double t : {1.0, 3.0}) {
        const auto exact = solve_dirichlet(V, 1.0, t, SolveMethod::eigen);
        for (int x = -4; x <= 5; ++x) {
            const std::uint64_t seed = 1000 + static_cast<std::uint64_t>(cases);
            const auto est = feynman_kac_estimate(V, 1.0, t, {x}, 100000, seed, 5);
            const auto again = feynman_kac_estimate(V, 1.0, t, {x}, 100000, seed, 5);
            deterministic = deterministic && est.mean == again.mean &&
                            est.std_error == again.std_error;
            const double se = std::max(est.std_error, 1e-12);
            worst_z = std::max(worst_z, std::fabs(est.mean - exact.at({x})) / se);
            ++cases;
        }
    }
    report(7, "Feynman-Kac vs exact, 20 cases", worst_z <= 4.0 && deterministic,
           fmt("worst |z| %.2f, deterministic %.0f", worst_z, deterministic ? 1.0 : 0.0));
}

// 8. Lifshitz-tail exponent: wide-band fit on data, exact on a plant.
void check_lifshitz_exponent() {
    const double t0 = now();
    auto dist = PotentialDistribution::bernoulli(0.7);
    std::vector<double> energies;
    for (int i = 0; i < 40; ++i) {
        energies.push_back(std::pow(10.0, -4.0 + 4.0 * i / 39.0));
    }
    const auto hist = ids_estimate(dist, 1.0, 1, {250, 500, 1000, 2000}, energies, 200, 7);
    const auto profile = ScalingProfile::make(0.0, std::log(0.7), 1,
                                              calibrate_alpha(dist, 1, std::log(0.7)));
    const auto fit = lifshitz_fit(hist, profile, default_fit_window(hist));
    const bool band = fit.exponent > 0.3 && fit.exponent < 0.7;

    // the fitter recovers a planted n(E) = exp(-E^{-1/2}) exactly
    IDSHistogram plant;
    plant.box_radii = {1000};
    plant.sample_counts = {1};
    plant.sites_sampled = {2001};
    plant.estimates.emplace_back();
    for (int i = 0; i < 60; ++i) {
        const double E = std::pow(10.0, -4.0 + 3.0 * i / 59.0);
        plant.energies.push_back(E);
        plant.estimates[0].push_back(std::exp(-std::pow(E, -0.5)));
    }
    const auto pf = lifshitz_fit(plant, profile, {1e-4, 1e-2});
    const bool planted_ok = std::fabs(pf.exponent - 0.5) < 1e-3;
    const double dt = now() - t0;
    report(8, "Lifshitz exponent fit", band && planted_ok && dt < 1200.0,
           fmt("fit %.3f (target 0.5), plant err %.1e, %.0fs", fit.exponent,
               std::fabs(pf.exponent - 0.5), dt));
}

// 9. Moment and almost-sure observables: signs, trends and orderings.
void check_asymptotic_observables() {
    ExperimentConfig cfg;
    cfg.kind = ExperimentKind::moments;
    cfg.dist = "bernoulli(p=0.6,trunc=-2)";
    cfg.d = 1;
    cfg.p = 1.0;
    cfg.t_grid = {16, 32, 64, 128};
    cfg.box_factor = 1000.0;
    cfg.box_cap = 10;
    cfg.n_samples = 4000;
    cfg.seed = 3;
    const auto mom = run_moment_experiment(cfg);

    auto as_cfg = cfg;
    as_cfg.kind = ExperimentKind::almost_sure;
    as_cfg.n_samples = 400;
    const auto as = run_almost_sure_experiment(as_cfg);

    const auto& obs = mom.curves[0].y;  // rescaled_moment
    bool negative = true, ordered = true, jensen = true;
    int decreasing = 0;
    for (double y : obs) negative = negative && y < 0.0;
    for (std::size_t i = 1; i < obs.size(); ++i) {
        if (obs[i] < obs[i - 1]) ++decreasing;
    }
    const auto& as_obs = as.curves[0].y;  // rescaled_almost_sure
    for (std::size_t i = 0; i < obs.size(); ++i) ordered = ordered && as_obs[i] < obs[i];
    const auto& m1 = mom.curves[1].y;  // mean_u
    const auto& m2 = mom.curves[2].y;  // sqrt_mean_u_sq
    for (std::size_t i = 0; i < m1.size(); ++i) jensen = jensen && m2[i] >= m1[i];
    report(9, "moment / almost-sure orderings",
           negative && decreasing >= 3 && ordered && jensen,
           fmt("neg %.0f, decr steps %.0f, a.s.<moment %.0f", negative ? 1.0 : 0.0,
               static_cast<double>(decreasing), ordered ? 1.0 : 0.0) +
               fmt(", Jensen %.0f", jensen ? 1.0 : 0.0));
}

// 10. Inequality suite on fixed regression instances.
void check_inequality_suite() {
    bool ok = true;
    std::string detail;

    // finite box: u_R(t,0) <= #Q_R exp(t lambda_1)
    for (std::uint64_t s : {11ULL, 12ULL, 13ULL}) {
        const auto V = sample_field(PotentialDistribution::stretched(1.0, 0.5),
                                    LatticeBox(1, 8), s);
        const double t = 2.0;
        const double u0 = solve_dirichlet(V, 1.0, t, SolveMethod::eigen).at({0});
        const double lam = principal_eigenvalue(V, 1.0);
        ok = ok && u0 <= static_cast<double>(V.box().site_count()) * std::exp(t * lam) *
                             (1.0 + 1e-12);
    }
    detail += "box ";

    // compact support of the total mass
    for (std::uint64_t s : {21ULL, 22ULL}) {
        const auto V = sample_field(PotentialDistribution::bernoulli(0.7),
                                    LatticeBox(1, 50), s);
        ok = ok && check_compact_bound(V, 1.0, 3.0, 2, 30).holds;
    }
    detail += "compact ";

    // exit-time bound, including a trivial-regime radius
    for (int r : {6, 10, 14}) {
        const auto rep = check_exit_bound(1.0, 1, r, 1.0, 20000, 5);
        ok = ok && rep.empirical <= rep.bound + 1e-12;
    }
    detail += "exit ";

    // monotonicity of u_R in the box radius
    const auto big = sample_field(PotentialDistribution::density_tail(0.0),
                                  LatticeBox(1, 12), 31);
    double prev = -1.0;
    for (int R : {4, 8, 12}) {
        const double u = solve_dirichlet(big.restrict_window({0}, R), 1.0, 2.0,
                                         SolveMethod::eigen)
                             .at({0});
        ok = ok && u >= prev - 1e-13;
        prev = u;
    }
    detail += "monotone";

    report(10, "inequality suite", ok, detail);
}

}  // namespace

int main() {
    check_chi_closed_form();
    check_chi_tilde_relation();
    check_scaling_identities();
    check_eigen_comparison_sweep();
    check_partition_of_unity();
    check_solver_triangulation();
    check_feynman_kac();
    check_lifshitz_exponent();
    check_asymptotic_observables();
    check_inequality_suite();
    if (failures != 0) {
        std::printf("%d acceptance check(s) failed\n", failures);
        return 1;
    }
    std::printf("all acceptance checks passed\n");
    return 0;
}
