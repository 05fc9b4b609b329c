// Finite-box solvers and the random-walk / Feynman-Kac layer.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <vector>

#include "doctest.h"
#include "pam/field.hpp"
#include "pam/solver.hpp"
#include "pam/walk.hpp"

using namespace pam;

TEST_CASE("single-site box solves the scalar ODE u' = (v - 2 d kappa) u") {
    for (double v : {0.0, -0.7, -3.0}) {
        for (double kappa : {0.5, 1.0}) {
            auto field = PotentialField::constant(LatticeBox(1, 0), v);
            for (auto method : {SolveMethod::expm, SolveMethod::eigen, SolveMethod::rk_adaptive}) {
                const auto sol = solve_dirichlet(field, kappa, 2.0, method);
                CHECK(sol.at({0}) == doctest::Approx(std::exp((v - 2.0 * kappa) * 2.0))
                                         .epsilon(1e-10));
            }
        }
    }
}

TEST_CASE("solver methods agree to 1e-8 on random fields") {
    double worst = 0.0;
    for (int k = 0; k < 8; ++k) {
        const int d = 1 + (k % 2);
        const int R = d == 1 ? 12 : 3;
        auto dist = (k % 2 == 0) ? PotentialDistribution::bernoulli(0.6)
                                 : PotentialDistribution::stretched(1.0, 0.5);
        auto field = sample_field(dist, LatticeBox(d, R), 100 + k);
        const double t = 0.5 + 0.25 * k;
        const auto a = solve_dirichlet(field, 1.0, t, SolveMethod::expm);
        const auto b = solve_dirichlet(field, 1.0, t, SolveMethod::eigen);
        const auto c = solve_dirichlet(field, 1.0, t, SolveMethod::rk_adaptive);
        for (std::size_t i = 0; i < a.values.size(); ++i) {
            worst = std::max(worst, std::fabs(a.values[i] - b.values[i]));
            worst = std::max(worst, std::fabs(a.values[i] - c.values[i]));
        }
    }
    CHECK(worst < 1e-8);
}

TEST_CASE("solution is nonnegative with hard traps pinned to zero") {
    auto field = sample_field(PotentialDistribution::bernoulli(0.5), LatticeBox(2, 6), 11);
    const auto sol = solve_dirichlet(field, 1.0, 1.5, SolveMethod::eigen);
    for (long i = 0; i < field.box().site_count(); ++i) {
        const double u = sol.values[static_cast<std::size_t>(i)];
        CHECK(u >= 0.0);
        if (field.hard(i)) CHECK(u == 0.0);
    }
}

TEST_CASE("u_R(t,0) is nondecreasing in the box radius") {
    auto big = sample_field(PotentialDistribution::bernoulli(0.8), LatticeBox(1, 16), 7);
    const std::vector<int> origin = {0};
    double prev = 0.0;
    for (int R : {4, 8, 12, 16}) {
        const auto sub = big.restrict_window(origin, R);
        const double u = solve_dirichlet(sub, 1.0, 2.0, SolveMethod::eigen).at(origin);
        CHECK(u >= prev - 1e-13);
        prev = u;
    }
}

TEST_CASE("fundamental solution is symmetric and sums to the Cauchy solution") {
    auto field = sample_field(PotentialDistribution::stretched(1.0, 0.5), LatticeBox(1, 4), 21);
    const double t = 1.3;
    const auto u = solve_dirichlet(field, 1.0, t, SolveMethod::eigen);
    const auto& box = field.box();
    std::vector<SolutionGrid> rows;
    for (long j = 0; j < box.site_count(); ++j) {
        rows.push_back(fundamental_solution(field, 1.0, t, box.coord(j)));
    }
    for (long i = 0; i < box.site_count(); ++i) {
        double row_sum = 0.0;
        for (long j = 0; j < box.site_count(); ++j) {
            const double pij = rows[static_cast<std::size_t>(j)].values[static_cast<std::size_t>(i)];
            const double pji = rows[static_cast<std::size_t>(i)].values[static_cast<std::size_t>(j)];
            CHECK(pij == doctest::Approx(pji).epsilon(1e-10));
            row_sum += pij;
        }
        CHECK(row_sum == doctest::Approx(u.values[static_cast<std::size_t>(i)]).epsilon(1e-8));
    }
}

TEST_CASE("walk: holding times are exponential, local times sum to t") {
    const double kappa = 0.75, t = 3.0;
    const int d = 2;
    double jumps = 0.0;
    const int n = 10000;
    for (int w = 0; w < n; ++w) {
        const auto rec = simulate_walk(kappa, d, {0, 0}, t, std::nullopt, 1000 + w);
        jumps += static_cast<double>(rec.jump_times.size());
        CHECK(rec.sites.size() == rec.jump_times.size() + 1);
        double sum = 0.0;
        for (const auto& [site, ell] : rec.local_times) sum += ell;
        CHECK(sum == doctest::Approx(t).epsilon(1e-12));
        for (std::size_t j = 0; j + 1 < rec.sites.size(); ++j) {
            int l1 = 0;
            for (int k = 0; k < d; ++k) l1 += std::abs(rec.sites[j][k] - rec.sites[j + 1][k]);
            CHECK(l1 == 1);
        }
        for (std::size_t j = 1; j < rec.jump_times.size(); ++j) {
            CHECK(rec.jump_times[j] > rec.jump_times[j - 1]);
        }
    }
    const double rate = 2.0 * d * kappa * t;  // Poisson mean of the jump count
    CHECK(std::fabs(jumps / n - rate) < 4.0 * std::sqrt(rate / n));
}

TEST_CASE("walk: kappa = 0 never jumps, guard box flags the exit") {
    const auto still = simulate_walk(0.0, 1, {2}, 5.0, std::nullopt, 3);
    CHECK(still.jump_times.empty());
    CHECK(still.local_times.at({2}) == 5.0);

    int exits = 0;
    for (int w = 0; w < 200; ++w) {
        const auto rec = simulate_walk(2.0, 1, {0}, 10.0, 2, 50 + w);
        if (rec.exited) {
            ++exits;
            CHECK(rec.exit_time <= 10.0);
            bool left = false;
            for (const auto& s : rec.sites) left |= std::abs(s[0]) > 2;
            CHECK(left);
        }
    }
    CHECK(exits > 150);  // rate-4 walk almost surely leaves Q_2 by t = 10
}

TEST_CASE("scaled local times integrate to one") {
    const auto rec = simulate_walk(1.0, 1, {0}, 4.0, std::nullopt, 99);
    const double alpha = 2.5;
    double riemann = 0.0;
    for (const auto& [site, ell] : rec.local_times) {
        const double x = (site[0] + 0.5) / alpha;  // cell representative
        riemann += scaled_local_times(rec, alpha, {x}) / alpha;
        CHECK(scaled_local_times(rec, alpha, {x}) ==
              doctest::Approx(alpha * ell / rec.horizon).epsilon(1e-14));
    }
    CHECK(riemann == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("Feynman-Kac: zero potential gives the constant solution exactly") {
    auto zero = PotentialField::constant(LatticeBox(1, 6), 0.0);
    const auto est = feynman_kac_estimate(zero, 1.0, 2.0, {0}, 500, 8);
    CHECK(est.mean == 1.0);
    CHECK(est.std_error == 0.0);
    CHECK(est.n_walks == 500);
}

TEST_CASE("Feynman-Kac matches the exact solver within 4 standard errors") {
    const LatticeBox box(1, 5);
    auto field = sample_field(PotentialDistribution::bernoulli(0.7), box, 301);
    for (std::uint64_t s = 302; field.hard(box.index({0})); ++s) {
        field = sample_field(PotentialDistribution::bernoulli(0.7), box, s);
    }
    const double t = 1.5;
    const auto exact = solve_dirichlet(field, 1.0, t, SolveMethod::eigen);
    const auto fk = feynman_kac_estimate(field, 1.0, t, {0}, 100000, 42, 5);
    CHECK(std::fabs(fk.mean - exact.at({0})) < 4.0 * fk.std_error);

    const auto fk2 = feynman_kac_estimate(field, 1.0, t, {0}, 100000, 42, 5);
    CHECK(fk.mean == fk2.mean);  // same seed, same estimate
    CHECK(fk.std_error == fk2.std_error);
}

TEST_CASE("exit probability bound: empirical never exceeds the bound") {
    for (int r : {5, 10, 15}) {
        const auto rep = check_exit_bound(1.0, 1, r, 1.0, 20000, 6);
        CHECK(rep.empirical <= rep.bound);
    }
    // bound is decreasing in r once r/(d kappa t) > e
    const double b5 = check_exit_bound(1.0, 1, 5, 1.0, 100, 6).bound;
    const double b10 = check_exit_bound(1.0, 1, 10, 1.0, 100, 6).bound;
    CHECK(b10 < b5);
    // small r / large t regime: the bound exceeds 1 and holds trivially
    const auto loose = check_exit_bound(1.0, 1, 2, 5.0, 2000, 6);
    CHECK(loose.bound >= 1.0);
    CHECK(loose.empirical <= loose.bound);
}
