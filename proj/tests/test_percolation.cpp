// Level-set percolation, chemical distances, the microbox scan, and the
// screening constant.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <deque>
#include <limits>
#include <vector>

#include "doctest.h"
#include "pam/field.hpp"
#include "pam/percolation.hpp"
#include "pam/rng.hpp"
#include "pam/scaling.hpp"

using namespace pam;

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

// Independent flood-fill used as a second-implementation oracle.
long bfs_largest_cluster(const PotentialField& field, double K) {
    const auto& box = field.box();
    std::vector<std::uint8_t> seen(static_cast<std::size_t>(box.site_count()), 0);
    const auto open = [&](long i) {
        return !field.hard(i) && field.soft_value(i) >= -K;
    };
    long best = 0;
    for (long s = 0; s < box.site_count(); ++s) {
        if (seen[static_cast<std::size_t>(s)] || !open(s)) continue;
        long size = 0;
        std::deque<long> queue{s};
        seen[static_cast<std::size_t>(s)] = 1;
        while (!queue.empty()) {
            const long cur = queue.front();
            queue.pop_front();
            ++size;
            for (long nb : box.neighbors(cur)) {
                if (!seen[static_cast<std::size_t>(nb)] && open(nb)) {
                    seen[static_cast<std::size_t>(nb)] = 1;
                    queue.push_back(nb);
                }
            }
        }
        best = std::max(best, size);
    }
    return best;
}

ScalingProfile bernoulli_profile() {
    auto bern = PotentialDistribution::bernoulli(0.5);
    return ScalingProfile::make(0.0, std::log(0.5), 1,
                                calibrate_alpha(bern, 1, std::log(0.5)));
}
}  // namespace

TEST_CASE("fully open box is one spanning cluster") {
    auto field = PotentialField::constant(LatticeBox(2, 5), 0.0);
    const auto lab = label_clusters(field, kInf);
    CHECK(lab.cluster_sizes.size() == 1);
    CHECK(lab.cluster_sizes[0] == field.box().site_count());
    CHECK(lab.spanning[0] == 1);
    CHECK(lab.selected_cluster() == 0);
    for (long i = 0; i < field.box().site_count(); ++i) CHECK(lab.open(i));
}

TEST_CASE("checkerboard clusters are singletons") {
    LatticeBox box(2, 4);
    std::vector<double> soft(static_cast<std::size_t>(box.site_count()), 0.0);
    std::vector<std::uint8_t> hard(soft.size(), 0);
    long open_count = 0;
    for (long i = 0; i < box.site_count(); ++i) {
        const auto z = box.coord(i);
        if ((z[0] + z[1]) % 2 != 0) {
            hard[static_cast<std::size_t>(i)] = 1;
        } else {
            ++open_count;
        }
    }
    PotentialField field(box, soft, hard, 0, "engineered");
    const auto lab = label_clusters(field, kInf);
    CHECK(static_cast<long>(lab.cluster_sizes.size()) == open_count);
    for (long s : lab.cluster_sizes) CHECK(s == 1);
}

TEST_CASE("labeling matches the threshold and an independent BFS") {
    auto dist = PotentialDistribution::stretched(1.0, 0.5);
    auto field = sample_field(dist, LatticeBox(2, 30), 17);
    const double K = 1.2;
    const auto lab = label_clusters(field, K);
    for (long i = 0; i < field.box().site_count(); ++i) {
        CHECK(lab.open(i) == (field.soft_value(i) >= -K));
        if (!lab.open(i)) continue;
        for (long nb : field.box().neighbors(i)) {
            if (lab.open(nb)) {
                CHECK(lab.cluster_id[static_cast<std::size_t>(i)] ==
                      lab.cluster_id[static_cast<std::size_t>(nb)]);
            }
        }
    }
    // second implementation across seeds
    auto bern = PotentialDistribution::bernoulli(0.7);
    for (int s = 0; s < 20; ++s) {
        auto f = sample_field(bern, LatticeBox(2, 40), 500 + s);
        const auto l = label_clusters(f, kInf);
        CHECK(l.cluster_sizes[static_cast<std::size_t>(l.largest_cluster)] ==
              bfs_largest_cluster(f, kInf));
    }
}

TEST_CASE("chemical distance: corridor, identity, unreachable, closed endpoint") {
    LatticeBox box(2, 6);
    std::vector<double> soft(static_cast<std::size_t>(box.site_count()), 0.0);
    std::vector<std::uint8_t> hard(soft.size(), 1);
    for (int x = -6; x <= 6; ++x) hard[static_cast<std::size_t>(box.index({x, 0}))] = 0;
    hard[static_cast<std::size_t>(box.index({0, 3}))] = 0;  // isolated site
    PotentialField field(box, soft, hard, 0, "engineered");
    const auto lab = label_clusters(field, kInf);

    CHECK(chemical_distance(lab, {-6, 0}, {6, 0}) == 12);
    CHECK(chemical_distance(lab, {2, 0}, {2, 0}) == 0);
    CHECK(!chemical_distance(lab, {0, 0}, {0, 3}).has_value());
    CHECK_THROWS_AS((void)chemical_distance(lab, {0, 0}, {0, 1}), std::domain_error);
}

TEST_CASE("chemical distance is a metric dominating the l1 distance") {
    auto field = sample_field(PotentialDistribution::bernoulli(0.8), LatticeBox(2, 15), 9);
    const auto lab = label_clusters(field, kInf);
    const long big = lab.selected_cluster();
    std::vector<std::vector<int>> members;
    for (long i = 0; i < field.box().site_count() && members.size() < 9; ++i) {
        if (lab.cluster_id[static_cast<std::size_t>(i)] == big) {
            members.push_back(field.box().coord(i));
        }
    }
    REQUIRE(members.size() == 9);
    for (std::size_t a = 0; a < 3; ++a) {
        for (std::size_t b = 3; b < 6; ++b) {
            const auto dab = chemical_distance(lab, members[a], members[b]);
            REQUIRE(dab.has_value());
            CHECK(*chemical_distance(lab, members[b], members[a]) == *dab);
            long l1 = 0;
            for (int k = 0; k < 2; ++k) l1 += std::abs(members[a][k] - members[b][k]);
            CHECK(*dab >= l1);
            for (std::size_t c = 6; c < 9; ++c) {
                const auto dac = chemical_distance(lab, members[a], members[c]);
                const auto dcb = chemical_distance(lab, members[c], members[b]);
                CHECK(*dab <= *dac + *dcb);
            }
        }
    }
}

TEST_CASE("distance ratio: exactly one on the full box, always at least one") {
    auto full = PotentialField::constant(LatticeBox(2, 6), 0.0);
    const auto lab = label_clusters(full, kInf);
    const std::vector<std::vector<int>> targets = {{3, 2}, {-5, 1}, {0, -6}, {6, 6}};
    CHECK(distance_ratio(lab, {0, 0}, targets) == doctest::Approx(1.0));

    auto field = sample_field(PotentialDistribution::bernoulli(0.75), LatticeBox(2, 15), 29);
    const auto lab2 = label_clusters(field, kInf);
    const long big = lab2.selected_cluster();
    std::vector<int> x;
    std::vector<std::vector<int>> members;
    for (long i = 0; i < field.box().site_count(); ++i) {
        if (lab2.cluster_id[static_cast<std::size_t>(i)] != big) continue;
        if (x.empty()) {
            x = field.box().coord(i);
        } else if (members.size() < 20) {
            members.push_back(field.box().coord(i));
        }
    }
    CHECK(distance_ratio(lab2, x, members) >= 1.0);
    CHECK_THROWS_AS((void)distance_ratio(lab, {0, 0}, {}), std::domain_error);
}

TEST_CASE("microbox scan: zero field hits every candidate") {
    auto prof = bernoulli_profile();
    auto field = PotentialField::constant(LatticeBox(1, 60), 0.0);
    MicroboxQuery q;
    q.psi = GridFunction::from_fn(1, 8, 1.0, [](const std::vector<double>& x) {
        return -(1.0 - 0.5 * x[0] * x[0]);
    });
    q.eps = 0.4;
    q.t = std::exp(4.0);
    q.profile = &prof;
    const auto rep = microbox_scan(field, q, false);
    CHECK(rep.found);
    CHECK(rep.count == rep.candidates);
    CHECK(rep.stride >= 1);
}

TEST_CASE("microbox scan finds exactly a planted configuration") {
    auto prof = bernoulli_profile();
    const double t = std::exp(4.0);
    const double alpha = prof.alpha(prof.b(t));  // = 4 for the Bernoulli profile
    LatticeBox box(1, 40);
    std::vector<double> soft(static_cast<std::size_t>(box.site_count()), 0.0);
    std::vector<std::uint8_t> hard(soft.size(), 1);
    const int center = 13;
    const int r_micro = static_cast<int>(std::floor(alpha));
    for (int z = -r_micro; z <= r_micro; ++z) {
        hard[static_cast<std::size_t>(box.index({center + z}))] = 0;
    }
    PotentialField field(box, soft, hard, 0, "engineered");
    MicroboxQuery q;
    q.psi = GridFunction::from_fn(1, 8, 1.0, [](const std::vector<double>& x) {
        return -(1.0 - 0.5 * x[0] * x[0]);
    });
    q.eps = 0.1;
    q.t = t;
    q.profile = &prof;
    const auto rep = microbox_scan(field, q, false);
    CHECK(rep.found);
    CHECK(rep.count == 1);
    REQUIRE(!rep.center.empty());
    CHECK(rep.center[0] == center);
}

TEST_CASE("microbox scan hit set grows with epsilon") {
    auto prof = bernoulli_profile();
    auto field = sample_field(PotentialDistribution::stretched(1.0, 0.5), LatticeBox(1, 80), 71);
    MicroboxQuery q;
    q.psi = GridFunction::from_fn(1, 8, 1.0, [](const std::vector<double>& x) {
        return -(0.5 - 0.3 * std::fabs(x[0]));
    });
    q.t = std::exp(4.0);
    q.profile = &prof;
    long prev = -1;
    for (double eps : {0.05, 0.5, 5.0, 50.0}) {
        q.eps = eps;
        const auto rep = microbox_scan(field, q, false);
        CHECK(rep.count >= prev);
        prev = rep.count;
    }
}

TEST_CASE("screening constant closed forms") {
    auto mild = PotentialField::constant(LatticeBox(1, 10), -0.5);
    CHECK(screening_constant(mild) == 0.0);  // log(0.5 v 1) = 0 everywhere

    auto e_field = PotentialField::constant(LatticeBox(1, 10), -std::exp(1.0));
    CHECK(screening_constant(e_field) == doctest::Approx(1.0).epsilon(1e-12));

    auto trapped = PotentialField::constant(LatticeBox(1, 10), -0.5);
    trapped.set_hard(trapped.box().index({4}));
    CHECK(screening_constant(trapped) == kInf);
}
