#include "pam/percolation.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace pam {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

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

bool site_open(const PotentialField& field, long site, double K) {
    if (field.hard(site)) return false;
    return field.soft_value(site) >= -K;
}
}  // namespace

long ClusterLabeling::selected_cluster() const {
    for (std::size_t id = 0; id < spanning.size(); ++id) {
        if (spanning[id]) return static_cast<long>(id);
    }
    return largest_cluster;
}

ClusterLabeling label_clusters(const PotentialField& field, double K) {
    if (!(K >= 0.0)) throw std::invalid_argument("label_clusters: K must be >= 0 or +inf");
    const auto& box = field.box();
    const long n = box.site_count();
    ClusterLabeling lab;
    lab.field = &field;
    lab.threshold = K;
    lab.cluster_id.assign(static_cast<std::size_t>(n), -1);

    UnionFind uf(n);
    for (long i = 0; i < n; ++i) {
        if (!site_open(field, i, K)) continue;
        for (long nb : box.neighbors(i)) {
            if (nb > i && site_open(field, nb, K)) uf.unite(i, nb);
        }
    }
    std::vector<long> root_to_id(static_cast<std::size_t>(n), -1);
    for (long i = 0; i < n; ++i) {
        if (!site_open(field, i, K)) continue;
        const long root = uf.find(i);
        long& id = root_to_id[static_cast<std::size_t>(root)];
        if (id < 0) {
            id = static_cast<long>(lab.cluster_sizes.size());
            lab.cluster_sizes.push_back(0);
        }
        lab.cluster_id[static_cast<std::size_t>(i)] = id;
        ++lab.cluster_sizes[static_cast<std::size_t>(id)];
    }

    const int d = box.dim();
    const int R = box.radius();
    // spanning: the cluster touches both faces of some axis
    std::vector<std::vector<std::uint8_t>> lo(lab.cluster_sizes.size(),
                                              std::vector<std::uint8_t>(static_cast<std::size_t>(d), 0));
    auto hi = lo;
    for (long i = 0; i < n; ++i) {
        const long id = lab.cluster_id[static_cast<std::size_t>(i)];
        if (id < 0) continue;
        const auto z = box.coord(i);
        for (int a = 0; a < d; ++a) {
            if (z[static_cast<std::size_t>(a)] == -R) lo[static_cast<std::size_t>(id)][static_cast<std::size_t>(a)] = 1;
            if (z[static_cast<std::size_t>(a)] == R) hi[static_cast<std::size_t>(id)][static_cast<std::size_t>(a)] = 1;
        }
    }
    lab.spanning.assign(lab.cluster_sizes.size(), 0);
    for (std::size_t id = 0; id < lab.cluster_sizes.size(); ++id) {
        for (int a = 0; a < d; ++a) {
            if (lo[id][static_cast<std::size_t>(a)] && hi[id][static_cast<std::size_t>(a)]) {
                lab.spanning[id] = 1;
                break;
            }
        }
    }
    for (std::size_t id = 0; id < lab.cluster_sizes.size(); ++id) {
        if (lab.largest_cluster < 0 ||
            lab.cluster_sizes[id] > lab.cluster_sizes[static_cast<std::size_t>(lab.largest_cluster)]) {
            lab.largest_cluster = static_cast<long>(id);
        }
    }
    return lab;
}

std::optional<long> chemical_distance(const ClusterLabeling& labeling,
                                      const std::vector<int>& x, const std::vector<int>& z) {
    const auto& box = labeling.field->box();
    const long xi = box.index(x), zi = box.index(z);
    if (!labeling.open(xi) || !labeling.open(zi)) {
        throw std::domain_error("chemical_distance: endpoint is closed");
    }
    if (labeling.cluster_id[static_cast<std::size_t>(xi)] !=
        labeling.cluster_id[static_cast<std::size_t>(zi)]) {
        return std::nullopt;
    }
    if (xi == zi) return 0;
    std::vector<long> dist(static_cast<std::size_t>(box.site_count()), -1);
    std::deque<long> queue{xi};
    dist[static_cast<std::size_t>(xi)] = 0;
    while (!queue.empty()) {
        const long cur = queue.front();
        queue.pop_front();
        for (long nb : box.neighbors(cur)) {
            if (!labeling.open(nb) || dist[static_cast<std::size_t>(nb)] >= 0) continue;
            dist[static_cast<std::size_t>(nb)] = dist[static_cast<std::size_t>(cur)] + 1;
            if (nb == zi) return dist[static_cast<std::size_t>(nb)];
            queue.push_back(nb);
        }
    }
    return std::nullopt;  // unreachable within the labeling (should not happen)
}

double distance_ratio(const ClusterLabeling& labeling, const std::vector<int>& x,
                      const std::vector<std::vector<int>>& targets) {
    if (targets.empty()) throw std::domain_error("distance_ratio: empty target sample");
    const auto& box = labeling.field->box();
    const long xi = box.index(x);
    if (!labeling.open(xi)) throw std::domain_error("distance_ratio: x is closed");
    double best = 0.0;
    bool any = false;
    for (const auto& z : targets) {
        const long zi = box.index(z);
        if (!labeling.open(zi) ||
            labeling.cluster_id[static_cast<std::size_t>(zi)] !=
                labeling.cluster_id[static_cast<std::size_t>(xi)] ||
            zi == xi) {
            continue;
        }
        long l1 = 0;
        for (int a = 0; a < box.dim(); ++a) {
            l1 += std::abs(x[static_cast<std::size_t>(a)] - z[static_cast<std::size_t>(a)]);
        }
        const auto dstar = chemical_distance(labeling, x, z);
        if (!dstar) continue;
        best = std::max(best, static_cast<double>(*dstar) / static_cast<double>(l1));
        any = true;
    }
    if (!any) throw std::domain_error("distance_ratio: no target shares the cluster of x");
    return best;
}

MicroboxReport microbox_scan(const PotentialField& field, const MicroboxQuery& query,
                             bool require_cluster, double cluster_threshold) {
    if (!query.profile) throw std::invalid_argument("microbox_scan: profile required");
    const auto& box = field.box();
    const int d = box.dim();
    const double bt = query.profile->b(query.t);
    const double alpha = query.profile->alpha(bt);
    if (!(alpha >= 1.0)) throw std::invalid_argument("microbox_scan: alpha(b_t) must be >= 1");
    const int r_micro = static_cast<int>(std::floor(query.psi.radius() * alpha));
    const double slack = query.eps / (2.0 * alpha * alpha);

    // targets psi_t(z) = psi(z/alpha)/alpha^2 on the microbox, support-restricted
    const LatticeBox micro(d, std::max(1, r_micro));
    std::vector<double> target(static_cast<std::size_t>(micro.site_count()));
    std::vector<std::uint8_t> in_support(static_cast<std::size_t>(micro.site_count()), 0);
    for (long i = 0; i < micro.site_count(); ++i) {
        const auto z = micro.coord(i);
        std::vector<double> xz(static_cast<std::size_t>(d));
        for (int a = 0; a < d; ++a) xz[static_cast<std::size_t>(a)] = z[static_cast<std::size_t>(a)] / alpha;
        const double pt = query.psi.interpolate(xz) / (alpha * alpha);
        target[static_cast<std::size_t>(i)] = pt;
        in_support[static_cast<std::size_t>(i)] = pt < 0.0 ? 1 : 0;
    }

    std::optional<ClusterLabeling> lab;
    if (require_cluster) lab = label_clusters(field, cluster_threshold);

    const auto admissible = [&](const std::vector<int>& y) {
        if (require_cluster) {
            const long yi = box.index(y);
            if (lab->cluster_id[static_cast<std::size_t>(yi)] != lab->selected_cluster()) {
                return false;
            }
        }
        std::vector<int> site(static_cast<std::size_t>(d));
        for (long i = 0; i < micro.site_count(); ++i) {
            if (!in_support[static_cast<std::size_t>(i)]) continue;
            const auto z = micro.coord(i);
            for (int a = 0; a < d; ++a) {
                site[static_cast<std::size_t>(a)] = y[static_cast<std::size_t>(a)] + z[static_cast<std::size_t>(a)];
            }
            const double xi = field.value_or_neg_inf(box.index(site));
            if (!(xi >= target[static_cast<std::size_t>(i)] - slack)) return false;
        }
        return true;
    };

    MicroboxReport rep;
    const double bet = query.profile->b(std::exp(1.0) * query.t);
    rep.stride = std::max<long>(1, static_cast<long>(std::floor(
                                       3.0 * query.psi.radius() * query.profile->alpha(bet))));
    const int y_max = box.radius() - micro.radius();
    if (y_max < 0) return rep;

    const auto scan = [&](long stride) {
        long hits = 0;
        std::vector<int> first;
        LatticeBox centers(d, static_cast<int>(y_max / stride));
        for (long i = 0; i < centers.site_count(); ++i) {
            auto y = centers.coord(i);
            for (int a = 0; a < d; ++a) {
                y[static_cast<std::size_t>(a)] = static_cast<int>(y[static_cast<std::size_t>(a)] * stride);
            }
            ++rep.candidates;
            if (admissible(y)) {
                ++hits;
                if (first.empty()) first = y;
            }
        }
        return std::pair<long, std::vector<int>>{hits, first};
    };

    auto [hits, first] = scan(rep.stride);
    if (hits == 0 && rep.stride > 1) std::tie(hits, first) = scan(1);  // dense fallback
    rep.found = hits > 0;
    rep.count = hits;
    rep.center = first;
    return rep;
}

double screening_constant(const PotentialField& field) {
    const auto& box = field.box();
    if (box.dim() != 1) throw std::invalid_argument("screening_constant: d must be 1");
    const int R = box.radius();
    double sup = 0.0;
    for (int dir = -1; dir <= 1; dir += 2) {
        double sum = 0.0;
        for (int k = 1; k <= R; ++k) {
            const long idx = box.index({dir * k});
            if (field.hard(idx)) return kInf;
            sum += std::log(std::max(-field.soft_value(idx), 1.0));
            sup = std::max(sup, sum / k);
        }
    }
    return sup;
}

}  // namespace pam
