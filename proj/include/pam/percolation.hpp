#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "pam/field.hpp"
#include "pam/grid_function.hpp"
#include "pam/scaling.hpp"

namespace pam {

// Site percolation of the level set {xi >= -K}; K = +inf selects {xi > -inf}.
struct ClusterLabeling {
    const PotentialField* field = nullptr;
    double threshold = 0.0;
    std::vector<long> cluster_id;     // -1 on closed sites
    std::vector<long> cluster_sizes;  // by id
    long largest_cluster = -1;
    std::vector<std::uint8_t> spanning;  // by id: touches two opposite faces

    bool open(long site) const { return cluster_id[static_cast<std::size_t>(site)] >= 0; }
    // spanning cluster when one exists, else the largest (finite-volume proxy
    // for the infinite cluster)
    long selected_cluster() const;
};

ClusterLabeling label_clusters(const PotentialField& field, double K);

// BFS shortest path within the cluster; nullopt when the endpoints sit in
// different clusters.
std::optional<long> chemical_distance(const ClusterLabeling& labeling,
                                      const std::vector<int>& x, const std::vector<int>& z);

// rho-hat(x): max over targets z (same cluster) of d_*(x,z)/|x-z|_1.
double distance_ratio(const ClusterLabeling& labeling, const std::vector<int>& x,
                      const std::vector<std::vector<int>>& targets);

struct MicroboxQuery {
    GridFunction psi;  // shape on [-R,R]^d, <= 0
    double eps = 0.0;
    double t = 0.0;
    const ScalingProfile* profile = nullptr;
    double L_psi = 0.0;  // L_R(psi), recorded; the proposition's regime is < d
};

struct MicroboxReport {
    bool found = false;
    std::vector<int> center;  // y_t, lowest lexicographic hit
    long count = 0;
    long stride = 0;
    long candidates = 0;
};

// Scan for y with xi(y+z) >= psi_t(z) - eps/(2 alpha(b_t)^2) on the microbox
// Q_{R alpha(b_t)}; coarse stride floor(3 R alpha(b_{e t})) first, dense
// fallback when the coarse pass misses.
MicroboxReport microbox_scan(const PotentialField& field, const MicroboxQuery& query,
                             bool require_cluster, double cluster_threshold = 0.0);

// K-hat: sup over y != 0 of (1/|y|) sum_{x=0}^{|y|} log(-xi(x) v 1); +inf when
// a hard trap sits in the range. d = 1 only.
double screening_constant(const PotentialField& field);

}  // namespace pam
