#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace pam {

// Q_R = [-R,R]^d intersected with Z^d, sites enumerated lexicographically
// (first coordinate most significant).
class LatticeBox {
public:
    LatticeBox(int dimension, int radius);

    int dim() const { return d_; }
    int radius() const { return R_; }
    long side() const { return 2L * R_ + 1; }
    long site_count() const { return count_; }

    long index(const std::vector<int>& z) const;
    std::vector<int> coord(long index) const;
    bool contains(const std::vector<int>& z) const;

    // In-box nearest neighbors of the given site (<= 2d of them).
    std::vector<long> neighbors(long index) const;

private:
    int d_;
    int R_;
    long count_;
};

}  // namespace pam
