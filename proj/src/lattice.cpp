#include "pam/lattice.hpp"

#include <cmath>
#include <limits>

namespace pam {

LatticeBox::LatticeBox(int dimension, int radius) : d_(dimension), R_(radius) {
    if (dimension < 1) throw std::invalid_argument("LatticeBox: dimension must be positive");
    if (radius < 0) throw std::invalid_argument("LatticeBox: radius must be nonnegative");
    count_ = 1;
    for (int i = 0; i < d_; ++i) {
        if (count_ > std::numeric_limits<long>::max() / side()) {
            throw std::invalid_argument("LatticeBox: site count overflow");
        }
        count_ *= side();
    }
}

long LatticeBox::index(const std::vector<int>& z) const {
    if (!contains(z)) throw std::out_of_range("LatticeBox::index: site outside box");
    long idx = 0;
    for (int i = 0; i < d_; ++i) idx = idx * side() + (z[i] + R_);
    return idx;
}

std::vector<int> LatticeBox::coord(long index) const {
    if (index < 0 || index >= count_) throw std::out_of_range("LatticeBox::coord: bad index");
    std::vector<int> z(d_);
    for (int i = d_ - 1; i >= 0; --i) {
        z[i] = static_cast<int>(index % side()) - R_;
        index /= side();
    }
    return z;
}

bool LatticeBox::contains(const std::vector<int>& z) const {
    if (static_cast<int>(z.size()) != d_) return false;
    for (int i = 0; i < d_; ++i) {
        if (z[i] < -R_ || z[i] > R_) return false;
    }
    return true;
}

std::vector<long> LatticeBox::neighbors(long index) const {
    std::vector<int> z = coord(index);
    std::vector<long> out;
    out.reserve(2 * d_);
    long stride = 1;
    for (int i = d_ - 1; i >= 0; --i) {
        if (z[i] > -R_) out.push_back(index - stride);
        if (z[i] < R_) out.push_back(index + stride);
        stride *= side();
    }
    return out;
}

}  // namespace pam
