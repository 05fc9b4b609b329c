#pragma once

#include <cmath>
#include <cstdint>

namespace pam {

// Counter-based generator: the n-th output is a fixed bijective mix of
// (key, n), so draws are independent of evaluation order and substreams
// keyed by (seed, index) never collide for distinct indices.
//
// State transition: counter <- counter + 1; output = mix64(key + counter*PHI),
// where PHI = 0x9e3779b97f4a7c15 and mix64 is the SplitMix64 finalizer.
class CounterRng {
public:
    static constexpr std::uint64_t kPhi = 0x9e3779b97f4a7c15ULL;

    explicit CounterRng(std::uint64_t key) : key_(key) {}

    static std::uint64_t mix64(std::uint64_t z) {
        z ^= z >> 30;
        z *= 0xbf58476d1ce4e5b9ULL;
        z ^= z >> 27;
        z *= 0x94d049bb133111ebULL;
        z ^= z >> 31;
        return z;
    }

    // Substream for (seed, index), e.g. one stream per lattice site or walk.
    static CounterRng substream(std::uint64_t seed, std::uint64_t index) {
        return CounterRng(mix64(mix64(seed + kPhi) ^ (index * kPhi + 1)));
    }

    std::uint64_t next_u64() {
        counter_ += 1;
        return mix64(key_ + counter_ * kPhi);
    }

    // Uniform on the open interval (0,1).
    double uniform() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    // Exponential with the given rate; rate 0 gives +inf (never fires).
    double exponential(double rate) {
        if (rate <= 0.0) return INFINITY;
        return -std::log(uniform()) / rate;
    }

    // Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n) { return next_u64() % n; }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

}  // namespace pam
