#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "pam/distribution.hpp"
#include "pam/lattice.hpp"

namespace pam {

// Realization of the i.i.d. potential xi on a finite box. Hard traps are a
// tagged per-site flag, never a float; soft values are finite and <= 0.
class PotentialField {
public:
    PotentialField(LatticeBox box, std::vector<double> soft_values,
                   std::vector<std::uint8_t> hard_flags, std::uint64_t seed,
                   std::string dist_tag);

    // Constant field (no hard traps), for engineered test configurations.
    static PotentialField constant(LatticeBox box, double value);

    const LatticeBox& box() const { return box_; }
    std::uint64_t seed() const { return seed_; }
    const std::string& dist_tag() const { return dist_tag_; }

    bool hard(long site) const { return hard_[static_cast<std::size_t>(site)] != 0; }
    // Finite value at a non-hard site.
    double soft_value(long site) const;
    // Value with -inf standing in for hard traps (for formula-style callers).
    double value_or_neg_inf(long site) const;

    void set_hard(long site);
    void set_soft(long site, double value);

    long active_count() const;

    // Restriction of the field to the window center + Q_radius (window must
    // lie inside this field's box).
    PotentialField restrict_window(const std::vector<int>& center, int radius) const;

    void save(std::ostream& os) const;
    static PotentialField load(std::istream& is);

private:
    LatticeBox box_;
    std::vector<double> soft_;
    std::vector<std::uint8_t> hard_;
    std::uint64_t seed_;
    std::string dist_tag_;
};

// i.i.d. draw, deterministic per (seed, distribution, box); per-site
// substreams make the result independent of sampling order.
PotentialField sample_field(const PotentialDistribution& dist, const LatticeBox& box,
                            std::uint64_t seed);

// xi-bar: alpha^2 * xi(floor(x * alpha)), component-wise floor.
double scale_field(const PotentialField& field, double alpha, const std::vector<double>& x);

}  // namespace pam
