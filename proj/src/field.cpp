#include "pam/field.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "pam/rng.hpp"

namespace pam {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

std::string fmt_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}
}  // namespace

PotentialField::PotentialField(LatticeBox box, std::vector<double> soft_values,
                               std::vector<std::uint8_t> hard_flags, std::uint64_t seed,
                               std::string dist_tag)
    : box_(box),
      soft_(std::move(soft_values)),
      hard_(std::move(hard_flags)),
      seed_(seed),
      dist_tag_(std::move(dist_tag)) {
    if (soft_.size() != static_cast<std::size_t>(box_.site_count()) ||
        hard_.size() != soft_.size()) {
        throw std::invalid_argument("PotentialField: value array sizes do not match box");
    }
    for (std::size_t i = 0; i < soft_.size(); ++i) {
        if (!hard_[i] && (!std::isfinite(soft_[i]) || soft_[i] > 0.0)) {
            throw std::invalid_argument("PotentialField: soft values must be finite and <= 0");
        }
    }
}

PotentialField PotentialField::constant(LatticeBox box, double value) {
    const auto n = static_cast<std::size_t>(box.site_count());
    if (value == -kInf) {
        return PotentialField(box, std::vector<double>(n, 0.0),
                              std::vector<std::uint8_t>(n, 1), 0, "constant(-inf)");
    }
    return PotentialField(box, std::vector<double>(n, value), std::vector<std::uint8_t>(n, 0),
                          0, "constant(" + fmt_g17(value) + ")");
}

double PotentialField::soft_value(long site) const {
    if (hard(site)) throw std::domain_error("PotentialField: value requested at hard trap");
    return soft_[static_cast<std::size_t>(site)];
}

double PotentialField::value_or_neg_inf(long site) const {
    return hard(site) ? -kInf : soft_[static_cast<std::size_t>(site)];
}

void PotentialField::set_hard(long site) { hard_[static_cast<std::size_t>(site)] = 1; }

void PotentialField::set_soft(long site, double value) {
    if (!std::isfinite(value) || value > 0.0) {
        throw std::invalid_argument("PotentialField::set_soft: value must be finite and <= 0");
    }
    hard_[static_cast<std::size_t>(site)] = 0;
    soft_[static_cast<std::size_t>(site)] = value;
}

long PotentialField::active_count() const {
    long n = 0;
    for (auto h : hard_) n += (h == 0);
    return n;
}

PotentialField PotentialField::restrict_window(const std::vector<int>& center,
                                               int radius) const {
    LatticeBox sub(box_.dim(), radius);
    std::vector<double> soft(static_cast<std::size_t>(sub.site_count()), 0.0);
    std::vector<std::uint8_t> hard(soft.size(), 0);
    std::vector<int> z(box_.dim());
    for (long i = 0; i < sub.site_count(); ++i) {
        auto local = sub.coord(i);
        for (int k = 0; k < box_.dim(); ++k) z[k] = local[k] + center[k];
        const long j = box_.index(z);  // throws out_of_range if window leaves the box
        soft[static_cast<std::size_t>(i)] = hard_[static_cast<std::size_t>(j)] ? 0.0 : soft_[j];
        hard[static_cast<std::size_t>(i)] = hard_[static_cast<std::size_t>(j)];
    }
    return PotentialField(sub, std::move(soft), std::move(hard), seed_, dist_tag_);
}

void PotentialField::save(std::ostream& os) const {
    os << "PAMFIELD v1 d=" << box_.dim() << " R=" << box_.radius() << " dist=" << dist_tag_
       << " seed=" << seed_ << "\n";
    for (long i = 0; i < box_.site_count(); ++i) {
        if (hard(i)) {
            os << "-inf\n";
        } else {
            os << fmt_g17(soft_[static_cast<std::size_t>(i)]) << "\n";
        }
    }
}

PotentialField PotentialField::load(std::istream& is) {
    std::string header;
    if (!std::getline(is, header)) throw std::runtime_error("PAMFIELD: empty stream");
    int d = 0, R = -1;
    unsigned long long seed = 0;
    char dist_buf[128] = {0};
    if (std::sscanf(header.c_str(), "PAMFIELD v1 d=%d R=%d dist=%127s seed=%llu", &d, &R,
                    dist_buf, &seed) != 4) {
        throw std::runtime_error("PAMFIELD: bad header '" + header + "'");
    }
    LatticeBox box(d, R);
    std::vector<double> soft(static_cast<std::size_t>(box.site_count()), 0.0);
    std::vector<std::uint8_t> hard(soft.size(), 0);
    std::string line;
    for (std::size_t i = 0; i < soft.size(); ++i) {
        if (!std::getline(is, line)) throw std::runtime_error("PAMFIELD: truncated value list");
        if (line == "-inf") {
            hard[i] = 1;
        } else {
            soft[i] = std::stod(line);
        }
    }
    return PotentialField(box, std::move(soft), std::move(hard), seed, dist_buf);
}

PotentialField sample_field(const PotentialDistribution& dist, const LatticeBox& box,
                            std::uint64_t seed) {
    const auto n = static_cast<std::size_t>(box.site_count());
    std::vector<double> soft(n, 0.0);
    std::vector<std::uint8_t> hard(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        auto rng = CounterRng::substream(seed, i);
        const double v = dist.quantile(rng.uniform());
        if (v == -kInf) {
            hard[i] = 1;
        } else {
            soft[i] = v;
        }
    }
    return PotentialField(box, std::move(soft), std::move(hard), seed, dist.tag());
}

double scale_field(const PotentialField& field, double alpha, const std::vector<double>& x) {
    if (!(alpha >= 1.0)) throw std::invalid_argument("scale_field: alpha must be >= 1");
    std::vector<int> z(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        z[i] = static_cast<int>(std::floor(x[i] * alpha));
    }
    if (!field.box().contains(z)) throw std::out_of_range("scale_field: floor(x*alpha) outside box");
    const long site = field.box().index(z);
    return alpha * alpha * field.value_or_neg_inf(site);
}

}  // namespace pam
