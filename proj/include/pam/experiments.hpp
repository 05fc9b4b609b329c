#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "pam/distribution.hpp"

namespace pam {

enum class ExperimentKind { moments, almost_sure, lifshitz, chi_tables, scaling_checks };

std::string to_string(ExperimentKind kind);
ExperimentKind parse_kind(const std::string& text);

// key=value config ('#' comments); unknown keys are an error so typos fail fast.
struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::moments;
    std::string dist = "bernoulli(p=0.6)";
    double kappa = 1.0;
    int d = 1;
    double gamma = 0.0;
    double p = 1.0;  // moment order
    std::vector<double> t_grid = {4, 8, 16, 32};
    double box_factor = 1.5;  // radius = ceil(box_factor * R_shape * alpha(pt))
    int box_cap = 48;
    long n_samples = 24;
    std::uint64_t seed = 1;
    std::string out_dir = "out";
    // lifshitz knobs
    std::vector<int> box_radii = {250, 500, 1000, 2000};
    long n_energy = 40;
    double e_max = 1.0;

    static ExperimentConfig parse(const std::string& text);
    static ExperimentConfig load(const std::string& path);
    std::string serialize() const;
    std::string hash() const;  // FNV-1a of the serialized form, hex
};

struct Curve {
    std::string name;
    std::vector<double> x;
    std::vector<double> y;
};

struct ExperimentReport {
    ExperimentConfig config;
    std::vector<Curve> curves;
    std::map<std::string, double> constants;  // target constants with sources in notes
    std::map<std::string, std::string> notes;
    std::vector<std::string> failures;  // failed assertions (scaling-checks)
    double runtime_seconds = 0.0;
};

ExperimentReport run_moment_experiment(const ExperimentConfig& config);
ExperimentReport run_almost_sure_experiment(const ExperimentConfig& config);
ExperimentReport run_lifshitz_experiment(const ExperimentConfig& config);
ExperimentReport run_scaling_checks(const ExperimentConfig& config);
ExperimentReport run_experiment(const ExperimentConfig& config);

// CSV per curve + summary.json + plot.dat under <directory>/<config-hash>/;
// deterministic bytes for a fixed config. Returns the paths written.
std::vector<std::string> emit_outputs(const ExperimentReport& report,
                                      const std::string& directory);

}  // namespace pam
