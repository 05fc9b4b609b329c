// pamlab: command-line driver for the PAM laboratory.
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "pam/experiments.hpp"
#include "pam/field.hpp"
#include "pam/percolation.hpp"
#include "pam/solver.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitAssertion = 2;
constexpr int kExitNumeric = 3;
constexpr int kExitIo = 4;

std::string fmt_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

pam::ExperimentConfig load_config(const std::string& path, pam::ExperimentKind kind,
                                  std::optional<std::uint64_t> seed,
                                  std::optional<std::string> out) {
    pam::ExperimentConfig cfg = path.empty() ? pam::ExperimentConfig{}
                                             : pam::ExperimentConfig::load(path);
    cfg.kind = kind;
    if (seed) cfg.seed = *seed;
    if (out) cfg.out_dir = *out;
    return cfg;
}

int run_config_experiment(const std::string& config_path, pam::ExperimentKind kind,
                          std::optional<std::uint64_t> seed, std::optional<std::string> out) {
    const auto cfg = load_config(config_path, kind, seed, out);
    const auto report = pam::run_experiment(cfg);
    const auto paths = pam::emit_outputs(report, cfg.out_dir);
    for (const auto& p : paths) std::cout << p << "\n";
    if (!report.failures.empty()) {
        for (const auto& f : report.failures) std::cerr << "failed: " << f << "\n";
        return kExitAssertion;
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"pamlab: parabolic Anderson model laboratory"};
    app.require_subcommand(1);
    app.fallthrough(true);

    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_dir;
    int threads = 1;
    app.add_option("--config", config_path, "key=value config file")->capture_default_str();
    app.add_option("--seed", seed, "master seed override");
    app.add_option("--out", out_dir, "output directory override");
    app.add_option("--threads", threads, "worker threads (reserved)");

    // solve: one exact finite-box solve
    auto* solve = app.add_subcommand("solve", "solve u(t,.) on a sampled field");
    std::string solve_dist = "bernoulli(p=0.6)";
    std::string solve_method = "eigen";
    std::string field_path;
    int solve_R = 10, solve_d = 1;
    double solve_t = 1.0, solve_kappa = 1.0;
    solve->add_option("--dist", solve_dist, "potential distribution tag");
    solve->add_option("--field", field_path, "PAMFIELD file (overrides --dist)");
    solve->add_option("--R", solve_R, "box radius");
    solve->add_option("--d", solve_d, "dimension");
    solve->add_option("--t", solve_t, "time");
    solve->add_option("--kappa", solve_kappa, "diffusion constant");
    solve->add_option("--method", solve_method, "expm | eigen | rk_adaptive");

    auto* moments = app.add_subcommand("moments", "annealed moment asymptotics experiment");
    auto* asymp = app.add_subcommand("asymp", "almost-sure asymptotics experiment");
    auto* ids = app.add_subcommand("ids", "integrated density of states + Lifshitz fit");
    auto* chi = app.add_subcommand("chi", "variational constant tables");
    auto* check = app.add_subcommand("check", "scaling-identity suite");

    auto* perc = app.add_subcommand("perc", "cluster labeling export");
    std::string perc_dist = "bernoulli(p=0.7)";
    int perc_R = 40, perc_d = 2;
    double perc_K = std::numeric_limits<double>::infinity();
    perc->add_option("--dist", perc_dist, "potential distribution tag");
    perc->add_option("--R", perc_R, "box radius");
    perc->add_option("--d", perc_d, "dimension");
    perc->add_option("--K", perc_K, "level threshold (default +inf: xi > -inf)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (solve->parsed()) {
            std::optional<pam::PotentialField> field;
            if (!field_path.empty()) {
                std::ifstream is(field_path);
                if (!is) {
                    std::cerr << "cannot open field file '" << field_path << "'\n";
                    return kExitIo;
                }
                field = pam::PotentialField::load(is);
            } else {
                const auto dist = pam::PotentialDistribution::parse(solve_dist);
                field = pam::sample_field(dist, pam::LatticeBox(solve_d, solve_R),
                                          seed.value_or(1));
            }
            const auto method = pam::parse_method(solve_method);
            const auto sol = pam::solve_dirichlet(*field, solve_kappa, solve_t, method);
            const std::vector<int> origin(static_cast<std::size_t>(field->box().dim()), 0);
            std::cout << "u(t,0) = " << fmt_g17(sol.at(origin)) << "\n";
            if (out_dir) {
                namespace fs = std::filesystem;
                fs::create_directories(*out_dir);
                std::ofstream os(fs::path(*out_dir) / "solution.csv",
                                 std::ios::binary | std::ios::trunc);
                if (!os) return kExitIo;
                os << "site_index,value\n";
                for (long i = 0; i < field->box().site_count(); ++i) {
                    os << i << "," << fmt_g17(sol.values[static_cast<std::size_t>(i)]) << "\n";
                }
                nlohmann::ordered_json j;
                j["t"] = solve_t;
                j["kappa"] = solve_kappa;
                j["method"] = pam::to_string(method);
                j["dist"] = field->dist_tag();
                j["seed"] = field->seed();
                j["R"] = field->box().radius();
                j["d"] = field->box().dim();
                std::ofstream js(fs::path(*out_dir) / "solution.json",
                                 std::ios::binary | std::ios::trunc);
                if (!js) return kExitIo;
                js << j.dump(2) << "\n";
            }
            return kExitOk;
        }
        if (perc->parsed()) {
            const auto dist = pam::PotentialDistribution::parse(perc_dist);
            const auto field = pam::sample_field(dist, pam::LatticeBox(perc_d, perc_R),
                                                 seed.value_or(1));
            const auto lab = pam::label_clusters(field, perc_K);
            std::ostream* os = &std::cout;
            std::ofstream file;
            if (out_dir) {
                namespace fs = std::filesystem;
                fs::create_directories(*out_dir);
                file.open(fs::path(*out_dir) / "clusters.csv", std::ios::binary | std::ios::trunc);
                if (!file) return kExitIo;
                os = &file;
            }
            *os << "site_index,open,cluster_id\n";
            for (long i = 0; i < field.box().site_count(); ++i) {
                *os << i << "," << (lab.open(i) ? 1 : 0) << ","
                    << lab.cluster_id[static_cast<std::size_t>(i)] << "\n";
            }
            return kExitOk;
        }
        if (moments->parsed()) {
            return run_config_experiment(config_path, pam::ExperimentKind::moments, seed, out_dir);
        }
        if (asymp->parsed()) {
            return run_config_experiment(config_path, pam::ExperimentKind::almost_sure, seed,
                                         out_dir);
        }
        if (ids->parsed()) {
            return run_config_experiment(config_path, pam::ExperimentKind::lifshitz, seed,
                                         out_dir);
        }
        if (chi->parsed()) {
            return run_config_experiment(config_path, pam::ExperimentKind::chi_tables, seed,
                                         out_dir);
        }
        if (check->parsed()) {
            return run_config_experiment(config_path, pam::ExperimentKind::scaling_checks, seed,
                                         out_dir);
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::domain_error& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const std::runtime_error& e) {
        const std::string what = e.what();
        std::cerr << "error: " << what << "\n";
        return what.find("cannot") != std::string::npos ? kExitIo : kExitNumeric;
    }
    return kExitOk;
}
