// Experiment configs, reproducibility of the drivers, and output emission.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "pam/experiments.hpp"

using namespace pam;
namespace fs = std::filesystem;

namespace {
std::string read_file(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

ExperimentConfig small_moments_config() {
    ExperimentConfig cfg;
    cfg.kind = ExperimentKind::moments;
    cfg.dist = "bernoulli(p=0.6,trunc=-2)";
    cfg.d = 1;
    cfg.p = 1.0;
    cfg.t_grid = {16, 32, 64};
    cfg.box_factor = 1000.0;
    cfg.box_cap = 10;
    cfg.n_samples = 200;
    cfg.seed = 3;
    return cfg;
}
}  // namespace

TEST_CASE("config serialization round-trips and rejects unknown keys") {
    auto cfg = small_moments_config();
    const auto text = cfg.serialize();
    const auto back = ExperimentConfig::parse(text);
    CHECK(back.serialize() == text);
    CHECK(back.dist == cfg.dist);
    CHECK(back.t_grid == cfg.t_grid);
    CHECK(back.seed == cfg.seed);

    CHECK_THROWS(ExperimentConfig::parse("knid = moments\n"));
    CHECK_THROWS(parse_kind("momnets"));
    CHECK(parse_kind(to_string(ExperimentKind::lifshitz)) == ExperimentKind::lifshitz);
}

TEST_CASE("config hash distinguishes seeds and is stable") {
    auto a = small_moments_config();
    auto b = small_moments_config();
    CHECK(a.hash() == b.hash());
    b.seed = 4;
    CHECK(a.hash() != b.hash());
}

TEST_CASE("moment experiment: deterministic, negative rescaled curve") {
    const auto cfg = small_moments_config();
    const auto rep1 = run_experiment(cfg);
    const auto rep2 = run_experiment(cfg);
    REQUIRE(!rep1.curves.empty());
    CHECK(rep1.curves[0].name == "rescaled_moment");
    for (std::size_t i = 0; i < rep1.curves.size(); ++i) {
        CHECK(rep1.curves[i].y == rep2.curves[i].y);  // bitwise reproducible
        for (double y : rep1.curves[0].y) CHECK(std::isfinite(y));
    }
    for (double y : rep1.curves[0].y) CHECK(y < 0.0);
    CHECK(rep1.constants.count("chi") == 1);
    CHECK(rep1.constants.at("chi") > 0.0);
}

TEST_CASE("almost-sure experiment needs t > e") {
    auto cfg = small_moments_config();
    cfg.kind = ExperimentKind::almost_sure;
    cfg.t_grid = {2, 4};
    CHECK_THROWS(run_experiment(cfg));
}

TEST_CASE("lifshitz experiment reports an exponent fit") {
    ExperimentConfig cfg;
    cfg.kind = ExperimentKind::lifshitz;
    cfg.dist = "bernoulli(p=0.7)";
    cfg.d = 1;
    cfg.box_radii = {40, 80};
    cfg.n_energy = 25;
    cfg.e_max = 1.0;
    cfg.n_samples = 8;
    cfg.seed = 5;
    const auto rep = run_experiment(cfg);
    CHECK(rep.constants.count("exponent") == 1);
    CHECK(rep.constants.count("target_exponent") == 1);
    CHECK(rep.constants.at("target_exponent") == doctest::Approx(0.5));  // 1/beta, gamma=0 d=1
    REQUIRE(!rep.curves.empty());
    CHECK(rep.curves[0].name == "ids_largest_box");
    // the histogram row is a nondecreasing function of E
    for (std::size_t i = 1; i < rep.curves[0].y.size(); ++i) {
        CHECK(rep.curves[0].y[i] >= rep.curves[0].y[i - 1]);
    }
}

TEST_CASE("scaling-checks suite passes for the stretched family") {
    ExperimentConfig cfg;
    cfg.kind = ExperimentKind::scaling_checks;
    cfg.dist = "stretched(A=1,gamma=0.5)";
    cfg.gamma = 0.5;
    cfg.d = 1;
    cfg.seed = 1;
    const auto rep = run_experiment(cfg);
    CHECK(rep.failures.empty());
    CHECK(rep.constants.count("chichirel") == 1);
}

TEST_CASE("emit_outputs: hashed subdirectory, byte-identical reruns") {
    const fs::path base = fs::temp_directory_path() / "pamlab_test_out";
    fs::remove_all(base);
    auto cfg = small_moments_config();
    cfg.out_dir = base.string();
    const auto rep = run_experiment(cfg);

    const auto paths1 = emit_outputs(rep, cfg.out_dir);
    REQUIRE(!paths1.empty());
    for (const auto& p : paths1) {
        CHECK(fs::exists(p));
        CHECK(fs::path(p).parent_path().filename().string() == cfg.hash());
    }
    std::map<std::string, std::string> bytes;
    for (const auto& p : paths1) bytes[p] = read_file(p);

    const auto paths2 = emit_outputs(run_experiment(cfg), cfg.out_dir);
    CHECK(paths2 == paths1);
    for (const auto& p : paths2) {
        // summary.json carries wall-clock runtime; everything else is bitwise stable
        if (fs::path(p).filename() == "summary.json") continue;
        CHECK(read_file(p) == bytes.at(p));
    }

    // a different seed lands in a different subdirectory
    auto other = cfg;
    other.seed = 99;
    const auto paths3 = emit_outputs(run_experiment(other), other.out_dir);
    CHECK(fs::path(paths3.front()).parent_path() != fs::path(paths1.front()).parent_path());

    // summary.json parses and carries the config echo
    bool saw_summary = false;
    for (const auto& p : paths1) {
        if (fs::path(p).filename() == "summary.json") {
            saw_summary = true;
            const auto j = nlohmann::json::parse(read_file(p));
            CHECK(j.contains("config_hash"));
            CHECK(j["config_hash"] == cfg.hash());
            CHECK(j.contains("constants"));
            CHECK(j.contains("curves"));
            CHECK(j["failures"].empty());
        }
    }
    CHECK(saw_summary);
    fs::remove_all(base);
}
