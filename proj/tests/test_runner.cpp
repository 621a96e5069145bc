#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "kinetic/runner.hpp"

using namespace kinetic;
namespace fs = std::filesystem;

namespace {

json base_config(const std::string& command, const std::string& out) {
    json model{{"variant", "Synthetic1D"}, {"kappa", 0.5}, {"g", 1.0}, {"dim", 1}};
    return json{{"command", command}, {"model", model},      {"N", 200},
                {"n", 4},            {"T", 0.5},             {"replicas", 2},
                {"seed", 12345},     {"output_dir", out}};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("model json round trip and key policy") {
    const auto m = ModelSpec::boltzmann3d(0.5, 0.4, 2.0, 0.2);
    const json j = model_to_json(m);
    const auto back = model_from_json(j);
    CHECK(back.variant == m.variant);
    CHECK(back.a == m.a);
    CHECK(back.nu == m.nu);
    CHECK(back.zeta_min == m.zeta_min);
    CHECK(model_to_json(back) == j);

    json bad = j;
    bad["extra_key"] = 1;
    CHECK_THROWS_AS(model_from_json(bad), ConfigError);

    json wrong = j;
    wrong["dim"] = 5;
    CHECK_THROWS_AS(model_from_json(wrong), ConfigError);

    json badnu = j;
    badnu["nu"] = 1.5;
    CHECK_THROWS_AS(model_from_json(badnu), ConfigError);
}

TEST_CASE("measure json round trip") {
    const auto mu = EmpiricalMeasure::gaussian(17, 2, root_stream(6).child(1));
    const auto back = measure_from_json(measure_to_json(mu));
    CHECK(back.coords() == mu.coords());
    CHECK(back.dim() == mu.dim());
}

TEST_CASE("config parsing is a fixed point and validates") {
    TempDir tmp("kinetic_cfg_test");
    const json j = base_config("simulate", tmp.path.string());
    const auto c1 = config_from_json(j);
    const json s1 = config_to_json(c1);
    const auto c2 = config_from_json(s1);
    CHECK(config_to_json(c2) == s1);

    SUBCASE("seed is mandatory") {
        json noseed = j;
        noseed.erase("seed");
        CHECK_THROWS_AS(config_from_json(noseed), ConfigError);
    }

    SUBCASE("unknown keys rejected") {
        json extra = j;
        extra["surprise"] = true;
        CHECK_THROWS_AS(config_from_json(extra), ConfigError);
    }

    SUBCASE("ladders must increase") {
        json bad = j;
        bad["command"] = "rate-time";
        bad["n_list"] = {4, 2};
        CHECK_THROWS_AS(config_from_json(bad), ConfigError);
    }

    SUBCASE("unknown command rejected") {
        json bad = j;
        bad["command"] = "explode";
        CHECK_THROWS_AS(config_from_json(bad), ConfigError);
    }
}

TEST_CASE("simulate run: trivial schedule and byte-identical reruns") {
    TempDir tmp("kinetic_sim_test");
    json j = base_config("simulate", tmp.path.string());
    j["n"] = 1;
    j["T"] = 0.0;
    auto cfg = config_from_json(j);
    CHECK(run_experiment(cfg) == 0);

    // trajectory of length 2 with terminal = initial
    REQUIRE(fs::exists(tmp.path / "report.json"));
    const json report = json::parse(slurp(tmp.path / "report.json"));
    CHECK(report.at("trajectory_length") == 2);
    CHECK(slurp(tmp.path / "snapshot_0.csv") == slurp(tmp.path / "snapshot_1.csv"));

    // same config + seed: byte-identical outputs (no timestamps anywhere)
    const std::string first_report = slurp(tmp.path / "report.json");
    const std::string first_manifest = slurp(tmp.path / "manifest.json");
    CHECK(run_experiment(cfg) == 0);
    CHECK(slurp(tmp.path / "report.json") == first_report);
    CHECK(slurp(tmp.path / "manifest.json") == first_manifest);

    REQUIRE(fs::exists(tmp.path / "series.csv"));
    REQUIRE(fs::exists(tmp.path / "manifest.json"));
}

TEST_CASE("validate-kernels run and exit codes") {
    TempDir tmp("kinetic_validate_test");
    json j = base_config("validate-kernels", tmp.path.string());
    j["model"] = model_to_json(ModelSpec::boltzmann3d(0.5, 0.5, 2.0, 0.2));
    j["samples"] = 20000;
    CHECK(run_experiment(config_from_json(j)) == 0);
    const json report = json::parse(slurp(tmp.path / "report.json"));
    CHECK(report.at("pass") == true);

    // paper_literal convention: conservation failure is expected and documented,
    // so the run still exits 0
    json lit = j;
    lit["model"]["convention"] = "paper_literal";
    CHECK(run_experiment(config_from_json(lit)) == 0);
    const json lit_report = json::parse(slurp(tmp.path / "report.json"));
    bool conservation_failed = false;
    for (const auto& c : lit_report.at("validation").at("checks"))
        if (c.at("name") == "pairwise_conservation") conservation_failed = !c.at("pass").get<bool>();
    CHECK(conservation_failed);

    // synthetic: angular identities reported not applicable
    json syn = base_config("validate-kernels", tmp.path.string());
    syn["samples"] = 20000;
    CHECK(run_experiment(config_from_json(syn)) == 0);
    const json syn_report = json::parse(slurp(tmp.path / "report.json"));
    CHECK(syn_report.at("validation").at("checks")[0].at("applicable") == false);
}

TEST_CASE("stability run writes a pass verdict") {
    TempDir tmp("kinetic_stab_test");
    json j = base_config("stability", tmp.path.string());
    j["N"] = 400;
    j["n"] = 8;
    j["T"] = 1.0;
    CHECK(run_experiment(config_from_json(j)) == 0);
    const json report = json::parse(slurp(tmp.path / "report.json"));
    CHECK(report.at("stability").at("pass") == true);
    CHECK(report.at("stability").at("lhs").get<double>() <=
          report.at("stability").at("rhs").get<double>());
}

TEST_CASE("rate and residual commands run end to end") {
    TempDir tmp("kinetic_cmds_test");

    SUBCASE("rate-time") {
        json j = base_config("rate-time", tmp.path.string());
        j["N"] = 1000;
        j["n_list"] = {2, 4, 8};
        j["replicas"] = 2;
        j["T"] = 1.0;
        CHECK(run_experiment(config_from_json(j)) == 0);
        const json report = json::parse(slurp(tmp.path / "report.json"));
        CHECK(report.contains("pairs"));
        CHECK(report.contains("slope"));
        CHECK(report.contains("intercept"));
        CHECK(report.contains("r_squared"));
        CHECK(report.at("pairs").size() == 3);
    }

    SUBCASE("rate-particles") {
        json j = base_config("rate-particles", tmp.path.string());
        j["N_list"] = {64, 128};
        j["replicas"] = 16;
        j["n"] = 16;
        j["T"] = 0.5;
        const int code = run_experiment(config_from_json(j));
        const json report = json::parse(slurp(tmp.path / "report.json"));
        CHECK(report.contains("slope"));
        CHECK(report.contains("chaos_pairs"));
        CHECK(report.at("expected_slope") == -0.5);
        CHECK((code == 0 || code == 2));  // tiny ladder: the verdict may be noisy
    }

    SUBCASE("weak-residual") {
        json j = base_config("weak-residual", tmp.path.string());
        j["N"] = 500;
        j["n"] = 10;
        j["T"] = 0.5;
        CHECK(run_experiment(config_from_json(j)) == 0);
        const json report = json::parse(slurp(tmp.path / "report.json"));
        CHECK(report.contains("max_residual"));
        CHECK(report.contains("budget"));
        CHECK(report.at("functions").size() == 2);
    }
}

TEST_CASE("threshold failure exits 2: literal sign convention pumps energy") {
    TempDir tmp("kinetic_exit2_test");
    json j = base_config("conserve", tmp.path.string());
    j["model"] = model_to_json(ModelSpec::boltzmann3d(0.0, 0.5, 50.0, 0.5,
                                                      SignConvention::paper_literal));
    j["N"] = 2000;
    j["n"] = 50;
    j["T"] = 0.5;
    CHECK(run_experiment(config_from_json(j)) == 2);
    const json report = json::parse(slurp(tmp.path / "report.json"));
    CHECK(report.at("pass") == false);
    CHECK(report.contains("failed_criterion"));

    // the energy convention conserves and exits 0
    j["model"]["convention"] = "energy";
    j["n"] = 100;
    CHECK(run_experiment(config_from_json(j)) == 0);
}

TEST_CASE("run_from_file applies overrides") {
    TempDir tmp("kinetic_file_test");
    json j = base_config("simulate", (tmp.path / "ignored").string());
    j["n"] = 1;
    j["T"] = 0.0;
    j.erase("command");  // supplied by the subcommand
    const fs::path cfg_path = tmp.path / "config.json";
    {
        std::ofstream out(cfg_path);
        out << j.dump(2);
    }
    const fs::path out_dir = tmp.path / "out";
    CHECK(run_from_file(cfg_path.string(), "simulate", 999, 2, out_dir.string()) == 0);
    CHECK(fs::exists(out_dir / "report.json"));
    const json report = json::parse(slurp(out_dir / "report.json"));
    CHECK(report.at("params").at("seed") == 999);
    CHECK(report.at("params").at("threads") == 2);
}
