#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "mgt/csv.hpp"
#include "mgt/pipeline.hpp"

using namespace mgt;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const std::string& tag) {
    const fs::path p = fs::temp_directory_path() / ("mgtsim_test_" + tag);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

const char* kSmallConfig = R"({
  "alpha": 2.0, "beta": 2.0, "gamma": 1.0,
  "kernel": {"type": "oscillating", "scale": 0.2},
  "spectrum": {"preset": "dirichlet1d", "n_modes": 2},
  "initial_data": "random",
  "seed": 77,
  "rho": 0.1,
  "T": 2.0, "dt": 0.002,
  "delta": 1.0,
  "energy_stride": 5,
  "checks": ["bounds", "qbound"]
})";

} // namespace

TEST_CASE("config parsing and validation") {
    SUBCASE("a complete config round-trips") {
        const ExperimentConfig cfg = ExperimentConfig::from_json_text(kSmallConfig);
        CHECK(cfg.params.alpha == 2.0);
        CHECK(cfg.spectrum.size() == 2);
        CHECK(cfg.rho == 0.1);
        CHECK(cfg.resolved_delta() == 1.0);
        CHECK(cfg.checks.size() == 2);
    }
    SUBCASE("empty spectrum is a validation error") {
        const char* bad = R"({"alpha":1,"beta":2,"gamma":1,
            "kernel":{"type":"zero"},"spectrum":{"eigenvalues":[]},
            "T":1,"dt":0.1})";
        CHECK_THROWS_AS(ExperimentConfig::from_json_text(bad), ValidationError);
    }
    SUBCASE("inadmissible kernel mass is a validation error") {
        const char* bad = R"({"alpha":1,"beta":2,"gamma":1,
            "kernel":{"type":"exponential","k":2,"nu":1},
            "spectrum":{"eigenvalues":[1]},"T":1,"dt":0.1})";
        CHECK_THROWS_AS(ExperimentConfig::from_json_text(bad), ValidationError);
    }
    SUBCASE("dt must divide T") {
        const char* bad = R"({"alpha":1,"beta":2,"gamma":1,
            "kernel":{"type":"zero"},"spectrum":{"eigenvalues":[1]},
            "T":1,"dt":0.3})";
        CHECK_THROWS_AS(ExperimentConfig::from_json_text(bad), ValidationError);
    }
    SUBCASE("delta outside (0, alpha) is rejected") {
        const char* bad = R"({"alpha":1,"beta":2,"gamma":1,
            "kernel":{"type":"zero"},"spectrum":{"eigenvalues":[1]},
            "T":1,"dt":0.1,"delta":1.5})";
        CHECK_THROWS_AS(ExperimentConfig::from_json_text(bad), ValidationError);
    }
    SUBCASE("kernel spec parser covers every type") {
        CHECK(kernel_from_json_text(R"({"type":"exponential","k":1,"nu":2})")->kappa() ==
              doctest::Approx(0.5));
        CHECK(kernel_from_json_text(R"({"type":"oscillating"})")->g(0.0) ==
              doctest::Approx(154.0 / 37.0));
        CHECK(kernel_from_json_text(R"({"type":"staircase","n_max":4})")->kappa() ==
              doctest::Approx(0.84481).epsilon(1e-4));
        CHECK(kernel_from_json_text(R"({"type":"zero"})")->is_zero());
        CHECK(kernel_from_json_text(R"({"type":"oscillating","scale":0.5})")->g(0.0) ==
              doctest::Approx(77.0 / 37.0));
        CHECK_THROWS_AS(kernel_from_json_text(R"({"type":"nope"})"), ValidationError);
        CHECK_THROWS_AS(kernel_from_json_text("not json"), ValidationError);
    }
    SUBCASE("tabulated kernel path resolves relative to the config") {
        const fs::path dir = temp_dir("tab");
        {
            std::ofstream csv(dir / "kern.csv", std::ios::binary);
            csv << "s,g\n0.5,1.0\n1.0,0.5\n2.0,0.0\n";
        }
        const auto k = kernel_from_json_text(R"({"type":"tabulated","path":"kern.csv"})", dir);
        CHECK(k->g(0.75) == doctest::Approx(0.75));
    }
}

TEST_CASE("deterministic generic data") {
    const State a = random_initial_state(4, 99);
    const State b = random_initial_state(4, 99);
    const State c = random_initial_state(4, 100);
    for (std::size_t j = 0; j < 4; ++j) {
        CHECK(a.u.c[j] == b.u.c[j]);
        CHECK(a.w.c[j] == b.w.c[j]);
    }
    bool any_different = false;
    for (std::size_t j = 0; j < 4; ++j) any_different = any_different || a.u.c[j] != c.u.c[j];
    CHECK(any_different);
}

TEST_CASE("simulate artifacts are byte-stable and reloadable") {
    const ExperimentConfig cfg = ExperimentConfig::from_json_text(kSmallConfig);
    const fs::path d1 = temp_dir("sim1"), d2 = temp_dir("sim2");
    const Trajectory t1 = run_simulate(cfg, d1);
    run_simulate(cfg, d2);

    SUBCASE("identical config + seed give byte-identical CSV output") {
        CHECK(slurp(d1 / "trajectory.csv") == slurp(d2 / "trajectory.csv"));
    }
    SUBCASE("the reloaded trajectory reproduces every sample exactly") {
        const Trajectory back = load_trajectory(d1);
        REQUIRE(back.steps() == t1.steps());
        CHECK(back.rho == t1.rho);
        for (std::size_t j = 0; j < 2; ++j)
            for (std::size_t i = 0; i < t1.steps(); i += 97) {
                CHECK(back.u[j][i] == t1.u[j][i]); // 17 significant digits round-trip
                CHECK(back.w[j][i] == t1.w[j][i]);
            }
    }
    SUBCASE("events.json carries the regime") {
        const auto events = nlohmann::json::parse(slurp(d1 / "events.json"));
        CHECK(events.at("regime") == "subcritical");
        CHECK(events.at("admissible").get<bool>());
        CHECK(events.at("blowup").empty());
    }
}

TEST_CASE("full pipeline emits every artifact and passes its checks") {
    const ExperimentConfig cfg = ExperimentConfig::from_json_text(kSmallConfig);
    const fs::path dir = temp_dir("run");
    const PipelineResult res = run_experiment(cfg, dir);
    CHECK(res.code == ExitCode::Ok);
    for (const char* f : {"trajectory.csv", "events.json", "run_meta.json", "energy.csv",
                          "audit.json", "fit.json", "manifest.json"})
        CHECK(fs::exists(dir / f));

    const auto manifest = nlohmann::json::parse(slurp(dir / "manifest.json"));
    CHECK(manifest.at("regime").at("class") == "subcritical");
    CHECK(manifest.at("constants").contains("C71"));
    CHECK(manifest.at("constants").contains("eps_lambda"));
    REQUIRE(manifest.at("checks").size() == 2);
    for (const auto& c : manifest.at("checks")) CHECK(c.at("pass").get<bool>());

    const auto audit = nlohmann::json::parse(slurp(dir / "audit.json"));
    CHECK(audit.at("g3").at("ok").get<bool>());
    CHECK_FALSE(audit.at("convex").get<bool>());

    const auto fit = nlohmann::json::parse(slurp(dir / "fit.json"));
    CHECK(fit.contains("omega"));

    const auto energy_table = read_csv(dir / "energy.csv");
    CHECK(energy_table.header ==
          std::vector<std::string>{"t", "E", "E_rho", "F_rho", "Psi1", "Psi2", "Theta", "Lambda"});
    CHECK(energy_table.rows.size() == 201);
}

TEST_CASE("convergence study artifact") {
    ExperimentConfig cfg = ExperimentConfig::from_json_text(R"({
        "alpha": 1.0, "beta": 2.0, "gamma": 1.0,
        "kernel": {"type": "exponential", "k": 0.5, "nu": 1.0},
        "spectrum": {"eigenvalues": [1.0]},
        "initial_data": "random", "seed": 21,
        "rho": 0.0, "rho_list": [0.4, 0.2, 0.1],
        "T": 2.0, "dt": 0.002, "delta": 0.5
    })");
    const ConvergenceResult res = run_convergence(cfg);
    REQUIRE(res.rows.size() == 2);
    CHECK(res.rows[1].sup_gap < res.rows[0].sup_gap);
    CHECK(res.probe_times == std::vector<double>{1.0});

    const fs::path dir = temp_dir("conv");
    write_convergence_csv(dir / "convergence.csv", res);
    const CsvTable table = read_csv(dir / "convergence.csv");
    CHECK(table.rows.size() == 2);
    CHECK(table.header.front() == "rho_fine");
}

TEST_CASE("a failing declared check yields the check-failure exit code") {
    // blowup check on a subcritical run cannot pass
    ExperimentConfig cfg = ExperimentConfig::from_json_text(kSmallConfig);
    cfg.checks = {"blowup"};
    const fs::path dir = temp_dir("fail");
    const PipelineResult res = run_experiment(cfg, dir);
    CHECK(res.code == ExitCode::CheckFailure);
    REQUIRE(res.checks.size() == 1);
    CHECK_FALSE(res.checks.front().pass);
}
