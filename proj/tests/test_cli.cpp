// Drives the built binary end to end: subcommands, exit codes, byte-stable
// outputs.

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

namespace fs = std::filesystem;

namespace {

const std::string kCli = MGT_CLI_PATH;

fs::path temp_dir(const std::string& tag) {
    const fs::path p = fs::temp_directory_path() / ("mgtsim_cli_" + tag);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

int run_cmd(const std::string& args) {
    const int status = std::system((kCli + " " + args).c_str());
    return WEXITSTATUS(status);
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path write_small_config(const fs::path& dir) {
    const fs::path cfg = dir / "config.json";
    std::ofstream out(cfg);
    out << R"({
      "alpha": 2.0, "beta": 2.0, "gamma": 1.0,
      "kernel": {"type": "oscillating", "scale": 0.2},
      "spectrum": {"preset": "dirichlet1d", "n_modes": 2},
      "initial_data": "random", "seed": 5,
      "rho": 0.1, "T": 2.0, "dt": 0.002, "delta": 1.0,
      "energy_stride": 5,
      "checks": ["bounds"]
    })";
    return cfg;
}

} // namespace

TEST_CASE("simulate is deterministic across invocations") {
    const fs::path dir = temp_dir("sim");
    const fs::path cfg = write_small_config(dir);
    REQUIRE(run_cmd("simulate --config " + cfg.string() + " --out " + (dir / "a").string()) == 0);
    REQUIRE(run_cmd("simulate --config " + cfg.string() + " --out " + (dir / "b").string()) == 0);
    CHECK(slurp(dir / "a" / "trajectory.csv") == slurp(dir / "b" / "trajectory.csv"));
    CHECK(slurp(dir / "a" / "trajectory.csv").find("\r") == std::string::npos); // LF only
}

TEST_CASE("energy and fit consume simulate output") {
    const fs::path dir = temp_dir("energy");
    const fs::path cfg = write_small_config(dir);
    REQUIRE(run_cmd("simulate --config " + cfg.string() + " --out " + (dir / "a").string()) == 0);
    REQUIRE(run_cmd("energy --trajectory " + (dir / "a").string()) == 0);
    CHECK(fs::exists(dir / "a" / "energy.csv"));

    const fs::path fit_json = dir / "fit.json";
    REQUIRE(run_cmd("fit --in " + (dir / "a" / "energy.csv").string() + " --field E --out " +
                    fit_json.string() + " > /dev/null") == 0);
    const auto fit = nlohmann::json::parse(slurp(fit_json));
    CHECK(fit.contains("omega"));
    CHECK(fit.contains("residual"));
}

TEST_CASE("audit emits a machine-readable report") {
    const fs::path dir = temp_dir("audit");
    const fs::path out = dir / "report.json";
    REQUIRE(run_cmd("audit --kernel '{\"type\":\"oscillating\"}' --alpha 2 --delta 1 "
                    "--gamma 5 > " +
                    out.string()) == 0);
    const auto rep = nlohmann::json::parse(slurp(out));
    CHECK(rep.at("g3").at("ok").get<bool>());
    CHECK_FALSE(rep.at("convex").get<bool>());
    CHECK(rep.at("g1").at("mass_ok").get<bool>());

    const fs::path out2 = dir / "staircase.json";
    REQUIRE(run_cmd("audit --kernel '{\"type\":\"staircase\",\"n_max\":6}' --alpha 2 "
                    "--delta 1 --gamma 1 > " +
                    out2.string()) == 0);
    const auto rep2 = nlohmann::json::parse(slurp(out2));
    CHECK(rep2.at("g3").at("ok").get<bool>());
    CHECK_FALSE(rep2.at("dafermos").at("ok").get<bool>());
}

TEST_CASE("validation failures exit with code 2") {
    const fs::path dir = temp_dir("bad");
    const fs::path cfg = dir / "bad.json";
    {
        std::ofstream out(cfg);
        out << R"({"alpha":1,"beta":2,"gamma":1,"kernel":{"type":"zero"},
                   "spectrum":{"eigenvalues":[]},"T":1,"dt":0.1})";
    }
    CHECK(run_cmd("simulate --config " + cfg.string() + " --out " + (dir / "x").string() +
                  " 2> /dev/null") == 2);
}

TEST_CASE("run executes the pipeline with its declared checks") {
    const fs::path dir = temp_dir("run");
    const fs::path cfg = write_small_config(dir);
    const fs::path log = dir / "run.log";
    REQUIRE(run_cmd("run --config " + cfg.string() + " --out " + (dir / "out").string() + " > " +
                    log.string()) == 0);
    CHECK(slurp(log).find("[PASS] bounds") != std::string::npos);
    CHECK(fs::exists(dir / "out" / "manifest.json"));
}

TEST_CASE("converge writes the gap table") {
    const fs::path dir = temp_dir("conv");
    const fs::path cfg = dir / "config.json";
    {
        std::ofstream out(cfg);
        out << R"({
          "alpha": 1.0, "beta": 2.0, "gamma": 1.0,
          "kernel": {"type": "exponential", "k": 0.5, "nu": 1.0},
          "spectrum": {"eigenvalues": [1.0]},
          "initial_data": "random", "seed": 3,
          "rho": 0.0, "rho_list": [0.4, 0.2, 0.1],
          "T": 2.0, "dt": 0.002, "delta": 0.5
        })";
    }
    REQUIRE(run_cmd("converge --config " + cfg.string() + " --out " + (dir / "out").string()) ==
            0);
    CHECK(fs::exists(dir / "out" / "convergence.csv"));
}
