// Command-line front end: simulate | energy | fit | audit | converge | run.
// Exit codes: 0 ok, 2 validation failure, 3 declared-check failure,
// 4 numerical failure.

#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "mgt/audit.hpp"
#include "mgt/config.hpp"
#include "mgt/csv.hpp"
#include "mgt/energetics.hpp"
#include "mgt/pipeline.hpp"

namespace fs = std::filesystem;
using namespace mgt;

namespace {

ExperimentConfig load_config(const std::string& path, std::uint64_t* seed_override,
                             int* threads_override) {
    ExperimentConfig cfg = ExperimentConfig::load_file(path);
    if (seed_override) {
        cfg.seed = *seed_override;
        if (cfg.random_initial) cfg.initial = random_initial_state(cfg.spectrum.size(), cfg.seed);
    }
    if (threads_override) cfg.threads = *threads_override;
    cfg.validate();
    return cfg;
}

int guard(const std::function<int()>& body) {
    try {
        return body();
    } catch (const ValidationError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 2;
    } catch (const ParameterError& e) {
        std::cerr << "parameter error: " << e.what() << "\n";
        return 2;
    } catch (const FitError& e) {
        std::cerr << "fit error: " << e.what() << "\n";
        return 4;
    } catch (const NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Spectral simulator and verification suite for the MGT equation "
                 "with type-I memory"};
    app.require_subcommand(1);

    std::string config_path, out_path, traj_dir, in_path, field = "E", kernel_spec, grid_file;
    double alpha = 0, delta = 0, gamma_opt = -1.0, s_max = 0;
    std::uint64_t seed = 0;
    int threads = 0;
    bool have_seed = false;

    auto add_seed_threads = [&](CLI::App* cmd) {
        cmd->add_option("--seed", seed, "override the config seed")
            ->each([&](const std::string&) { have_seed = true; });
        cmd->add_option("--threads", threads, "per-mode worker threads");
    };

    CLI::App* sim = app.add_subcommand("simulate", "integrate and write trajectory.csv");
    sim->add_option("--config", config_path, "experiment config (JSON)")->required();
    sim->add_option("--out", out_path, "output directory")->required();
    add_seed_threads(sim);

    CLI::App* energy_cmd = app.add_subcommand("energy", "energy functionals along a trajectory");
    energy_cmd->add_option("--trajectory", traj_dir, "directory with trajectory.csv + run_meta.json")
        ->required();
    energy_cmd->add_option("--out", out_path, "output CSV (default: <dir>/energy.csv)");

    CLI::App* fit_cmd = app.add_subcommand("fit", "exponential-envelope decay fit");
    fit_cmd->add_option("--in", in_path, "energy.csv")->required();
    fit_cmd->add_option("--field", field, "column to fit (default E)");
    fit_cmd->add_option("--out", out_path, "also write the JSON here");

    CLI::App* audit_cmd = app.add_subcommand("audit", "kernel hypothesis audit");
    audit_cmd->add_option("--kernel", kernel_spec, "kernel spec JSON")->required();
    audit_cmd->add_option("--alpha", alpha, "structural alpha")->required();
    audit_cmd->add_option("--delta", delta, "certified delta to test")->required();
    audit_cmd->add_option("--gamma", gamma_opt, "gamma for the mass condition");
    audit_cmd->add_option("--grid-file", grid_file, "CSV with column s of probe points");
    audit_cmd->add_option("--s-max", s_max, "grid span (default: kernel-dependent)");

    CLI::App* conv = app.add_subcommand("converge", "rho-convergence study");
    conv->add_option("--config", config_path, "experiment config (JSON)")->required();
    conv->add_option("--out", out_path, "output directory")->required();
    add_seed_threads(conv);

    CLI::App* run = app.add_subcommand("run", "full pipeline with declared checks");
    run->add_option("--config", config_path, "experiment config (JSON)")->required();
    run->add_option("--out", out_path, "output directory")->required();
    add_seed_threads(run);

    CLI11_PARSE(app, argc, argv);

    const auto seed_ptr = have_seed ? &seed : nullptr;
    const auto threads_ptr = threads > 0 ? &threads : nullptr;

    if (sim->parsed()) {
        return guard([&] {
            const ExperimentConfig cfg = load_config(config_path, seed_ptr, threads_ptr);
            run_simulate(cfg, out_path);
            return 0;
        });
    }

    if (energy_cmd->parsed()) {
        return guard([&] {
            const Trajectory traj = load_trajectory(traj_dir);
            EnergyOptions opts;
            opts.stride = std::max<std::size_t>(1, (traj.steps() - 1) / 2000);
            const EnergySeries series = compute_energy_series(traj, opts);
            const fs::path out =
                out_path.empty() ? fs::path(traj_dir) / "energy.csv" : fs::path(out_path);
            write_energy_csv(out, series);
            return 0;
        });
    }

    if (fit_cmd->parsed()) {
        return guard([&] {
            const CsvTable table = read_csv(in_path);
            const std::size_t ct = table.column("t"), cy = table.column(field);
            std::vector<double> t, y;
            for (const auto& row : table.rows) {
                t.push_back(row[ct]);
                y.push_back(row[cy]);
            }
            const DecayFit fit = fit_decay(t, y);
            const std::string json = decay_fit_json(fit);
            std::cout << json << "\n";
            if (!out_path.empty()) {
                std::ofstream f(out_path, std::ios::binary);
                f << json << "\n";
            }
            return 0;
        });
    }

    if (audit_cmd->parsed()) {
        return guard([&] {
            const KernelPtr kernel = kernel_from_json_text(kernel_spec);
            AuditGrid grid;
            if (!grid_file.empty()) {
                const CsvTable table = read_csv(grid_file);
                const std::size_t cs = table.column("s");
                for (const auto& row : table.rows) grid.points.push_back(row[cs]);
                grid.tolerance = 1e-10;
                grid.validate();
            } else {
                double span = s_max;
                if (span <= 0.0) {
                    span = 40.0;
                    for (double b : kernel->breakpoints(1e9))
                        span = std::max(span, b + 5.0);
                }
                grid = make_audit_grid(*kernel, span);
            }
            const std::optional<double> gamma =
                gamma_opt > 0.0 ? std::optional<double>(gamma_opt) : std::nullopt;
            const KernelReport report = audit_kernel(*kernel, alpha, delta, gamma, grid);
            std::cout << report_to_json(report) << "\n";
            return 0;
        });
    }

    if (conv->parsed()) {
        return guard([&] {
            const ExperimentConfig cfg = load_config(config_path, seed_ptr, threads_ptr);
            const ConvergenceResult res = run_convergence(cfg);
            fs::create_directories(out_path);
            write_convergence_csv(fs::path(out_path) / "convergence.csv", res);
            return 0;
        });
    }

    if (run->parsed()) {
        return guard([&] {
            const ExperimentConfig cfg = load_config(config_path, seed_ptr, threads_ptr);
            const PipelineResult result = run_experiment(cfg, out_path);
            for (const auto& c : result.checks)
                std::cout << (c.pass ? "[PASS] " : "[FAIL] ") << c.name << ": " << c.detail
                          << "\n";
            if (!result.message.empty()) std::cerr << result.message << "\n";
            return static_cast<int>(result.code);
        });
    }

    return 0;
}
