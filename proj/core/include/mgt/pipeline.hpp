#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "mgt/audit.hpp"
#include "mgt/config.hpp"
#include "mgt/energetics.hpp"

namespace mgt {

enum class ExitCode : int {
    Ok = 0,
    ValidationFailure = 2,
    CheckFailure = 3,
    NumericalFailure = 4,
};

struct CheckOutcome {
    std::string name;
    bool pass = false;
    std::string detail;
};

struct PipelineResult {
    ExitCode code = ExitCode::Ok;
    std::string message;
    std::vector<CheckOutcome> checks;
};

// ---- artifact emitters / readers ----

/// Long-format rows t, j, u_j, v_j, w_j (mode index 1-based), 17 significant
/// digits, LF line endings.
void write_trajectory_csv(const std::filesystem::path& file, const Trajectory& traj);

/// Reconstructs a Trajectory from run_meta.json + trajectory.csv in `dir`.
Trajectory load_trajectory(const std::filesystem::path& dir);

void write_run_meta(const std::filesystem::path& file, const ExperimentConfig& cfg);
void write_events_json(const std::filesystem::path& file, const Trajectory& traj);
void write_energy_csv(const std::filesystem::path& file, const EnergySeries& series);

std::string decay_fit_json(const DecayFit& fit);

/// Simulates per the config and writes trajectory.csv, events.json and
/// run_meta.json into out_dir.
Trajectory run_simulate(const ExperimentConfig& cfg, const std::filesystem::path& out_dir);

struct ConvergenceResult {
    std::vector<double> rho_list;
    std::vector<RhoGapRow> rows;        ///< consecutive-pair sup gaps
    std::vector<double> probe_times;    ///< limit-identity probes
    /// |E_rho(t) - E(t) - g(t)||u(t)||_1^2| per rho (rows) and probe (cols),
    /// E and u taken from the rho = 0 reference run
    std::vector<std::vector<double>> limit_gap;
};

/// Runs the rho-list family plus the rho = 0 reference.
ConvergenceResult run_convergence(const ExperimentConfig& cfg);
void write_convergence_csv(const std::filesystem::path& file, const ConvergenceResult& res);

/// Full pipeline: simulate -> energy -> audit -> fit -> convergence ->
/// declared self-checks -> manifest.json.  Artifacts are emitted regardless
/// of check outcomes; the exit code reports the first failure class.
PipelineResult run_experiment(const ExperimentConfig& cfg, const std::filesystem::path& out_dir);

} // namespace mgt
