#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "mgt/kernels.hpp"
#include "mgt/solver.hpp"
#include "mgt/spectral.hpp"

namespace mgt {

/// A fully specified experiment: structural parameters, kernel, spectrum,
/// initial data, the regularization parameter, run horizon and step, and the
/// list of self-checks the run must pass.  All quantities are dimensionless.
struct ExperimentConfig {
    MgtParams params;
    KernelPtr kernel;
    std::string kernel_spec; ///< JSON echo of the kernel block
    Spectrum spectrum{std::vector<double>{1.0}};
    State initial{State::zero(1)};
    bool random_initial = false;
    std::uint64_t seed = 0;

    double rho = 0.0;
    std::vector<double> rho_list; ///< for the rho-convergence study
    double T = 1.0;
    double dt = 1e-3;
    std::optional<double> delta;  ///< certified (g3) delta; kernel default if unset
    std::size_t energy_stride = 0; ///< 0: pick ~2000 samples automatically
    int threads = 1;
    std::vector<std::string> checks;

    static ExperimentConfig load_file(const std::filesystem::path& path);
    static ExperimentConfig from_json_text(const std::string& text,
                                           const std::filesystem::path& base_dir = ".");

    /// Throws ValidationError listing every violated constraint.
    void validate() const;

    /// The delta used by dissipation checks: explicit, else the kernel's
    /// certified value.  Throws if neither is available.
    double resolved_delta() const;

    std::size_t resolved_stride(std::size_t n_steps) const;
};

/// Parses a kernel specification block, e.g.
///   {"type": "exponential", "k": 1, "nu": 1}
///   {"type": "oscillating", "scale": 0.2}
///   {"type": "staircase", "n_max": 8}
///   {"type": "tabulated", "path": "kernel.csv"}   (CSV with header s,g)
///   {"type": "zero"}
/// An optional "scale" > 0 wraps the kernel in c * g.
KernelPtr kernel_from_json_text(const std::string& text,
                                const std::filesystem::path& base_dir = ".");

/// Deterministic generic initial data: standard normal coefficients drawn
/// from a fixed-seed generator.
State random_initial_state(std::size_t n_modes, std::uint64_t seed);

} // namespace mgt
