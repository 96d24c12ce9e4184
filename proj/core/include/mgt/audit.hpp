#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mgt/kernels.hpp"

namespace mgt {

/// Probe grid for kernel hypothesis checks.  Conditions stated "for a.e. s"
/// are certified (or refuted) on this finite grid only; reports record the
/// grid so the certification scope is explicit.
struct AuditGrid {
    std::vector<double> points;   ///< strictly increasing, first > 0
    double tolerance = 1e-10;     ///< additive allowance, relative to local scale

    void validate() const;
};

/// Default grid: geometric refinement of (s_min, 1] union a uniform cover of
/// [1, s_max], plus any structural probe points the kernel declares.
/// At least 1000 points.
AuditGrid make_audit_grid(const MemoryKernel& kernel, double s_max, std::size_t n_geometric = 400,
                          std::size_t n_uniform = 2000, double s_min = 1e-6);

/// Outcome of a single inequality check: margins are normalized by the local
/// magnitude of the participating terms, so a margin of +x means the
/// inequality is violated by a relative amount x at `worst_point`.
struct CheckResult {
    bool ok = false;
    double worst_margin = 0.0;
    double worst_point = 0.0;
};

/// (g3): (alpha - delta) g'(s) - g''(s) <= 0 on the grid.
/// Requires 0 < delta < alpha.
CheckResult check_g3(const MemoryKernel& kernel, double alpha, double delta,
                     const AuditGrid& grid);

/// Dafermos inequality g'(s) + delta g(s) <= 0 on the grid (the classical
/// kernel condition this machinery dispenses with; refutations report the
/// violating point).
CheckResult check_dafermos(const MemoryKernel& kernel, double delta, const AuditGrid& grid);

struct ExpBoundFit {
    double M = 0.0;
    double omega = 0.0;
    bool ok = false; ///< strictly positive omega certified on the grid
};

/// Tightest grid envelope g(s) <= M exp(-omega s): minimizes the spread of
/// log g(s) + omega s over the grid (a convex 1-d problem), then M is the
/// exact dominating constant.  A kernel vanishing on the whole grid reports
/// the (M = 0, omega = +inf) sentinel.
ExpBoundFit check_exponential_bound(const MemoryKernel& kernel, const AuditGrid& grid);

/// Translated form -g'(s+t) <= -g'(s) e^{(alpha-delta) t} over all grid
/// pairs; equivalent to (g3).
CheckResult check_inequality_3_1(const MemoryKernel& kernel, double alpha, double delta,
                                 const std::vector<double>& s_grid,
                                 const std::vector<double>& t_grid);

struct KernelReport {
    std::string kernel;
    double alpha = 0.0, delta = 0.0;
    std::optional<double> gamma;

    double kappa_measured = 0.0; ///< quadrature mass over the grid span + declared tail
    double kappa_declared = 0.0;
    bool g1_summable = false;           ///< finite measured mass, consistent with declared
    std::optional<bool> g1_mass_ok;     ///< kappa < gamma, when gamma was supplied
    CheckResult g2;                     ///< g >= 0 and g' <= 0
    CheckResult g3;
    CheckResult dafermos;
    ExpBoundFit exp_bound;
    bool convex = false;                ///< g'' >= 0 everywhere on the grid
    std::size_t grid_points = 0;
    double grid_span = 0.0;
    double tolerance = 0.0;
};

/// Runs the full battery against one kernel.
KernelReport audit_kernel(const MemoryKernel& kernel, double alpha, double delta,
                          std::optional<double> gamma, const AuditGrid& grid);

/// Serialized KernelReport (JSON text).
std::string report_to_json(const KernelReport& report);

} // namespace mgt
