#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "mgt/kernels.hpp"
#include "mgt/spectral.hpp"

namespace mgt {

/// Piecewise-linear smoothing profile
///   q_rho(s) = 0 on (0, rho/2),  2s/rho - 1 on [rho/2, rho],  1 beyond,
/// used to replace the constant initial history u0 by q_rho(s) u0.
/// rho == 0 degenerates to q == 1 for s > 0 (no regularization).
struct RhoCutoff {
    double rho = 0.0;

    double q(double s) const {
        if (rho <= 0.0) return s > 0.0 ? 1.0 : 0.0;
        if (s < 0.5 * rho) return 0.0;
        if (s > rho) return 1.0;
        return 2.0 * s / rho - 1.0;
    }
};

/// Q_rho(t) = int_t^inf g(s) [1 - q_rho(s - t)] ds, the compensating forcing
/// of the regularized problem.  Exact for exponential kernels, quadrature
/// otherwise; always satisfies Q_rho(t) <= rho g(t).
double Q_rho(const MemoryKernel& kernel, const RhoCutoff& cutoff, double t);

/// A mode that crossed the blow-up threshold, with the exponential growth
/// rate fitted on the half-window before the crossing.
struct BlowupEvent {
    double time = 0.0;
    std::size_t mode = 0;
    double growth_rate = 0.0;
};

/// Time-stamped multi-mode solution with full history, the source of every
/// energy functional.  Storage is per mode: u[j][i] is mode j at t = i dt.
struct Trajectory {
    MgtParams params;
    KernelPtr kernel;
    Spectrum spectrum{std::vector<double>{1.0}};
    double rho = 0.0;
    double dt = 0.0;
    std::vector<std::vector<double>> u, v, w;
    std::vector<BlowupEvent> events;

    std::size_t steps() const { return u.empty() ? 0 : u.front().size(); }
    double time_at(std::size_t i) const { return dt * static_cast<double>(i); }
    double duration() const { return steps() == 0 ? 0.0 : time_at(steps() - 1); }
    State state_at(std::size_t i) const;
    State initial_state() const { return state_at(0); }
    bool blown_up() const { return !events.empty(); }

    /// Index of the grid time t; ParameterError if t is off-grid,
    /// RangeError if it lies beyond the end.
    std::size_t index_of(double t) const;
};

struct SolveOptions {
    double blowup_threshold = 1e12; ///< H-norm that triggers a blow-up event
    int threads = 1;                ///< per-mode parallelism (deterministic)
};

/// Advances the coupled (u, u_t, u_tt) system mode by mode with a classical
/// 4th-order one-step scheme.  The history convolution
///   int_0^t g(s) u(t - s) ds
/// is evaluated by a product rule: the kernel is integrated exactly against
/// a piecewise-linear reconstruction of u on the uniform grid (the kernel
/// moments per interval are precomputed with Gauss panels).  At the half-step
/// stage times the same rule is applied to half-shifted kernel moments, with
/// the newest partial interval closed by the running stage estimate of u.
/// The quadrature limits the overall convergence order to 2; the stage
/// structure keeps the memoryless part at order 4.
class VolterraStepper {
public:
    VolterraStepper(const MgtParams& params, KernelPtr kernel, const Spectrum& spectrum,
                    const State& initial, double rho, double dt, std::size_t n_steps);

    /// Advance every mode by one time step.
    void step();

    std::size_t index() const { return n_; }
    double time() const { return dt_ * static_cast<double>(n_); }
    State current() const;
    std::span<const double> u_history(std::size_t mode) const;
    std::span<const double> v_history(std::size_t mode) const;
    std::span<const double> w_history(std::size_t mode) const;

    /// Complete per-mode sample arrays (valid after run_mode / full stepping).
    const std::vector<double>& full_u(std::size_t mode) const { return u_[mode]; }
    const std::vector<double>& full_v(std::size_t mode) const { return v_[mode]; }
    const std::vector<double>& full_w(std::size_t mode) const { return w_[mode]; }
    bool frozen(std::size_t mode) const { return frozen_at_[mode] != kNotFrozen; }
    std::size_t frozen_at(std::size_t mode) const { return frozen_at_[mode]; }

    /// Integrate mode j to completion (used for per-mode parallelism).
    void run_mode(std::size_t mode);

    static constexpr std::size_t kNotFrozen = static_cast<std::size_t>(-1);

private:
    void advance_mode(std::size_t mode, std::size_t n);

    MgtParams params_;
    KernelPtr kernel_;
    Spectrum spectrum_;
    double rho_, dt_;
    std::size_t n_steps_, n_ = 0;
    bool memoryless_;
    State initial_;

    // kernel moments: interval [m h, (m+1) h] and half-shifted [m h + h/2, ...]
    std::vector<double> wl_int_, wr_int_, wl_half_, wr_half_;
    double p0_half_ = 0, p1_half_ = 0, p0_full_ = 0, p1_full_ = 0;
    std::vector<double> q_grid_, q_half_; // Q_rho at t_i and t_i + h/2

    std::vector<std::vector<double>> u_, v_, w_; // [mode][step]
    std::vector<double> conv_head_;              // cached conv(t_n) per mode
    std::vector<std::size_t> frozen_at_;
};

/// Integrates the problem over [0, T].  rho > 0 includes the compensating
/// forcing Q_rho(t) lambda_j u0_j; rho == 0 integrates the original
/// (unregularized) equation.  Requires kernel admissibility (kappa < gamma)
/// and dt | T.
Trajectory solve(const MgtParams& params, KernelPtr kernel, const Spectrum& spectrum,
                 const State& initial, double rho, double T, double dt,
                 const SolveOptions& opts = {});

/// The accumulated-difference history variable
///   eta^t(s) = u(t) - u(t-s)                        for s <= t,
///              u(t) + [q_rho(s-t) - 1] u0            for s > t,
/// with u(t-s) linearly interpolated between grid samples.
ModalVector eta_at(const Trajectory& traj, double t, double s);

struct ScalarTrajectory {
    double dt = 0.0;
    std::vector<double> u, v, w;
};

/// Independent oracle for the exponential kernel g = k e^{-nu s}: the modal
/// Volterra equation is differentiated once and the convolution eliminated,
/// leaving the constant-coefficient 4th-order ODE
///   u'''' + (a+nu) u''' + (b l + a nu) u'' + (c + b nu) l u' + l (c nu - k) u = 0
/// (a = alpha, b = beta, c = gamma, l = lambda), with u'''(0) read from the
/// governing equation at t = 0 where the convolution vanishes.  Integrated
/// with a classical 4th-order one-step method; entirely disjoint from the
/// history-quadrature code path.
ScalarTrajectory oracle_exponential(const MgtParams& params, double k, double nu, double lambda,
                                    double u0, double v0, double w0, double T, double dt);

/// Roots of mu^3 + alpha mu^2 + beta lambda mu + gamma lambda (memoryless modal
/// characteristic polynomial).
std::vector<std::complex<double>> characteristic_roots(const MgtParams& params, double lambda);

/// Roots of the oracle's 4th-order characteristic polynomial.
std::vector<std::complex<double>> oracle_characteristic_roots(const MgtParams& params, double k,
                                                              double nu, double lambda);

struct RhoGapRow {
    double rho_fine = 0.0;
    double rho_coarse = 0.0;
    double sup_gap = 0.0;     ///< max_t || z_coarse(t) - z_fine(t) ||_H
    double bound_proxy = 0.0; ///< ||u0||_1^2 [ g(rho_fine/2) - g(rho_coarse) ]
};

/// Runs the regularized problem for each rho in a strictly decreasing list
/// and reports the pairwise sup-norm gaps together with the theoretical
/// Cauchy-bound proxy; both columns must shrink as rho -> 0.
std::vector<RhoGapRow> rho_convergence_study(const MgtParams& params, KernelPtr kernel,
                                             const Spectrum& spectrum, const State& initial,
                                             std::span<const double> rho_list, double T, double dt,
                                             const SolveOptions& opts = {});

/// Product-quadrature value of int_0^t g(s) u(t-s) ds for a complete sampled
/// history (t = (len-1) dt).  Shares the reconstruction rule with the stepper
/// but rebuilds the moments, so it stays usable as a standalone diagnostic.
double convolve_history(const MemoryKernel& kernel, std::span<const double> u_history, double dt);

} // namespace mgt
