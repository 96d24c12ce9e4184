#pragma once

#include <optional>
#include <span>
#include <vector>

#include "mgt/solver.hpp"

namespace mgt {

/// Sampled values of every energy functional along a trajectory.  All series
/// share the time grid `t` (solver grid thinned by a stride).  Column names
/// follow the emitted CSV.
struct EnergySeries {
    std::vector<double> t;
    std::vector<double> E;      ///< natural energy: phase norms + (-g')-weighted history term
    std::vector<double> E_rho;  ///< phase norms + ||eta^t||_M^2 (regularized history energy)
    std::vector<double> F_rho;  ///< Lyapunov functional of the regularized problem
    std::vector<double> Psi1, Psi2, Psi, Theta, Lambda;

    // auxiliary columns consumed by the inequality checks
    std::vector<double> v1_sq;    ///< ||u_t||_1^2
    std::vector<double> u1_sq;    ///< ||u||_1^2
    std::vector<double> eta_m_sq; ///< ||eta^t||_M^2
    std::vector<double> g_eta_sq; ///< int_0^inf g(s) ||eta^t(s)||_1^2 ds

    double dt_series = 0.0;
    double dt_solver = 0.0;
    double ds_history = 0.0; ///< history quadrature resolution (solver dt)
    double epsilon_lambda = 0.0;
    double omega_g = 0.0, M_g = 0.0;

    std::size_t size() const { return t.size(); }
};

struct EnergyOptions {
    std::size_t stride = 1;
    std::optional<ExpBound> exp_bound; ///< overrides the kernel's analytic bound
};

/// Evaluates every functional on the thinned time grid.  The history
/// integrals use the trapezoidal rule on the stored solver grid (ds = dt);
/// the s > t tail of the eta-integrals is closed in terms of the kernel tail
/// and short Gauss panels over [t, t + rho].  Lambda = F_rho + eps Psi with
/// eps the largest dyadic value keeping eps E_rho <= Lambda <= 2 F_rho +
/// E_rho(0) e^{-omega_g t} + Theta on the whole run.
EnergySeries compute_energy_series(const Trajectory& traj, const EnergyOptions& opts = {});

/// E(t): instantaneous norms plus int_0^t -g'(s) ||u(t) - u(t-s)||_1^2 ds.
double energy(const Trajectory& traj, std::size_t step);

/// E_rho(t): instantaneous norms plus ||eta^t||_M^2.  For rho = 0 this equals
/// E(t) + g(t) ||u(t)||_1^2 identically (the eta representation degenerates).
double regularized_energy(const Trajectory& traj, std::size_t step);

/// F_rho(t), the damped functional driving the exponential decay estimate.
/// Demands the subcritical regime (varkappa > 0, kappa < gamma).
double lyapunov_functional(const Trajectory& traj, std::size_t step);

struct AuxFunctionals {
    double psi1 = 0.0; ///< -( u_t - alpha u, u_tt + alpha u_t )
    double psi2 = 0.0; ///< (alpha/2) int G(s) ||eta^t(s) - u(t)||_1^2 ds  (>= 0)
    double psi = 0.0;  ///< psi1 + psi2
    double theta = 0.0;///< int_0^t e^{-omega_g (t-s)} ||u(s)||_1^2 ds
};

/// The auxiliary functionals; requires a certified exponential bound on g.
AuxFunctionals auxiliary_functionals(const Trajectory& traj, std::size_t step,
                                     const ExpBound& bound);

/// The conserved quantity of the critical memoryless equation
///   F0 = (gamma/alpha) ||u_t + alpha u||_1^2 + ||u_tt + alpha u_t||^2.
/// RegimeError unless g == 0 and varkappa == 0.
double critical_invariant(const Trajectory& traj, std::size_t step);

/// Discrete margins of the dissipation inequality
///   d/dt F_rho + 2 varkappa alpha ||u_t||_1^2 + delta ||eta||_M^2 <= 0,
/// with d/dt central-differenced on the series grid.  A margin of +x means
/// the inequality is violated by x; a compliant run keeps every margin below
/// the discretization allowance C (dt + ds).
struct DissipationReport {
    std::vector<double> t, margin;
    double max_margin = 0.0;           ///< max over interior points (signed)
    double allowance = 0.0;            ///< dt + ds
    double C = 0.0;                    ///< max(0, max_margin) / (dt + ds)
    double max_forward_increment = 0.0;///< max (F_{i+1} - F_i) / dt_series
};
DissipationReport check_dissipation(const Trajectory& traj, const EnergySeries& series,
                                    double delta);

/// Exponential-envelope fit on the window [T/4, T]: least squares through the
/// log of the running maximum envelope.  M is clamped >= 1 and the envelope
/// M y(0) e^{-omega t} dominates the series on the window within `residual`.
struct DecayFit {
    double M = 1.0;
    double omega = 0.0;
    double t_lo = 0.0, t_hi = 0.0;
    double residual = 0.0;
    bool valid = false; ///< residual <= 5%
};
DecayFit fit_decay(std::span<const double> t, std::span<const double> y);

/// Empirical constants of the sandwich inequalities measured along a run:
///   (1/C71) E_rho <= F_rho <= C71 (E_rho + int g ||eta||_1^2)
///   -C82 E_rho <= Psi <= C82 [E_rho + E_rho(0) e^{-omega_g t} + Theta]
///   eps E_rho <= Lambda <= 2 F_rho + E_rho(0) e^{-omega_g t} + Theta
struct SandwichReport {
    double c71 = 0.0;
    double c82 = 0.0;
    double eps_lambda = 0.0;
    double psi2_min = 0.0;
    bool lambda_lower_ok = false;
    bool lambda_upper_ok = false;
    double f0_over_e0 = 0.0; ///< F_rho(0) / E_rho(0)
};
SandwichReport measure_sandwich(const EnergySeries& series);

} // namespace mgt
