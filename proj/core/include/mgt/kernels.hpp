#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "mgt/errors.hpp"

namespace mgt {

/// Exponential dominator g(s) <= M * exp(-omega * s).
struct ExpBound {
    double M = 0.0;
    double omega = 0.0;
};

/// A fading-memory relaxation kernel g : (0, inf) -> [0, inf).
///
/// The standing hypotheses are
///   (g1)  g, g' summable and the total mass kappa = int_0^inf g < gamma,
///   (g2)  g >= 0 and g' <= 0,
///   (g3)  (alpha - delta) g'(s) - g''(s) <= 0 a.e. for some 0 < delta < alpha,
/// and the derived tail G(s) = int_s^inf g(y) dy.  Second derivatives are
/// understood a.e.; at kink points of piecewise kernels one-sided values are
/// used (the right-sided value by default).
///
/// Kernels are immutable after construction and safe to share across threads.
class MemoryKernel {
public:
    virtual ~MemoryKernel() = default;

    virtual double g(double s) const = 0;
    virtual double gp(double s) const = 0;  ///< g'(s)
    virtual double gpp(double s) const = 0; ///< g''(s), a.e.; right-sided at kinks

    /// One-sided second derivative at s; equals gpp(s) for smooth kernels.
    virtual double gpp_side(double s, bool from_right) const {
        (void)from_right;
        return gpp(s);
    }

    /// Total mass kappa = int_0^inf g(s) ds.
    virtual double kappa() const = 0;

    /// Tail G(s) = int_s^inf g(y) dy.  G(0) = kappa, G nonincreasing.
    virtual double tail(double s) const = 0;

    virtual bool is_zero() const { return false; }

    /// A delta in (0, alpha) for which (g3) is certified analytically, if any.
    virtual std::optional<double> g3_delta(double alpha) const {
        (void)alpha;
        return std::nullopt;
    }

    /// Analytic exponential dominator, if one is known.
    virtual std::optional<ExpBound> exp_bound() const { return std::nullopt; }

    /// Locations where the kernel definition changes piece (kinks of g', g'').
    virtual std::vector<double> breakpoints(double s_max) const {
        (void)s_max;
        return {};
    }

    /// Extra probe points an audit grid should contain (defaults to breakpoints).
    virtual std::vector<double> audit_points(double s_max) const { return breakpoints(s_max); }

    // Log-scale evaluation hooks for kernels whose values underflow doubles.
    // Conditions on such kernels are checked through ratios, never raw values.
    virtual bool has_log_scale() const { return false; }
    virtual double log_g(double s) const;
    virtual double log_neg_gp(double s) const;
    /// g''(s) / g'(s); with f = -g' this is f'(s)/f(s), well defined where g' < 0.
    virtual double gpp_over_gp(double s) const;

    virtual std::string describe() const = 0;
};

using KernelPtr = std::shared_ptr<const MemoryKernel>;

/// g(s) = k exp(-nu s).  Mass k/nu, tail (k/nu) exp(-nu s), all exact.
class ExponentialKernel final : public MemoryKernel {
public:
    ExponentialKernel(double k, double nu);

    double g(double s) const override;
    double gp(double s) const override;
    double gpp(double s) const override;
    double kappa() const override;
    double tail(double s) const override;
    std::optional<double> g3_delta(double alpha) const override;
    std::optional<ExpBound> exp_bound() const override;
    std::string describe() const override;

    double amplitude() const { return k_; }
    double rate() const { return nu_; }

private:
    double k_;
    double nu_;
};

/// Fixed-form nonconvex kernel
///   g(s) = (1/37) e^{-s} [148 + 6 cos 6s + sin 6s],
/// whose derivative oscillates all over (0, inf) so that g is not convex,
/// yet g' - g'' = -e^{-s} [8 + 2 sin 6s - 6 cos 6s] <= 0, i.e. (g3) holds
/// with alpha - delta = 1.
class OscillatingKernel final : public MemoryKernel {
public:
    OscillatingKernel() = default;

    double g(double s) const override;
    double gp(double s) const override;
    double gpp(double s) const override;
    double kappa() const override;
    double tail(double s) const override;
    std::optional<double> g3_delta(double alpha) const override;
    std::optional<ExpBound> exp_bound() const override;
    std::string describe() const override;
};

/// Nonconvex kernel built from a density f with staircase ramps:
///   g(s) = int_s^inf f(y) dy,
/// where f(s) = eps_n + eps_n (s - n^2) on I_n = [n^2, n^2 + n + 1] for
/// n = 2..n_max with eps_n = e^{-(n^2+n+1)}/(n+2), and f is a decreasing
/// exponential outside the ramps: e^{-s} where that is continuous, with a
/// steeper log-linear drop on [n^2 - 1, n^2] bridging down to eps_n.  Then
/// 0 < f <= e^{-s} everywhere, g' = -f increases in magnitude on each I_n
/// (so g is not convex), (g3) holds with alpha - delta = 1, yet the
/// Dafermos inequality g' + delta g <= 0 fails on every I_n with n large
/// enough, for any fixed delta > 0.
///
/// All internal arithmetic is carried in (log-magnitude, sign) form: eps_n
/// underflows double precision near n = 26, and the audit conditions on this
/// kernel are ratio statements that remain meaningful in log scale.
class StaircaseKernel final : public MemoryKernel {
public:
    explicit StaircaseKernel(int n_max);

    double g(double s) const override;
    double gp(double s) const override;
    double gpp(double s) const override;
    double gpp_side(double s, bool from_right) const override;
    double kappa() const override;
    double tail(double s) const override;
    std::optional<double> g3_delta(double alpha) const override;
    std::optional<ExpBound> exp_bound() const override;
    std::vector<double> breakpoints(double s_max) const override;
    std::vector<double> audit_points(double s_max) const override;

    bool has_log_scale() const override { return true; }
    double log_g(double s) const override;
    double log_neg_gp(double s) const override;
    double gpp_over_gp(double s) const override;

    /// log f(s) = log(-g'(s)); exposed for ratio-based checks and tests.
    double log_f(double s) const;

    int n_max() const { return n_max_; }
    std::string describe() const override;

private:
    struct Piece {
        double lo, hi;
        bool affine;     // affine ramp eps_n (1 + s - n^2); otherwise log-linear
        double log_eps;  // affine: log eps_n
        double n_sq;     // affine: n^2
        double log_f_lo; // log-linear: log f at lo
        double slope;    // log-linear: d(log f)/ds  (negative)
        double log_mass;     // log int_{lo}^{hi} f
        double log_first;    // log int_{lo}^{hi} (y - lo) f(y) dy
        double log_tail_g;   // log int_{lo}^inf f        (suffix)
        double log_tail_gp;  // suffix P: int (y - lo) f  accumulated, see .cpp
    };

    std::size_t piece_index(double s) const;
    double log_f_in(const Piece& p, double s) const;
    double log_partial_mass(const Piece& p, double s) const;          // log int_s^{hi} f
    double log_partial_first(const Piece& p, double s) const;         // log int_s^{hi} (y-s) f

    int n_max_;
    std::vector<Piece> pieces_;
};

/// The identically-zero kernel (memoryless dynamics).
class ZeroKernel final : public MemoryKernel {
public:
    double g(double) const override { return 0.0; }
    double gp(double) const override { return 0.0; }
    double gpp(double) const override { return 0.0; }
    double kappa() const override { return 0.0; }
    double tail(double) const override { return 0.0; }
    bool is_zero() const override { return true; }
    std::optional<double> g3_delta(double alpha) const override { return 0.5 * alpha; }
    std::optional<ExpBound> exp_bound() const override;
    std::string describe() const override { return "zero"; }
};

/// Piecewise-linear kernel from samples (s_i, g_i) at strictly increasing
/// s_i > 0; g is extended by g_0 on (0, s_0] and by 0 beyond the last sample.
/// g'' = 0 a.e.; mass and tail are exact for the interpolant.
class TabulatedKernel final : public MemoryKernel {
public:
    TabulatedKernel(std::vector<double> s, std::vector<double> g);

    double g(double s) const override;
    double gp(double s) const override;
    double gpp(double) const override { return 0.0; }
    double kappa() const override;
    double tail(double s) const override;
    std::vector<double> breakpoints(double s_max) const override;
    std::string describe() const override;

private:
    std::vector<double> s_, g_;
    std::vector<double> tail_; // tail at each node, exact piecewise-quadratic
};

/// c * g for a positive constant c; forwards certified hypotheses of g.
class ScaledKernel final : public MemoryKernel {
public:
    ScaledKernel(KernelPtr inner, double scale);

    double g(double s) const override { return c_ * inner_->g(s); }
    double gp(double s) const override { return c_ * inner_->gp(s); }
    double gpp(double s) const override { return c_ * inner_->gpp(s); }
    double gpp_side(double s, bool r) const override { return c_ * inner_->gpp_side(s, r); }
    double kappa() const override { return c_ * inner_->kappa(); }
    double tail(double s) const override { return c_ * inner_->tail(s); }
    bool is_zero() const override { return inner_->is_zero(); }
    std::optional<double> g3_delta(double alpha) const override { return inner_->g3_delta(alpha); }
    std::optional<ExpBound> exp_bound() const override;
    std::vector<double> breakpoints(double s_max) const override { return inner_->breakpoints(s_max); }
    std::vector<double> audit_points(double s_max) const override { return inner_->audit_points(s_max); }
    bool has_log_scale() const override { return inner_->has_log_scale(); }
    double log_g(double s) const override;
    double log_neg_gp(double s) const override;
    double gpp_over_gp(double s) const override { return inner_->gpp_over_gp(s); }
    std::string describe() const override;

private:
    KernelPtr inner_;
    double c_;
};

KernelPtr make_exponential(double k, double nu);
KernelPtr make_oscillating();
KernelPtr make_staircase(int n_max);
KernelPtr make_zero();
KernelPtr make_tabulated(std::vector<double> s, std::vector<double> g);
KernelPtr make_scaled(KernelPtr inner, double scale);

/// G(s) = int_s^inf g(y) dy; exact for closed-form kernels.
double tail_integral(const MemoryKernel& kernel, double s);

} // namespace mgt
