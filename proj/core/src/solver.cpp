#include "mgt/solver.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <future>
#include <limits>

#include <Eigen/Eigenvalues>

#include "mgt/quadrature.hpp"

namespace mgt {

namespace {

// Mode states whose H-norm exceeds this are frozen (no longer integrated);
// well above the blow-up threshold so that event detection sees live data.
constexpr double kFreezeNormSq = 1e30;

// Kernel moments against the linear hat weights on [a, a + h].
void interval_moments(const MemoryKernel& kern, double a, double h, double& wl, double& wr) {
    static constexpr std::array<double, 4> x = {
        0.18343464249564980494, 0.52553240991632898582,
        0.79666647741362673959, 0.96028985649753623168};
    static constexpr std::array<double, 4> w = {
        0.36268378337836198297, 0.31370664587788728734,
        0.22238103445337447054, 0.10122853629037625915};
    const double c = a + 0.5 * h;
    const double r = 0.5 * h;
    wl = 0.0;
    wr = 0.0;
    for (int i = 0; i < 4; ++i) {
        for (double sgn : {-1.0, 1.0}) {
            const double s = c + sgn * r * x[i];
            const double gs = kern.g(s);
            const double frac = (s - a) / h; // in [0, 1]
            wl += w[i] * gs * (1.0 - frac);
            wr += w[i] * gs * frac;
        }
    }
    wl *= r;
    wr *= r;
}

// Least-squares slope of log(running-max envelope) -- growth-rate estimator
// for oscillating signals with an exponential envelope.
double fit_growth_rate(double dt, std::span<const double> norm, std::size_t i_lo,
                       std::size_t i_hi) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::size_t count = 0;
    double env = 0.0;
    for (std::size_t i = i_lo; i <= i_hi; ++i) {
        env = std::max(env, norm[i]);
        if (env <= 0.0) continue;
        const double x = dt * static_cast<double>(i);
        const double y = std::log(env);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++count;
    }
    if (count < 2) return 0.0;
    const double n = static_cast<double>(count);
    const double denom = n * sxx - sx * sx;
    return denom != 0.0 ? (n * sxy - sx * sy) / denom : 0.0;
}

} // namespace

// ---------------------------------------------------------------------------
// Q_rho

double Q_rho(const MemoryKernel& kernel, const RhoCutoff& cutoff, double t) {
    if (!(t >= 0.0)) throw ParameterError("Q_rho requires t >= 0");
    const double rho = cutoff.rho;
    if (rho <= 0.0 || kernel.is_zero()) return 0.0;

    if (const auto* e = dynamic_cast<const ExponentialKernel*>(&kernel)) {
        // Piecewise antiderivative, exact.
        const double k = e->amplitude(), nu = e->rate();
        const double eh = std::exp(-nu * rho / 2.0), ef = std::exp(-nu * rho);
        const double part1 = k / nu * (1.0 - eh);
        const double part2 =
            2.0 * k * (ef / (rho * nu * nu) + eh * (0.5 / nu - 1.0 / (rho * nu * nu)));
        return std::exp(-nu * t) * (part1 + part2);
    }

    // 1 - q_rho(s - t) is 1 on [t, t + rho/2] and 2 - 2(s-t)/rho on the rest.
    const double part1 = kernel.tail(t) - kernel.tail(t + 0.5 * rho);
    const double scale = rho * kernel.g(t);
    if (scale < 1e-300) return part1;
    const double part2 = adaptive_simpson(
        [&](double s) { return kernel.g(s) * (2.0 - 2.0 * (s - t) / rho); }, t + 0.5 * rho,
        t + rho, 1e-12 * scale);
    return part1 + part2;
}

// ---------------------------------------------------------------------------
// Trajectory

State Trajectory::state_at(std::size_t i) const {
    const std::size_t n = spectrum.size();
    State z = State::zero(n);
    for (std::size_t j = 0; j < n; ++j) {
        z.u.c[j] = u[j][i];
        z.v.c[j] = v[j][i];
        z.w.c[j] = w[j][i];
    }
    return z;
}

std::size_t Trajectory::index_of(double t) const {
    if (t < 0.0) throw RangeError("time before the start of the trajectory");
    const auto i = static_cast<std::size_t>(std::llround(t / dt));
    if (std::abs(static_cast<double>(i) * dt - t) > 1e-9 * std::max(1.0, std::abs(t)))
        throw ParameterError("time is not on the trajectory grid");
    if (i >= steps()) throw RangeError("time beyond the end of the trajectory");
    return i;
}

// ---------------------------------------------------------------------------
// VolterraStepper

VolterraStepper::VolterraStepper(const MgtParams& params, KernelPtr kernel,
                                 const Spectrum& spectrum, const State& initial, double rho,
                                 double dt, std::size_t n_steps)
    : params_(params),
      kernel_(std::move(kernel)),
      spectrum_(spectrum),
      rho_(rho),
      dt_(dt),
      n_steps_(n_steps),
      initial_(initial) {
    params_.validate();
    if (!kernel_) throw ParameterError("stepper requires a kernel");
    if (!(dt > 0.0)) throw ParameterError("dt must be positive");
    if (rho < 0.0) throw ParameterError("rho must be nonnegative");
    const std::size_t nm = spectrum_.size();
    if (initial.u.size() != nm || initial.v.size() != nm || initial.w.size() != nm)
        throw ParameterError("initial data dimension does not match the spectrum");

    memoryless_ = kernel_->is_zero();
    u_.assign(nm, std::vector<double>(n_steps_ + 1, 0.0));
    v_.assign(nm, std::vector<double>(n_steps_ + 1, 0.0));
    w_.assign(nm, std::vector<double>(n_steps_ + 1, 0.0));
    for (std::size_t j = 0; j < nm; ++j) {
        u_[j][0] = initial.u.c[j];
        v_[j][0] = initial.v.c[j];
        w_[j][0] = initial.w.c[j];
    }
    conv_head_.assign(nm, 0.0);
    frozen_at_.assign(nm, kNotFrozen);

    if (!memoryless_ && n_steps_ > 0) {
        wl_int_.resize(n_steps_);
        wr_int_.resize(n_steps_);
        wl_half_.resize(n_steps_);
        wr_half_.resize(n_steps_);
        for (std::size_t m = 0; m < n_steps_; ++m) {
            const double md = static_cast<double>(m);
            interval_moments(*kernel_, md * dt_, dt_, wl_int_[m], wr_int_[m]);
            interval_moments(*kernel_, md * dt_ + 0.5 * dt_, dt_, wl_half_[m], wr_half_[m]);
        }
        p0_half_ = gauss8([&](double s) { return kernel_->g(s); }, 0.0, 0.5 * dt_);
        p1_half_ = gauss8([&](double s) { return kernel_->g(s) * s; }, 0.0, 0.5 * dt_);
        p0_full_ = gauss8([&](double s) { return kernel_->g(s); }, 0.0, dt_);
        p1_full_ = gauss8([&](double s) { return kernel_->g(s) * s; }, 0.0, dt_);

        if (rho_ > 0.0) {
            const RhoCutoff cut{rho_};
            q_grid_.resize(n_steps_ + 1);
            q_half_.resize(n_steps_);
            for (std::size_t i = 0; i <= n_steps_; ++i)
                q_grid_[i] = Q_rho(*kernel_, cut, static_cast<double>(i) * dt_);
            for (std::size_t i = 0; i < n_steps_; ++i)
                q_half_[i] = Q_rho(*kernel_, cut, (static_cast<double>(i) + 0.5) * dt_);
        }
    }
}

void VolterraStepper::advance_mode(std::size_t j, std::size_t n) {
    auto& uu = u_[j];
    auto& vv = v_[j];
    auto& ww = w_[j];
    if (frozen_at_[j] <= n) {
        uu[n + 1] = uu[n];
        vv[n + 1] = vv[n];
        ww[n + 1] = ww[n];
        return;
    }

    const double lam = spectrum_[j];
    const double a = params_.alpha, b = params_.beta, c = params_.gamma;
    const double h = dt_;
    const double u0j = initial_.u.c[j];
    const bool forced = rho_ > 0.0 && !memoryless_;

    const double un = uu[n], vn = vv[n], wn = ww[n];

    // rhs of the first-order system at (tau, y) with a given convolution value
    const auto accel = [&](double u, double v, double w, double conv, double qf) {
        return -a * w - b * lam * v - c * lam * u + lam * conv + lam * qf * u0j;
    };

    double conv1 = 0.0, sh = 0.0, s4 = 0.0;
    if (!memoryless_) {
        conv1 = conv_head_[j];
        for (std::size_t m = 0; m < n; ++m)
            sh += uu[n - m] * wl_half_[m] + uu[n - 1 - m] * wr_half_[m];
        for (std::size_t m = 1; m <= n; ++m)
            s4 += uu[n + 1 - m] * wl_int_[m] + uu[n - m] * wr_int_[m];
    }
    const auto conv_half = [&](double u_stage) {
        if (memoryless_) return 0.0;
        return sh + u_stage * p0_half_ + (un - u_stage) * (2.0 / h) * p1_half_;
    };
    const auto conv_full = [&](double u_stage) {
        if (memoryless_) return 0.0;
        return s4 + u_stage * p0_full_ + (un - u_stage) * (1.0 / h) * p1_full_;
    };

    const double q1 = forced ? q_grid_[n] : 0.0;
    const double qh = forced ? q_half_[n] : 0.0;
    const double q4 = forced ? q_grid_[n + 1] : 0.0;

    // classical 4-stage scheme
    const double k1u = vn, k1v = wn, k1w = accel(un, vn, wn, conv1, q1);

    const double u2 = un + 0.5 * h * k1u, v2 = vn + 0.5 * h * k1v, w2 = wn + 0.5 * h * k1w;
    const double k2u = v2, k2v = w2, k2w = accel(u2, v2, w2, conv_half(u2), qh);

    const double u3 = un + 0.5 * h * k2u, v3 = vn + 0.5 * h * k2v, w3 = wn + 0.5 * h * k2w;
    const double k3u = v3, k3v = w3, k3w = accel(u3, v3, w3, conv_half(u3), qh);

    const double u4 = un + h * k3u, v4 = vn + h * k3v, w4 = wn + h * k3w;
    const double k4u = v4, k4v = w4, k4w = accel(u4, v4, w4, conv_full(u4), q4);

    const double un1 = un + h / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
    const double vn1 = vn + h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
    const double wn1 = wn + h / 6.0 * (k1w + 2.0 * k2w + 2.0 * k3w + k4w);
    uu[n + 1] = un1;
    vv[n + 1] = vn1;
    ww[n + 1] = wn1;

    if (!memoryless_)
        conv_head_[j] = s4 + un1 * wl_int_[0] + un * wr_int_[0];

    const double norm_sq = lam * (un1 * un1 + vn1 * vn1) + wn1 * wn1;
    if (!(norm_sq < kFreezeNormSq)) frozen_at_[j] = n + 1;
}

void VolterraStepper::step() {
    if (n_ >= n_steps_) throw RangeError("stepper already at the final time");
    for (std::size_t j = 0; j < spectrum_.size(); ++j) advance_mode(j, n_);
    ++n_;
}

void VolterraStepper::run_mode(std::size_t j) {
    for (std::size_t n = 0; n < n_steps_; ++n) advance_mode(j, n);
}

State VolterraStepper::current() const {
    State z = State::zero(spectrum_.size());
    for (std::size_t j = 0; j < spectrum_.size(); ++j) {
        z.u.c[j] = u_[j][n_];
        z.v.c[j] = v_[j][n_];
        z.w.c[j] = w_[j][n_];
    }
    return z;
}

std::span<const double> VolterraStepper::u_history(std::size_t mode) const {
    return {u_[mode].data(), n_ + 1};
}
std::span<const double> VolterraStepper::v_history(std::size_t mode) const {
    return {v_[mode].data(), n_ + 1};
}
std::span<const double> VolterraStepper::w_history(std::size_t mode) const {
    return {w_[mode].data(), n_ + 1};
}

// ---------------------------------------------------------------------------
// solve

Trajectory solve(const MgtParams& params, KernelPtr kernel, const Spectrum& spectrum,
                 const State& initial, double rho, double T, double dt, const SolveOptions& opts) {
    params.validate();
    if (!kernel) throw ParameterError("solve requires a kernel");
    if (!(T >= 0.0)) throw ParameterError("T must be nonnegative");
    const double kappa = kernel->kappa();
    if (!(kappa < params.gamma))
        throw ParameterError("inadmissible kernel: mass kappa = " + std::to_string(kappa) +
                             " >= gamma = " + std::to_string(params.gamma));
    const auto n_steps = static_cast<std::size_t>(std::llround(T / dt));
    if (std::abs(static_cast<double>(n_steps) * dt - T) > 1e-9 * std::max(1.0, T))
        throw ParameterError("dt must divide T");

    VolterraStepper stepper(params, kernel, spectrum, initial, rho, dt, n_steps);

    const std::size_t nm = spectrum.size();
    const int threads = std::max(1, opts.threads);
    if (threads == 1 || nm == 1) {
        for (std::size_t j = 0; j < nm; ++j) stepper.run_mode(j);
    } else {
        std::vector<std::future<void>> futures;
        std::atomic<std::size_t> next{0};
        const int workers = std::min<int>(threads, static_cast<int>(nm));
        for (int t = 0; t < workers; ++t)
            futures.push_back(std::async(std::launch::async, [&] {
                for (std::size_t j = next.fetch_add(1); j < nm; j = next.fetch_add(1))
                    stepper.run_mode(j);
            }));
        for (auto& f : futures) f.get();
    }

    Trajectory traj;
    traj.params = params;
    traj.kernel = std::move(kernel);
    traj.spectrum = spectrum;
    traj.rho = rho;
    traj.dt = dt;
    traj.u.reserve(nm);
    traj.v.reserve(nm);
    traj.w.reserve(nm);
    for (std::size_t j = 0; j < nm; ++j) {
        // full histories, including frozen padding after a blow-up
        traj.u.push_back(stepper.full_u(j));
        traj.v.push_back(stepper.full_v(j));
        traj.w.push_back(stepper.full_w(j));
    }

    // Blow-up events: first crossing of the threshold per mode.
    for (std::size_t j = 0; j < nm; ++j) {
        const double lam = spectrum[j];
        std::vector<double> norm(n_steps + 1);
        std::size_t cross = VolterraStepper::kNotFrozen;
        for (std::size_t i = 0; i <= n_steps; ++i) {
            const double uu = traj.u[j][i], vv = traj.v[j][i], ww = traj.w[j][i];
            norm[i] = std::sqrt(lam * (uu * uu + vv * vv) + ww * ww);
            if (cross == VolterraStepper::kNotFrozen && norm[i] > opts.blowup_threshold) cross = i;
        }
        if (cross != VolterraStepper::kNotFrozen) {
            const double rate = fit_growth_rate(dt, norm, cross / 2, cross);
            traj.events.push_back({traj.time_at(cross), j, rate});
        }
    }
    std::sort(traj.events.begin(), traj.events.end(),
              [](const BlowupEvent& a, const BlowupEvent& b) { return a.time < b.time; });
    return traj;
}

// ---------------------------------------------------------------------------
// eta_at

ModalVector eta_at(const Trajectory& traj, double t, double s) {
    const std::size_t it = traj.index_of(t);
    if (!(s >= 0.0)) throw ParameterError("eta_at requires s >= 0");
    const std::size_t nm = traj.spectrum.size();
    ModalVector out = ModalVector::zero(nm);
    if (s <= t) {
        // u(t) - u(t-s), linear interpolation between grid samples
        const double tau = t - s;
        const double pos = tau / traj.dt;
        auto i0 = static_cast<std::size_t>(std::floor(pos));
        if (i0 >= it) i0 = it > 0 ? it - 1 : 0;
        const double frac = std::clamp(pos - static_cast<double>(i0), 0.0, 1.0);
        for (std::size_t j = 0; j < nm; ++j) {
            const double uts =
                traj.u[j][i0] + frac * (traj.u[j][std::min(i0 + 1, it)] - traj.u[j][i0]);
            out.c[j] = traj.u[j][it] - uts;
        }
    } else {
        const RhoCutoff cut{traj.rho};
        const double fac = cut.q(s - t) - 1.0;
        for (std::size_t j = 0; j < nm; ++j)
            out.c[j] = traj.u[j][it] + fac * traj.u[j][0];
    }
    return out;
}

// ---------------------------------------------------------------------------
// Exponential-kernel oracle

ScalarTrajectory oracle_exponential(const MgtParams& params, double k, double nu, double lambda,
                                    double u0, double v0, double w0, double T, double dt) {
    params.validate();
    if (!(nu > 0.0) || k < 0.0)
        throw ParameterError("oracle requires nu > 0 and k >= 0");
    const auto n = static_cast<std::size_t>(std::llround(T / dt));
    if (std::abs(static_cast<double>(n) * dt - T) > 1e-9 * std::max(1.0, T))
        throw ParameterError("dt must divide T");

    const double a = params.alpha, b = params.beta, c = params.gamma;
    const double c3 = a + nu;
    const double c2 = b * lambda + a * nu;
    const double c1 = (c + b * nu) * lambda;
    const double c0 = lambda * (c * nu - k);

    std::array<double, 4> x = {u0, v0, w0, -a * w0 - b * lambda * v0 - c * lambda * u0};
    const auto rhs = [&](const std::array<double, 4>& y) {
        return std::array<double, 4>{y[1], y[2], y[3],
                                     -c3 * y[3] - c2 * y[2] - c1 * y[1] - c0 * y[0]};
    };

    ScalarTrajectory out;
    out.dt = dt;
    out.u.resize(n + 1);
    out.v.resize(n + 1);
    out.w.resize(n + 1);
    out.u[0] = u0;
    out.v[0] = v0;
    out.w[0] = w0;
    for (std::size_t i = 0; i < n; ++i) {
        const auto k1 = rhs(x);
        std::array<double, 4> y2, y3, y4;
        for (int d = 0; d < 4; ++d) y2[d] = x[d] + 0.5 * dt * k1[d];
        const auto k2 = rhs(y2);
        for (int d = 0; d < 4; ++d) y3[d] = x[d] + 0.5 * dt * k2[d];
        const auto k3 = rhs(y3);
        for (int d = 0; d < 4; ++d) y4[d] = x[d] + dt * k3[d];
        const auto k4 = rhs(y4);
        for (int d = 0; d < 4; ++d)
            x[d] += dt / 6.0 * (k1[d] + 2.0 * k2[d] + 2.0 * k3[d] + k4[d]);
        out.u[i + 1] = x[0];
        out.v[i + 1] = x[1];
        out.w[i + 1] = x[2];
    }
    return out;
}

namespace {

std::vector<std::complex<double>> companion_roots(const std::vector<double>& monic_coeffs) {
    // monic_coeffs = {c_{d-1}, ..., c_1, c_0} for mu^d + c_{d-1} mu^{d-1} + ... + c_0
    const auto d = static_cast<Eigen::Index>(monic_coeffs.size());
    Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(d, d);
    for (Eigen::Index i = 1; i < d; ++i) comp(i, i - 1) = 1.0;
    for (Eigen::Index i = 0; i < d; ++i) comp(i, d - 1) = -monic_coeffs[static_cast<std::size_t>(d - 1 - i)];
    Eigen::EigenSolver<Eigen::MatrixXd> es(comp, /*computeEigenvectors=*/false);
    std::vector<std::complex<double>> roots(static_cast<std::size_t>(d));
    for (Eigen::Index i = 0; i < d; ++i) roots[static_cast<std::size_t>(i)] = es.eigenvalues()[i];
    std::sort(roots.begin(), roots.end(), [](auto l, auto r) {
        return l.real() != r.real() ? l.real() < r.real() : l.imag() < r.imag();
    });
    return roots;
}

} // namespace

std::vector<std::complex<double>> characteristic_roots(const MgtParams& params, double lambda) {
    return companion_roots({params.alpha, params.beta * lambda, params.gamma * lambda});
}

std::vector<std::complex<double>> oracle_characteristic_roots(const MgtParams& params, double k,
                                                              double nu, double lambda) {
    const double a = params.alpha, b = params.beta, c = params.gamma;
    return companion_roots(
        {a + nu, b * lambda + a * nu, (c + b * nu) * lambda, lambda * (c * nu - k)});
}

// ---------------------------------------------------------------------------
// rho-convergence study

std::vector<RhoGapRow> rho_convergence_study(const MgtParams& params, KernelPtr kernel,
                                             const Spectrum& spectrum, const State& initial,
                                             std::span<const double> rho_list, double T, double dt,
                                             const SolveOptions& opts) {
    if (rho_list.size() < 2)
        throw ParameterError("rho convergence study needs at least two rho values");
    for (std::size_t i = 0; i + 1 < rho_list.size(); ++i)
        if (!(rho_list[i] > rho_list[i + 1]) || !(rho_list[i + 1] > 0.0))
            throw ParameterError("rho_list must be strictly decreasing and positive");

    std::vector<Trajectory> runs;
    runs.reserve(rho_list.size());
    for (double rho : rho_list)
        runs.push_back(solve(params, kernel, spectrum, initial, rho, T, dt, opts));

    const double u0_norm_sq = sigma_norm_sq(spectrum, initial.u, 1.0);
    std::vector<RhoGapRow> rows;
    for (std::size_t i = 0; i + 1 < runs.size(); ++i) {
        const Trajectory& coarse = runs[i];
        const Trajectory& fine = runs[i + 1];
        double gap = 0.0;
        for (std::size_t n = 0; n < coarse.steps(); ++n) {
            double d = 0.0;
            for (std::size_t j = 0; j < spectrum.size(); ++j) {
                const double du = coarse.u[j][n] - fine.u[j][n];
                const double dv = coarse.v[j][n] - fine.v[j][n];
                const double dw = coarse.w[j][n] - fine.w[j][n];
                d += spectrum[j] * (du * du + dv * dv) + dw * dw;
            }
            gap = std::max(gap, std::sqrt(d));
        }
        const double proxy =
            u0_norm_sq * (kernel->g(0.5 * rho_list[i + 1]) - kernel->g(rho_list[i]));
        rows.push_back({rho_list[i + 1], rho_list[i], gap, proxy});
    }
    return rows;
}

// ---------------------------------------------------------------------------
// standalone convolution

double convolve_history(const MemoryKernel& kernel, std::span<const double> u_history, double dt) {
    if (u_history.empty()) throw ParameterError("convolve_history requires at least one sample");
    if (kernel.is_zero() || u_history.size() == 1) return 0.0;
    const std::size_t n = u_history.size() - 1;
    double acc = 0.0;
    for (std::size_t m = 0; m < n; ++m) {
        double wl = 0.0, wr = 0.0;
        interval_moments(kernel, static_cast<double>(m) * dt, dt, wl, wr);
        acc += u_history[n - m] * wl + u_history[n - 1 - m] * wr;
    }
    return acc;
}

} // namespace mgt
