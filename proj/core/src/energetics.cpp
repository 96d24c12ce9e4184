#include "mgt/energetics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mgt/audit.hpp"
#include "mgt/quadrature.hpp"

namespace mgt {

namespace {

constexpr double kTiny = 1e-300;

double decay_factor(double omega_g, double t) {
    if (!std::isfinite(omega_g)) return t == 0.0 ? 1.0 : 0.0;
    return std::exp(-omega_g * t);
}

ExpBound resolve_exp_bound(const Trajectory& traj, const std::optional<ExpBound>& override_bound) {
    if (override_bound) return *override_bound;
    if (auto b = traj.kernel->exp_bound()) return *b;
    // fall back to the audited envelope fit
    const double span = std::max(20.0, 2.0 * traj.duration());
    const auto fit = check_exponential_bound(*traj.kernel, make_audit_grid(*traj.kernel, span));
    if (!fit.ok) throw RegimeError("kernel has no certified exponential bound");
    return ExpBound{fit.M, fit.omega};
}

// Kernel samples on the history grid s_k = k dt, k = 0..n.
struct KernelTables {
    std::vector<double> g, negp, G, expw;
};

KernelTables make_tables(const Trajectory& traj, double omega_g, std::size_t upto) {
    KernelTables t;
    t.g.resize(upto + 1);
    t.negp.resize(upto + 1);
    t.G.resize(upto + 1);
    t.expw.resize(upto + 1);
    const auto& kern = *traj.kernel;
    for (std::size_t k = 0; k <= upto; ++k) {
        const double s = traj.dt * static_cast<double>(k);
        t.g[k] = kern.g(s);
        t.negp[k] = -kern.gp(s);
        t.G[k] = kern.tail(s);
        t.expw[k] = k == 0 ? 1.0 : decay_factor(omega_g, s);
    }
    return t;
}

struct HistoryMoments {
    double h1 = 0; ///< int (-g') ||u(t)-u(t-s)||_1^2
    double h2 = 0; ///< int g ||u(t)-u(t-s)||_1^2
    double h3 = 0; ///< int g <u(t)-u(t-s), u_t(t)>_1
    double h4 = 0; ///< int G(s) ||u(t-s)||_1^2
    double theta = 0;
};

HistoryMoments history_moments(const Trajectory& traj, const KernelTables& tab,
                               const std::vector<double>& u1sq_all, std::size_t i) {
    HistoryMoments m;
    if (i == 0) return m;
    const std::size_t nm = traj.spectrum.size();
    for (std::size_t k = 0; k <= i; ++k) {
        const double wk = traj.dt * ((k == 0 || k == i) ? 0.5 : 1.0);
        double a = 0.0, b = 0.0;
        for (std::size_t j = 0; j < nm; ++j) {
            const double du = traj.u[j][i] - traj.u[j][i - k];
            const double lj = traj.spectrum[j];
            a += lj * du * du;
            b += lj * du * traj.v[j][i];
        }
        m.h1 += wk * tab.negp[k] * a;
        m.h2 += wk * tab.g[k] * a;
        m.h3 += wk * tab.g[k] * b;
        m.h4 += wk * tab.G[k] * u1sq_all[i - k];
        m.theta += wk * tab.expw[k] * u1sq_all[i - k];
    }
    return m;
}

struct TailWeights {
    double Jg1 = 0, Jg2 = 0; ///< int_t^inf (-g')(q-1), (-g')(q-1)^2  (without the flat part)
    double JG1 = 0, JG2 = 0; ///< same with weight g
    double JGG2 = 0;         ///< int_t^inf G(s) (q-1)^2
};

// Integrals of the cutoff factors over [t, t + rho]; (q_rho(s-t) - 1) is -1 on
// the first half and 2(s-t)/rho - 2 on the second.
TailWeights tail_weights(const MemoryKernel& kern, double rho, double t) {
    TailWeights tw;
    if (rho <= 0.0 || kern.is_zero()) return tw;
    const double mid = t + 0.5 * rho, end = t + rho;
    const double a_g = kern.g(t) - kern.g(mid);
    const double a_G = kern.tail(t) - kern.tail(mid);
    const auto phi = [&](double s) { return 2.0 * (s - t) / rho - 2.0; };
    tw.Jg1 = -a_g + gauss8([&](double s) { return -kern.gp(s) * phi(s); }, mid, end);
    tw.Jg2 = a_g + gauss8([&](double s) { return -kern.gp(s) * phi(s) * phi(s); }, mid, end);
    tw.JG1 = -a_G + gauss8([&](double s) { return kern.g(s) * phi(s); }, mid, end);
    tw.JG2 = a_G + gauss8([&](double s) { return kern.g(s) * phi(s) * phi(s); }, mid, end);
    tw.JGG2 = gauss8([&](double s) { return kern.tail(s); }, t, mid) +
              gauss8([&](double s) { return kern.tail(s) * phi(s) * phi(s); }, mid, end);
    return tw;
}

// Everything needed to assemble the functionals at one grid index.
struct PointEval {
    double u1 = 0, v1 = 0, w0 = 0;
    double uv1 = 0, u0u1 = 0, u0v1 = 0;
    double va1 = 0, wa0 = 0;
    double psi1 = 0;
    double g_t = 0, G_t = 0;
    HistoryMoments hm;
    TailWeights tw;
};

PointEval point_eval(const Trajectory& traj, const KernelTables& tab,
                     const std::vector<double>& u1sq_all, std::size_t i) {
    PointEval p;
    const auto& spec = traj.spectrum;
    const double alpha = traj.params.alpha;
    for (std::size_t j = 0; j < spec.size(); ++j) {
        const double lj = spec[j];
        const double u = traj.u[j][i], v = traj.v[j][i], w = traj.w[j][i];
        const double u0 = traj.u[j][0];
        p.u1 += lj * u * u;
        p.v1 += lj * v * v;
        p.w0 += w * w;
        p.uv1 += lj * u * v;
        p.u0u1 += lj * u0 * u;
        p.u0v1 += lj * u0 * v;
        const double va = v + alpha * u;
        const double wa = w + alpha * v;
        p.va1 += lj * va * va;
        p.wa0 += wa * wa;
        p.psi1 += -(v - alpha * u) * wa;
    }
    p.hm = history_moments(traj, tab, u1sq_all, i);
    p.tw = tail_weights(*traj.kernel, traj.rho, traj.time_at(i));
    p.g_t = tab.g[std::min(i, tab.g.size() - 1)];
    p.G_t = tab.G[std::min(i, tab.G.size() - 1)];
    return p;
}

} // namespace

// ---------------------------------------------------------------------------

namespace {

// Assembled functional values at one index.
struct FunctionalValues {
    double E = 0, E_rho = 0, F_rho = 0;
    double psi1 = 0, psi2 = 0, theta = 0;
    double v1_sq = 0, u1_sq = 0, eta_m_sq = 0, g_eta_sq = 0;
};

FunctionalValues assemble(const Trajectory& traj, const KernelTables& tab,
                          const std::vector<double>& u1sq_all, double u0_norm_sq,
                          std::size_t i) {
    const PointEval p = point_eval(traj, tab, u1sq_all, i);
    const auto& prm = traj.params;
    const double kappa = traj.kernel->kappa();
    const double vk = prm.varkappa();

    FunctionalValues f;
    f.u1_sq = p.u1;
    f.v1_sq = p.v1;
    f.eta_m_sq = p.hm.h1 + p.g_t * p.u1 + 2.0 * p.u0u1 * p.tw.Jg1 + u0_norm_sq * p.tw.Jg2;
    f.g_eta_sq = p.hm.h2 + p.G_t * p.u1 + 2.0 * p.u0u1 * p.tw.JG1 + u0_norm_sq * p.tw.JG2;
    const double g_eta_v = p.hm.h3 + p.G_t * p.uv1 + p.u0v1 * p.tw.JG1;

    f.E = p.u1 + p.v1 + p.w0 + p.hm.h1;
    f.E_rho = p.u1 + p.v1 + p.w0 + f.eta_m_sq;
    f.F_rho = (prm.gamma - kappa) / prm.alpha * p.va1 + (vk * prm.alpha + kappa) / prm.alpha * p.v1 +
              p.wa0 + f.eta_m_sq + prm.alpha * f.g_eta_sq + 2.0 * g_eta_v;
    f.psi1 = p.psi1;
    f.psi2 = 0.5 * prm.alpha * (p.hm.h4 + u0_norm_sq * p.tw.JGG2);
    f.theta = p.hm.theta;
    return f;
}

} // namespace

EnergySeries compute_energy_series(const Trajectory& traj, const EnergyOptions& opts) {
    if (traj.steps() == 0) throw ParameterError("empty trajectory");
    const std::size_t stride = std::max<std::size_t>(1, opts.stride);
    const ExpBound bound = resolve_exp_bound(traj, opts.exp_bound);
    const std::size_t n = traj.steps() - 1;

    const KernelTables tab = make_tables(traj, bound.omega, n);
    std::vector<double> u1sq_all(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < traj.spectrum.size(); ++j)
            acc += traj.spectrum[j] * traj.u[j][i] * traj.u[j][i];
        u1sq_all[i] = acc;
    }
    const double u0_norm_sq = u1sq_all[0];

    EnergySeries es;
    es.dt_solver = traj.dt;
    es.ds_history = traj.dt;
    es.dt_series = traj.dt * static_cast<double>(stride);
    es.omega_g = bound.omega;
    es.M_g = bound.M;

    for (std::size_t i = 0; i <= n; i += stride) {
        const FunctionalValues f = assemble(traj, tab, u1sq_all, u0_norm_sq, i);
        es.t.push_back(traj.time_at(i));
        es.E.push_back(f.E);
        es.E_rho.push_back(f.E_rho);
        es.F_rho.push_back(f.F_rho);
        es.Psi1.push_back(f.psi1);
        es.Psi2.push_back(f.psi2);
        es.Psi.push_back(f.psi1 + f.psi2);
        es.Theta.push_back(f.theta);
        es.v1_sq.push_back(f.v1_sq);
        es.u1_sq.push_back(f.u1_sq);
        es.eta_m_sq.push_back(f.eta_m_sq);
        es.g_eta_sq.push_back(f.g_eta_sq);
    }

    // Lambda = F_rho + eps Psi: largest dyadic eps <= 1 satisfying both sides
    // of the sandwich at every sample.
    const double e0 = es.E_rho.front();
    double eps = 1.0;
    bool ok = false;
    for (int k = 0; k <= 80 && !ok; ++k, eps *= 0.5) {
        ok = true;
        for (std::size_t i = 0; i < es.size(); ++i) {
            const double lam = es.F_rho[i] + eps * es.Psi[i];
            const double upper =
                2.0 * es.F_rho[i] + e0 * decay_factor(bound.omega, es.t[i]) + es.Theta[i];
            const double slack = 1e-12 * std::max({1.0, std::abs(lam), es.E_rho[i]});
            if (eps * es.E_rho[i] > lam + slack || lam > upper + slack) {
                ok = false;
                break;
            }
        }
        if (ok) break;
    }
    es.epsilon_lambda = ok ? eps : 0.0;
    es.Lambda.resize(es.size());
    for (std::size_t i = 0; i < es.size(); ++i)
        es.Lambda[i] = es.F_rho[i] + es.epsilon_lambda * es.Psi[i];
    return es;
}

namespace {

FunctionalValues assemble_single(const Trajectory& traj, std::size_t step, double omega_g) {
    if (step >= traj.steps()) throw RangeError("step beyond the end of the trajectory");
    const KernelTables tab = make_tables(traj, omega_g, step == 0 ? 1 : step);
    std::vector<double> u1sq_all(step + 1);
    for (std::size_t i = 0; i <= step; ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < traj.spectrum.size(); ++j)
            acc += traj.spectrum[j] * traj.u[j][i] * traj.u[j][i];
        u1sq_all[i] = acc;
    }
    return assemble(traj, tab, u1sq_all, u1sq_all[0], step);
}

} // namespace

double energy(const Trajectory& traj, std::size_t step) {
    return assemble_single(traj, step, std::numeric_limits<double>::infinity()).E;
}

double regularized_energy(const Trajectory& traj, std::size_t step) {
    return assemble_single(traj, step, std::numeric_limits<double>::infinity()).E_rho;
}

double lyapunov_functional(const Trajectory& traj, std::size_t step) {
    const double vk = traj.params.varkappa();
    if (!(vk > 0.0)) throw RegimeError("F_rho requires the subcritical regime (varkappa > 0)");
    if (!(traj.kernel->kappa() < traj.params.gamma))
        throw RegimeError("F_rho requires kappa < gamma");
    return assemble_single(traj, step, std::numeric_limits<double>::infinity()).F_rho;
}

AuxFunctionals auxiliary_functionals(const Trajectory& traj, std::size_t step,
                                     const ExpBound& bound) {
    if (!(bound.omega > 0.0)) throw ParameterError("auxiliary functionals need omega_g > 0");
    const FunctionalValues f = assemble_single(traj, step, bound.omega);
    return AuxFunctionals{f.psi1, f.psi2, f.psi1 + f.psi2, f.theta};
}

double critical_invariant(const Trajectory& traj, std::size_t step) {
    if (!traj.kernel->is_zero())
        throw RegimeError("the conserved quantity is defined for g == 0 only");
    const double vk = traj.params.varkappa();
    if (std::abs(vk) > 1e-12 * std::max(traj.params.beta, traj.params.gamma / traj.params.alpha))
        throw RegimeError("the conserved quantity is defined on the critical manifold only");
    if (step >= traj.steps()) throw RangeError("step beyond the end of the trajectory");
    const auto& prm = traj.params;
    double va1 = 0.0, wa0 = 0.0;
    for (std::size_t j = 0; j < traj.spectrum.size(); ++j) {
        const double va = traj.v[j][step] + prm.alpha * traj.u[j][step];
        const double wa = traj.w[j][step] + prm.alpha * traj.v[j][step];
        va1 += traj.spectrum[j] * va * va;
        wa0 += wa * wa;
    }
    return prm.gamma / prm.alpha * va1 + wa0;
}

DissipationReport check_dissipation(const Trajectory& traj, const EnergySeries& series,
                                    double delta) {
    if (!(delta > 0.0)) throw ParameterError("dissipation check requires delta > 0");
    if (series.size() < 3) throw ParameterError("dissipation check needs at least 3 samples");
    const double vk = traj.params.varkappa();
    DissipationReport rep;
    rep.allowance = series.dt_solver + series.ds_history;
    const double dts = series.dt_series;
    double worst = -std::numeric_limits<double>::infinity();
    double worst_inc = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i + 1 < series.size(); ++i) {
        const double dF = (series.F_rho[i + 1] - series.F_rho[i - 1]) / (2.0 * dts);
        const double m =
            dF + 2.0 * vk * traj.params.alpha * series.v1_sq[i] + delta * series.eta_m_sq[i];
        rep.t.push_back(series.t[i]);
        rep.margin.push_back(m);
        worst = std::max(worst, m);
    }
    for (std::size_t i = 0; i + 1 < series.size(); ++i)
        worst_inc = std::max(worst_inc, (series.F_rho[i + 1] - series.F_rho[i]) / dts);
    rep.max_margin = worst;
    rep.C = std::max(0.0, worst) / rep.allowance;
    rep.max_forward_increment = worst_inc;
    return rep;
}

DecayFit fit_decay(std::span<const double> t, std::span<const double> y) {
    if (t.size() != y.size() || t.size() < 3)
        throw ParameterError("fit_decay needs matching series with at least 3 samples");
    const double t_hi = t.back();
    const double t_lo = 0.25 * t_hi;

    std::size_t first = 0;
    while (first < t.size() && t[first] < t_lo) ++first;
    if (t.size() - first < 2) throw ParameterError("fit window contains fewer than 2 samples");

    // running maximum envelope, accumulated from the right
    std::vector<double> env(t.size() - first);
    double run = -std::numeric_limits<double>::infinity();
    for (std::size_t i = t.size(); i-- > first;) {
        run = std::max(run, y[i]);
        env[i - first] = run;
    }
    for (double e : env)
        if (!(e > 0.0)) throw FitError("decay fit requires positive values on the window");

    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(env.size());
    for (std::size_t i = 0; i < env.size(); ++i) {
        const double x = t[first + i], ly = std::log(env[i]);
        sx += x;
        sy += ly;
        sxx += x * x;
        sxy += x * ly;
    }
    const double denom = n * sxx - sx * sx;
    const double slope = denom != 0.0 ? (n * sxy - sx * sy) / denom : 0.0;
    const double intercept = (sy - slope * sx) / n;

    DecayFit fit;
    fit.omega = -slope;
    fit.t_lo = t[first];
    fit.t_hi = t_hi;
    // domination excess: how far the envelope pokes above the fitted line
    double res = 0.0;
    for (std::size_t i = 0; i < env.size(); ++i) {
        const double line = std::exp(intercept - fit.omega * t[first + i]);
        res = std::max(res, env[i] / line - 1.0);
    }
    fit.residual = std::max(0.0, res);
    const double y0 = y.front();
    fit.M = std::max(1.0, y0 > 0.0 ? std::exp(intercept) / y0 : 1.0);
    fit.valid = res <= 0.05;
    return fit;
}

SandwichReport measure_sandwich(const EnergySeries& series) {
    SandwichReport rep;
    rep.eps_lambda = series.epsilon_lambda;
    rep.lambda_lower_ok = true;
    rep.lambda_upper_ok = true;
    rep.psi2_min = std::numeric_limits<double>::infinity();
    const double e0 = series.E_rho.empty() ? 0.0 : series.E_rho.front();
    double c71 = 0.0, c82 = 0.0;
    for (std::size_t i = 0; i < series.size(); ++i) {
        const double er = series.E_rho[i], fr = series.F_rho[i];
        if (fr > kTiny) c71 = std::max(c71, er / fr);
        const double upper_ref = er + series.g_eta_sq[i];
        if (upper_ref > kTiny) c71 = std::max(c71, fr / upper_ref);
        const double psi = series.Psi[i];
        if (er > kTiny) c82 = std::max(c82, -psi / er);
        const double den = er + e0 * decay_factor(series.omega_g, series.t[i]) + series.Theta[i];
        if (den > kTiny) c82 = std::max(c82, psi / den);
        rep.psi2_min = std::min(rep.psi2_min, series.Psi2[i]);

        const double lam = series.Lambda[i];
        const double slack = 1e-10 * std::max({1.0, std::abs(lam), er});
        if (series.epsilon_lambda * er > lam + slack) rep.lambda_lower_ok = false;
        if (lam > 2.0 * fr + e0 * decay_factor(series.omega_g, series.t[i]) + series.Theta[i] +
                      slack)
            rep.lambda_upper_ok = false;
    }
    rep.c71 = c71;
    rep.c82 = c82;
    if (!series.E_rho.empty() && series.E_rho.front() > kTiny)
        rep.f0_over_e0 = series.F_rho.front() / series.E_rho.front();
    if (!std::isfinite(rep.psi2_min)) rep.psi2_min = 0.0;
    return rep;
}

} // namespace mgt
