// Acceptance suite: runs every verification criterion end to end and prints
// one pass/fail line per criterion.  Exit status is the number of failures.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mgt/audit.hpp"
#include "mgt/config.hpp"
#include "mgt/csv.hpp"
#include "mgt/energetics.hpp"
#include "mgt/memory_space.hpp"
#include "mgt/pipeline.hpp"

using namespace mgt;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void report(const std::string& id, bool pass, const std::string& detail) {
    std::printf("[%s] %s: %s\n", pass ? "PASS" : "FAIL", id.c_str(), detail.c_str());
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

ExperimentConfig preset(const std::string& name) {
    return ExperimentConfig::load_file(fs::path(MGT_PRESET_DIR) / name);
}

fs::path scratch(const std::string& tag) {
    const fs::path p = fs::temp_directory_path() / ("mgtsim_acceptance_" + tag);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

double seconds_since(const std::chrono::steady_clock::time_point& t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// ---------------------------------------------------------------------------

void criterion_1_oracle_equivalence() {
    const MgtParams p{1.0, 2.0, 1.0};
    const double k = 0.5, nu = 1.0, lambda = 1.0, T = 10.0, dt = 1e-3;
    const State init = random_initial_state(1, 42);

    const auto t0 = std::chrono::steady_clock::now();
    const Trajectory traj = solve(p, make_exponential(k, nu),
                                  Spectrum(std::vector<double>{lambda}), init, 0.0, T, dt);
    const double runtime = seconds_since(t0);
    const ScalarTrajectory oracle =
        oracle_exponential(p, k, nu, lambda, init.u.c[0], init.v.c[0], init.w.c[0], T, dt);
    double du = 0, dv = 0, dw = 0;
    for (std::size_t i = 0; i < traj.steps(); ++i) {
        du = std::max(du, std::abs(traj.u[0][i] - oracle.u[i]));
        dv = std::max(dv, std::abs(traj.v[0][i] - oracle.v[i]));
        dw = std::max(dw, std::abs(traj.w[0][i] - oracle.w[i]));
    }
    const bool pass = du <= 1e-6 && dv <= 1e-6 && dw <= 1e-6 && runtime < 5.0;
    std::ostringstream ss;
    ss << "max gaps (u,v,w) = (" << du << ", " << dv << ", " << dw
       << ") <= 1e-6; solve runtime " << runtime << " s < 5 s";
    report("1 oracle-equivalence", pass, ss.str());
}

struct Example34Runs {
    ExperimentConfig cfg;
    Trajectory traj;
    EnergySeries series;
};

Example34Runs run_example_3_4() {
    Example34Runs out{preset("example_3_4.json"), {}, {}};
    out.traj = solve(out.cfg.params, out.cfg.kernel, out.cfg.spectrum, out.cfg.initial,
                     out.cfg.rho, out.cfg.T, out.cfg.dt);
    EnergyOptions opts;
    opts.stride = out.cfg.energy_stride;
    out.series = compute_energy_series(out.traj, opts);
    return out;
}

void criterion_2_dissipation(const Example34Runs& runs) {
    const double delta = runs.cfg.resolved_delta();
    const DissipationReport full = check_dissipation(runs.traj, runs.series, delta);

    const double dt_half = 0.5 * runs.cfg.dt;
    const Trajectory traj_half = solve(runs.cfg.params, runs.cfg.kernel, runs.cfg.spectrum,
                                       runs.cfg.initial, runs.cfg.rho, runs.cfg.T, dt_half);
    EnergyOptions opts;
    opts.stride = 2 * runs.cfg.energy_stride;
    const EnergySeries series_half = compute_energy_series(traj_half, opts);
    const DissipationReport half = check_dissipation(traj_half, series_half, delta);

    const double floor = 1e-8 * std::max(1.0, std::abs(runs.series.F_rho.front()));
    const double m_full = std::max(0.0, full.max_margin);
    const double m_half = std::max(0.0, half.max_margin);
    const bool stable = m_half <= std::max(0.75 * m_full, floor);
    const bool monotone = full.max_forward_increment <= m_full + floor;
    std::ostringstream ss;
    ss << "max margin = " << full.max_margin << " (dt), " << half.max_margin
       << " (dt/2); C = " << full.C << ", C_half = " << half.C
       << "; max forward dF = " << full.max_forward_increment;
    report("2 dissipation-inequality", stable && monotone, ss.str());
}

void criterion_3_decay(const Example34Runs& runs) {
    const DecayFit fit = fit_decay(runs.series.t, runs.series.E);
    const DecayFit fit_rho = fit_decay(runs.series.t, runs.series.E_rho);
    double m0 = 1.0;
    const double e_rho0 = runs.series.E_rho.front();
    for (std::size_t i = 0; i < runs.series.size(); ++i)
        m0 = std::max(m0, runs.series.E_rho[i] * std::exp(fit_rho.omega * runs.series.t[i]) /
                              e_rho0);
    const double big_m = m0 * (1.0 + runs.traj.kernel->g(0.0));
    double max_e = 0.0;
    for (double e : runs.series.E) max_e = std::max(max_e, e);
    const bool bounded = max_e <= big_m * runs.series.E.front() * (1.0 + 1e-12);
    const bool pass = fit.omega > 0.0 && fit.residual <= 0.05 && bounded;
    std::ostringstream ss;
    ss << "omega = " << fit.omega << " > 0, envelope residual = " << fit.residual
       << " <= 0.05; max E = " << max_e << " <= M E(0) = " << big_m * runs.series.E.front()
       << " (M = M0 [1 + g(0)] = " << big_m << ")";
    report("3 exponential-decay", pass, ss.str());
}

void criterion_4_trichotomy() {
    // (i) subcritical, g = 0: positive fitted decay rate
    bool pass_i = false;
    double omega_i = 0.0;
    {
        const ExperimentConfig cfg = preset("subcritical_mgt.json");
        const Trajectory traj =
            solve(cfg.params, cfg.kernel, cfg.spectrum, cfg.initial, 0.0, cfg.T, cfg.dt);
        EnergyOptions opts;
        opts.stride = cfg.resolved_stride(traj.steps() - 1);
        const EnergySeries series = compute_energy_series(traj, opts);
        const DecayFit fit = fit_decay(series.t, series.E);
        omega_i = fit.omega;
        pass_i = fit.omega > 0.0;
    }
    // (ii) critical: the quadratic invariant is conserved to 1e-6 relative
    bool pass_ii = false;
    double drift = 0.0;
    {
        const ExperimentConfig cfg = preset("critical_mgt.json");
        const Trajectory traj =
            solve(cfg.params, cfg.kernel, cfg.spectrum, cfg.initial, 0.0, cfg.T, cfg.dt);
        const double f0 = critical_invariant(traj, 0);
        for (std::size_t i = 0; i < traj.steps(); ++i)
            drift = std::max(drift, std::abs(critical_invariant(traj, i) - f0) / f0);
        pass_ii = drift <= 1e-6;
    }
    // (iii) supercritical: blow-up recorded, growth rate matches the unstable root
    bool pass_iii = false;
    double rate = 0.0, expected = 0.0, rel = 1.0;
    {
        const ExperimentConfig cfg = preset("supercritical_blowup.json");
        const Trajectory traj =
            solve(cfg.params, cfg.kernel, cfg.spectrum, cfg.initial, 0.0, cfg.T, cfg.dt);
        if (traj.blown_up()) {
            const BlowupEvent& e = traj.events.front();
            const auto roots = characteristic_roots(cfg.params, cfg.spectrum[e.mode]);
            expected = -1e300;
            for (const auto& r : roots) expected = std::max(expected, r.real());
            rate = e.growth_rate;
            rel = std::abs(rate - expected) / expected;
            pass_iii = expected > 0.0 && rel <= 0.02;
        }
    }
    std::ostringstream ss;
    ss << "(i) omega = " << omega_i << " > 0; (ii) drift = " << drift
       << " <= 1e-6; (iii) rate = " << rate << " vs root " << expected << " (rel " << rel
       << " <= 0.02)";
    report("4 regime-trichotomy", pass_i && pass_ii && pass_iii, ss.str());
}

// uniform grid of n cells on (0, s_max] with the kernel breakpoints merged,
// so one-sided g'' values land on nodes and the trapezoid keeps its order
std::vector<double> identity_grid(const MemoryKernel& kern, double s_max, std::size_t n) {
    std::vector<double> s;
    s.reserve(n + 64);
    for (std::size_t i = 1; i <= n; ++i) s.push_back(s_max * double(i) / double(n));
    for (double b : kern.breakpoints(s_max))
        if (b > 0.0) s.push_back(b);
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
    return s;
}

void criterion_5_generator_identity() {
    struct Eta {
        const char* name;
        std::function<double(double)> f, df;
    };
    const std::vector<Eta> etas = {
        {"s e^-s", [](double s) { return s * std::exp(-s); },
         [](double s) { return std::exp(-s) * (1.0 - s); }},
        {"1 - e^-s", [](double s) { return 1.0 - std::exp(-s); },
         [](double s) { return std::exp(-s); }},
        {"s^2 e^-2s", [](double s) { return s * s * std::exp(-2.0 * s); },
         [](double s) { return std::exp(-2.0 * s) * (2.0 * s - 2.0 * s * s); }},
    };
    const std::vector<std::pair<std::string, KernelPtr>> kernels = {
        {"exponential", make_exponential(1.0, 1.0)},
        {"oscillating", make_oscillating()},
        {"staircase", make_staircase(8)},
    };
    const Spectrum one(std::vector<double>{1.0});

    bool pass = true;
    double worst_rel_gap = 0.0, worst_ratio_lo = 1e300, worst_ratio_hi = 0.0;
    for (const auto& [kname, kern] : kernels) {
        const double s_max = kname == "staircase" ? 80.0 : 40.0;
        for (const auto& eta : etas) {
            const auto build = [&](std::size_t n) {
                DomainTElement d;
                d.s = identity_grid(*kern, s_max, n);
                for (double s : d.s) {
                    d.val.push_back(ModalVector{{eta.f(s)}});
                    d.dval.push_back(ModalVector{{eta.df(s)}});
                }
                return d;
            };
            // fine-grid identity
            const GeneratorIdentity fine = generator_identity_check(*kern, one, build(std::size_t{1} << 21));
            const double rel = fine.gap / std::max(1.0, std::abs(fine.lhs));
            worst_rel_gap = std::max(worst_rel_gap, rel);
            if (rel > 1e-8) pass = false;
            // one refinement: the gap decays at least at the O(ds^2) rate
            // (some kernel/eta pairs superconverge when the leading trapezoid
            // coefficients of the two sides coincide)
            const GeneratorIdentity a = generator_identity_check(*kern, one, build(8192));
            const GeneratorIdentity b = generator_identity_check(*kern, one, build(16384));
            const double floor = 1e-13 * std::max(1.0, std::abs(b.lhs));
            const double ratio = a.gap / std::max(b.gap, 1e-300);
            worst_ratio_lo = std::min(worst_ratio_lo, ratio);
            worst_ratio_hi = std::max(worst_ratio_hi, ratio);
            if (ratio < 2.8 && b.gap > floor) pass = false;
        }
    }
    std::ostringstream ss;
    ss << "worst |lhs - rhs| / max(1, |lhs|) = " << worst_rel_gap
       << " <= 1e-8 on the fine grid; refinement gap ratios in [" << worst_ratio_lo << ", "
       << worst_ratio_hi << "] (expect ~4)";
    report("5 generator-identity", pass, ss.str());
}

void criterion_6_kernel_audits() {
    bool pass = true;
    std::ostringstream ss;

    // Example 3.4 kernel, scaled to kappa < gamma = 1 as in the preset
    {
        const auto kern = make_scaled(make_oscillating(), 0.2);
        const KernelReport rep =
            audit_kernel(*kern, 2.0, 1.0, 1.0, make_audit_grid(*kern, 40.0));
        const bool ok = rep.g1_summable && rep.g1_mass_ok.value() && rep.g2.ok && rep.g3.ok &&
                        rep.exp_bound.ok && !rep.convex;
        pass = pass && ok;
        ss << "oscillating: (g1)-(g3) " << (ok ? "pass" : "FAIL") << ", nonconvex flagged; ";
    }
    // staircase: (g3) and the exponential bound hold, the classical
    // differential inequality fails at every tested delta
    {
        const auto kern = make_staircase(8);
        const AuditGrid grid = make_audit_grid(*kern, 80.0);
        const CheckResult g3 = check_g3(*kern, 2.0, 1.0, grid);
        const ExpBoundFit eb = check_exponential_bound(*kern, grid);
        bool ok = g3.ok && eb.ok && eb.omega > 0.9;
        ss << "staircase: g3 " << (g3.ok ? "ok" : "FAIL") << " (margin " << g3.worst_margin
           << "), omega_g = " << eb.omega << "; Dafermos inequality refuted at";
        for (double delta : {0.1, 0.5, 1.0}) {
            const CheckResult daf = check_dafermos(*kern, delta, grid);
            const double base = std::floor(daf.worst_point);
            const int n = static_cast<int>(std::llround(std::sqrt(base)));
            const bool at_ramp = std::abs(base - double(n) * n) <= 1.0;
            ok = ok && !daf.ok && daf.worst_margin > 0.0 && at_ramp;
            ss << " delta=" << delta << "->s=" << daf.worst_point;
        }
        pass = pass && ok;
    }
    report("6 kernel-audits", pass, ss.str());
}

void criterion_7_rho_convergence() {
    const ExperimentConfig cfg = preset("exponential_subcritical.json");
    const ConvergenceResult res = run_convergence(cfg);

    bool gaps_dec = res.rows.size() == 3, proxy_dec = true, limit_dec = true;
    for (std::size_t i = 0; i + 1 < res.rows.size(); ++i) {
        gaps_dec = gaps_dec && res.rows[i + 1].sup_gap < res.rows[i].sup_gap;
        proxy_dec = proxy_dec && res.rows[i + 1].bound_proxy < res.rows[i].bound_proxy;
    }
    // the signed limit gap can cross zero at a fixed probe time, so the
    // surrogate is: final step decreasing and the endpoint below the start
    for (std::size_t c = 0; c < res.probe_times.size(); ++c) {
        const std::size_t last = res.limit_gap.size() - 1;
        limit_dec = limit_dec && res.limit_gap[last][c] < res.limit_gap[last - 1][c] &&
                    res.limit_gap[last][c] < res.limit_gap[0][c];
    }

    std::ostringstream ss;
    ss << "sup gaps =";
    for (const auto& r : res.rows) ss << " " << r.sup_gap;
    ss << " (strictly decreasing: " << gaps_dec << "), proxies decreasing: " << proxy_dec
       << ", limit identity decreasing at t = {1,5,10}: " << limit_dec;
    report("7 rho-convergence", gaps_dec && proxy_dec && limit_dec, ss.str());
}

void criterion_8_bounds_and_presets() {
    const std::vector<std::string> presets = {"example_3_4.json", "critical_mgt.json",
                                              "subcritical_mgt.json",
                                              "supercritical_blowup.json",
                                              "exponential_subcritical.json"};
    bool pass = true;
    std::ostringstream ss;
    for (const auto& name : presets) {
        const ExperimentConfig cfg = preset(name);
        const fs::path dir = scratch("preset_" + name);
        const PipelineResult res = run_experiment(cfg, dir);
        const bool run_ok = res.code == ExitCode::Ok;

        // sandwich constants recorded; Psi2 >= 0 at every emitted sample
        bool constants_ok = false, psi2_ok = true;
        try {
            std::ifstream in(dir / "manifest.json");
            const auto manifest = nlohmann::json::parse(in);
            const auto& c = manifest.at("constants");
            const double c71 = c.at("C71").get<double>();
            const double c82 = c.at("C82").get<double>();
            const double eps = c.at("eps_lambda").get<double>();
            const bool subcritical = cfg.params.varkappa() > 0.0;
            constants_ok = std::isfinite(c71) && std::isfinite(c82) &&
                           (!subcritical || (c71 > 0.0 && eps > 0.0 && c82 >= 0.0));
            const CsvTable energy_table = read_csv(dir / "energy.csv");
            const std::size_t col = energy_table.column("Psi2");
            for (const auto& row : energy_table.rows)
                psi2_ok = psi2_ok && row[col] >= -1e-9 * std::max(1.0, std::abs(row[0]));
        } catch (const std::exception&) {
            constants_ok = false;
        }
        const bool ok = run_ok && constants_ok && psi2_ok;
        pass = pass && ok;
        ss << name << (ok ? " ok" : " FAIL") << "; ";
    }
    report("8 bounds-and-preset-checks", pass, ss.str());
}

void criterion_9_q_bound() {
    std::mt19937_64 rng(2718);
    std::uniform_real_distribution<double> t_dist(0.0, 20.0), rho_dist(1e-3, 2.0),
        k_dist(0.1, 3.0), nu_dist(0.2, 2.0);
    const auto osc = make_oscillating();
    const auto stair = make_staircase(6);
    double worst = -1e300;
    for (int i = 0; i < 1000; ++i) {
        KernelPtr kern;
        switch (i % 3) {
            case 0: kern = make_exponential(k_dist(rng), nu_dist(rng)); break;
            case 1: kern = osc; break;
            default: kern = stair; break;
        }
        const double t = t_dist(rng), rho = rho_dist(rng);
        worst = std::max(worst, Q_rho(*kern, RhoCutoff{rho}, t) - rho * kern->g(t));
    }
    std::ostringstream ss;
    ss << "worst Q_rho(t) - rho g(t) over 1000 random triples = " << worst << " <= 1e-12";
    report("9 Q-rho-bound", worst <= 1e-12, ss.str());
}

} // namespace

int main() {
    const auto t0 = std::chrono::steady_clock::now();
    std::printf("MGT memory acceptance suite\n");

    criterion_1_oracle_equivalence();
    const Example34Runs runs = run_example_3_4();
    criterion_2_dissipation(runs);
    criterion_3_decay(runs);
    criterion_4_trichotomy();
    criterion_5_generator_identity();
    criterion_6_kernel_audits();
    criterion_7_rho_convergence();
    criterion_8_bounds_and_presets();
    criterion_9_q_bound();

    std::printf("total: %s (%.1f s)\n", g_failures == 0 ? "all criteria passed"
                                                        : "FAILURES PRESENT",
                seconds_since(t0));
    return g_failures;
}
