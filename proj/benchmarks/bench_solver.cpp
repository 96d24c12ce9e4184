#include <benchmark/benchmark.h>

#include "mgt/config.hpp"
#include "mgt/energetics.hpp"
#include "mgt/solver.hpp"

using namespace mgt;

namespace {

// cost of a full integration as the history (and the per-step convolution
// sums) grow with the number of steps
void BM_solve_history_growth(benchmark::State& state) {
    const MgtParams p{1.0, 2.0, 1.0};
    const auto kern = make_exponential(0.5, 1.0);
    const Spectrum spec(std::vector<double>{1.0});
    const State init = random_initial_state(1, 1);
    const double dt = 1e-3;
    const double T = dt * static_cast<double>(state.range(0));
    for (auto _ : state) {
        Trajectory traj = solve(p, kern, spec, init, 0.0, T, dt);
        benchmark::DoNotOptimize(traj.u[0].back());
    }
    state.SetComplexityN(state.range(0));
}

void BM_solve_modes(benchmark::State& state) {
    const MgtParams p{2.0, 2.0, 1.0};
    const auto kern = make_scaled(make_oscillating(), 0.2);
    const auto n = static_cast<std::size_t>(state.range(0));
    const Spectrum spec = Spectrum::dirichlet1d(n);
    const State init = random_initial_state(n, 1);
    for (auto _ : state) {
        Trajectory traj = solve(p, kern, spec, init, 0.1, 2.0, 1e-3);
        benchmark::DoNotOptimize(traj.u[0].back());
    }
}

void BM_q_rho(benchmark::State& state) {
    const auto osc = make_oscillating();
    const RhoCutoff cut{0.2};
    double t = 0.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(Q_rho(*osc, cut, t));
        t += 1e-3;
        if (t > 10.0) t = 0.0;
    }
}

void BM_staircase_eval(benchmark::State& state) {
    const auto st = make_staircase(12);
    double s = 0.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(st->g(s));
        s += 0.37;
        if (s > 150.0) s = 0.0;
    }
}

void BM_energy_series(benchmark::State& state) {
    const MgtParams p{2.0, 2.0, 1.0};
    const Trajectory traj = solve(p, make_scaled(make_oscillating(), 0.2),
                                  Spectrum::dirichlet1d(4), random_initial_state(4, 1), 0.1,
                                  4.0, 1e-3);
    EnergyOptions opts;
    opts.stride = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) {
        EnergySeries es = compute_energy_series(traj, opts);
        benchmark::DoNotOptimize(es.F_rho.back());
    }
}

} // namespace

BENCHMARK(BM_solve_history_growth)->RangeMultiplier(2)->Range(256, 4096)->Complexity();
BENCHMARK(BM_solve_modes)->Arg(1)->Arg(4)->Arg(8);
BENCHMARK(BM_q_rho);
BENCHMARK(BM_staircase_eval);
BENCHMARK(BM_energy_series)->Arg(40)->Arg(10);

BENCHMARK_MAIN();
