// Microbenchmarks for the two hot paths: certificate sweeps (many small
// eigenproblems) and the phase-space time step.

#include <benchmark/benchmark.h>

#include "kfp/assumptions.hpp"
#include "kfp/solver.hpp"

namespace {

kfp::PotentialModel quad1d(double a0) {
    kfp::Matrix m(1, 1);
    m(0, 0) = a0;
    return kfp::PotentialModel::quadratic(kfp::SymMatrix(m), {0.0}, 0.0);
}

void BM_sym_eig(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    kfp::Matrix a(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            a(i, j) = 1.0 / (1.0 + i + j);
    const kfp::SymMatrix S(a);
    for (auto _ : state)
        benchmark::DoNotOptimize(kfp::sym_eig(S));
}
BENCHMARK(BM_sym_eig)->Arg(2)->Arg(6)->Arg(12);

void BM_mat_exp(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    kfp::Matrix a(n, n);
    for (int i = 0; i < n; ++i) {
        a(i, i) = -0.5;
        if (i + 1 < n) {
            a(i, i + 1) = 1.0;
            a(i + 1, i) = -1.0;
        }
    }
    for (auto _ : state)
        benchmark::DoNotOptimize(kfp::mat_exp(a, 10.0));
}
BENCHMARK(BM_mat_exp)->Arg(2)->Arg(8);

void BM_condition_sweep(benchmark::State& state) {
    const kfp::PotentialModel V = kfp::PotentialModel::double_well(1, 1.0, 1.0);
    const kfp::Box box{{-5.0}, {5.0}};
    const kfp::GridSpec res{static_cast<int>(state.range(0))};
    const kfp::HypoParams p{1.0, 1.0, 9.0, 0.7};
    for (auto _ : state)
        benchmark::DoNotOptimize(kfp::check_assumption(
            V, box, res, p, kfp::ConditionKind::assumption_psd_block));
}
BENCHMARK(BM_condition_sweep)->Arg(201)->Arg(2001);

void BM_solver_step(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const kfp::KineticSolver solver(quad1d(1.0), 1.0, 1.0, n, n);
    kfp::Field f = solver.init(kfp::BumpInit{0.5, 0.0, 0.0, 1.0});
    const double dt = 0.4 / (solver.max_speed_x() / solver.grid().dx +
                             solver.max_speed_v() / solver.grid().dv);
    for (auto _ : state) {
        solver.step(f, dt);
        benchmark::DoNotOptimize(f.h.data());
    }
    state.SetItemsProcessed(state.iterations() * f.h.size());
}
BENCHMARK(BM_solver_step)->Arg(128)->Arg(256);

void BM_functionals(benchmark::State& state) {
    const kfp::KineticSolver solver(quad1d(1.0), 1.0, 1.0, 256, 256);
    const kfp::Field f = solver.init(kfp::BumpInit{0.5, 0.0, 0.0, 1.0});
    for (auto _ : state)
        benchmark::DoNotOptimize(
            solver.functionals(f, kfp::ShiftedWeight{0.0}, 1.0));
}
BENCHMARK(BM_functionals);

} // namespace

BENCHMARK_MAIN();
