#include <benchmark/benchmark.h>

#include "spinloc/analysis.hpp"

using namespace spinloc;

static Operator xy(int L) {
    return xy_chain_hamiltonian(build_chain(L), 0.5, std::vector<double>(size_t(L), 1.0));
}

static void BM_HamiltonianBuild(benchmark::State& state) {
    const int L = int(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(xy(L));
}
BENCHMARK(BM_HamiltonianBuild)->Arg(8)->Arg(10)->Arg(12);

static void BM_GroundState(benchmark::State& state) {
    const int L = int(state.range(0));
    const Operator h = xy(L);
    for (auto _ : state) benchmark::DoNotOptimize(ground_state(h));
}
BENCHMARK(BM_GroundState)->Arg(8)->Arg(10)->Arg(12)->Unit(benchmark::kMillisecond);

static void BM_SeeSawGHZ(benchmark::State& state) {
    QuantumState ghz;
    ghz.pure = true;
    ghz.n_sites = 3;
    ghz.vec = Eigen::VectorXcd::Zero(8);
    ghz.vec[0] = ghz.vec[7] = 1.0 / std::sqrt(2.0);
    const BellInequality ineq = svetlichny3();
    const std::vector<Region> regions{Region{{0}}, Region{{1}}, Region{{2}}};
    OptimizeOptions opts;
    opts.restarts = int(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(optimize(ghz, ineq, regions, opts));
}
BENCHMARK(BM_SeeSawGHZ)->Arg(1)->Arg(20)->Unit(benchmark::kMillisecond);

static void BM_BiseparableBoundSvetlichny(benchmark::State& state) {
    const BellInequality ineq = svetlichny3();
    for (auto _ : state) benchmark::DoNotOptimize(biseparable_bound(ineq));
}
BENCHMARK(BM_BiseparableBoundSvetlichny);

static void BM_SweepGround(benchmark::State& state) {
    SweepConfig cfg;
    cfg.lattice = build_chain(10);
    cfg.hamiltonian = xy(10);
    cfg.tau_list = {1, 2, 3, 4};
    for (auto _ : state) benchmark::DoNotOptimize(sweep_separation(cfg));
}
BENCHMARK(BM_SweepGround)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
