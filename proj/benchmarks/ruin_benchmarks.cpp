#include "ruin/char_roots.hpp"
#include "ruin/oracle.hpp"
#include "ruin/pi_solver.hpp"
#include "ruin/polynomial.hpp"
#include "ruin/survival.hpp"

#include <benchmark/benchmark.h>

#include <vector>

namespace {

using namespace ruin;

const ClaimDistribution& geometric() {
    static const auto d = ClaimDistribution::geometric(101.0 / 300.0);
    return d;
}

// Harmonic weights on 0..n-1; the mean stays well below kappa = n/2.
ClaimDistribution finite_law(int n) {
    std::vector<double> p(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) p[static_cast<std::size_t>(k)] = 1.0 / (1.0 + k);
    double total = 0.0;
    for (double v : p) total += v;
    for (auto& v : p) v /= total;
    return ClaimDistribution::finite(std::move(p));
}

void BM_UnitDiskRoots(benchmark::State& state) {
    const int kappa = static_cast<int>(state.range(0));
    const auto dist = finite_law(2 * kappa);
    const auto q = build_characteristic(dist, kappa);
    for (auto _ : state) benchmark::DoNotOptimize(find_unit_disk_roots(q, {}, ClusterPolicy::Warn));
}
BENCHMARK(BM_UnitDiskRoots)->Arg(2)->Arg(5)->Arg(10)->Arg(20);

void BM_SolvePi(benchmark::State& state) {
    const int kappa = static_cast<int>(state.range(0));
    const auto dist = finite_law(2 * kappa);
    const auto roots = find_unit_disk_roots(build_characteristic(dist, kappa), {}, ClusterPolicy::Warn);
    for (auto _ : state) {
        const auto sys = assemble_system(dist, kappa, roots);
        benchmark::DoNotOptimize(solve_pi(sys, {}));
    }
}
BENCHMARK(BM_SolvePi)->Arg(2)->Arg(5)->Arg(10)->Arg(20);

void BM_SeriesTable(benchmark::State& state) {
    const auto& dist = geometric();
    const auto roots = find_unit_disk_roots(build_characteristic(dist, 3), {});
    const auto pi = solve_pi(assemble_system(dist, 3, roots), {});
    const int u_max = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(ultimate_from_series(pi, dist, 3, u_max));
    state.SetComplexityN(u_max);
}
BENCHMARK(BM_SeriesTable)->RangeMultiplier(10)->Range(100, 100000)->Complexity();

void BM_FiniteTimeGrid(benchmark::State& state) {
    const int t_max = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(finite_time_grid(geometric(), 2, 20, t_max));
}
BENCHMARK(BM_FiniteTimeGrid)->Arg(50)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);

void BM_MonteCarloPaths(benchmark::State& state) {
    const auto paths = state.range(0);
    for (auto _ : state) benchmark::DoNotOptimize(simulate_supremum(geometric(), 2, paths, 1000, 7));
    state.SetItemsProcessed(state.iterations() * paths * 1000);
}
BENCHMARK(BM_MonteCarloPaths)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_BetaGamma(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(beta_gamma_limits(geometric()));
}
BENCHMARK(BM_BetaGamma)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
