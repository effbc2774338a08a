#include <benchmark/benchmark.h>

#include "emraman/interaction.hpp"
#include "emraman/spectral.hpp"
#include "emraman/symflow.hpp"
#include "emraman/zakharov.hpp"

using namespace emr;

static PlasmaParams bench_params() {
  PlasmaParams p;
  p.epsilon = 1e-4;
  p.theta_e = 0.1;
  p.alpha_ie = 0.05;
  p.k = 3.0;
  return p;
}

static void BM_SymbolMatrix(benchmark::State& state) {
  auto p = bench_params();
  Frequency z(1.7, 0.3, -0.2);
  for (auto _ : state) benchmark::DoNotOptimize(symbol_matrix(p, z, true));
}
BENCHMARK(BM_SymbolMatrix);

static void BM_SpectralDecomposition(benchmark::State& state) {
  auto p = bench_params();
  Frequency z(1.7, 0.3, -0.2);
  for (auto _ : state) benchmark::DoNotOptimize(spectral_decomposition(p, z));
}
BENCHMARK(BM_SpectralDecomposition);

static void BM_AxisSweep(benchmark::State& state) {
  auto p = bench_params();
  for (auto _ : state) {
    double acc = 0.0;
    for (int i = 0; i < 256; ++i)
      acc += eigenvalues(p, Frequency(-8.0 + i * 0.0625, 0.0), true)[1];
    benchmark::DoNotOptimize(acc);
  }
}
BENCHMARK(BM_AxisSweep);

static void BM_ResonanceTrace(benchmark::State& state) {
  auto p = bench_params();
  p.epsilon = 0.0;
  Frequency z(-4.9, 0.0, 0.0);
  for (auto _ : state)
    benchmark::DoNotOptimize(resonance_trace(p, {1, 4}, z));
}
BENCHMARK(BM_ResonanceTrace);

static void BM_FlowStep(benchmark::State& state) {
  auto p = bench_params();
  p.epsilon = 0.0;
  FlowGrid grid;
  grid.n_points = static_cast<int>(state.range(0));
  grid.dt = 1e-4;
  grid.epsilon = 1e-4;
  auto roots = space_time_resonances(p, {1, 4});
  auto unit = [](const Vec2&) { return cd(1.0, 0.0); };
  auto spec = make_pair_block(p, {1, 4}, roots.front().zeta, 0.1, unit, grid);
  // per-iteration cost of one integration step, amortized over a short run
  for (auto _ : state)
    benchmark::DoNotOptimize(run_flow(spec, grid, 64.0 * grid.dt));
  state.SetItemsProcessed(state.iterations() * 64);
}
BENCHMARK(BM_FlowStep)->Arg(256)->Arg(1024);

static void BM_ZakharovStep(benchmark::State& state) {
  auto p = bench_params();
  p.epsilon = 0.0;
  ZakharovGrid grid;
  grid.n = static_cast<int>(state.range(0));
  auto gauss = [](const Eigen::Vector3d& x) {
    return cd(0.5 * std::exp(-x.squaredNorm() / 4.0), 0.0);
  };
  auto s = init_from_wkb(gauss, p, grid);
  for (auto _ : state) {
    ZakharovState run = s;
    benchmark::DoNotOptimize(run_and_report(std::move(run), 16e-3, 1e-3));
  }
  state.SetItemsProcessed(state.iterations() * 16);
}
BENCHMARK(BM_ZakharovStep)->Arg(64)->Arg(128);

BENCHMARK_MAIN();
