#include <boostvar/boost_engine.hpp>
#include <boostvar/simulation.hpp>

#include <benchmark/benchmark.h>

using namespace boostvar;

namespace {

TimeSeriesMatrix sample(Index T, Index d) {
  DgpConfig c;
  c.T = T;
  c.d = d;
  c.s = std::min<Index>(3, d);
  Rng rng(42);
  auto truth = draw_truth(c, rng);
  return simulate_var(truth, T, c.burn_in, rng);
}

// Args: training rows, variables, variant (0 group, 1 single lag), inference on/off.
void BM_RunPath(benchmark::State& state) {
  const auto y = sample(state.range(0), state.range(1));
  BoostConfig c;
  c.variant = state.range(2) ? Variant::kSingleLag : Variant::kGroup;
  c.k_stop = 500;
  c.compute_inference = state.range(3) != 0;
  for (auto _ : state) benchmark::DoNotOptimize(run_path(y, 2, c, true));
  state.SetItemsProcessed(state.iterations() * c.k_stop);
}

BENCHMARK(BM_RunPath)
    ->ArgNames({"T", "d", "lag", "inference"})
    ->Args({500, 2, 0, 1})
    ->Args({200, 20, 0, 0})
    ->Args({200, 20, 1, 0})
    ->Args({200, 20, 1, 1})
    ->Args({500, 20, 1, 1})
    ->Unit(benchmark::kMillisecond);

void BM_Replications(benchmark::State& state) {
  DgpConfig c;
  c.T = 100;
  c.d = 20;
  const auto methods = default_methods(0.1, 300);
  for (auto _ : state) benchmark::DoNotOptimize(run_replications(c, methods, 2, 1));
}

BENCHMARK(BM_Replications)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
