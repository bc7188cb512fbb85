#include <benchmark/benchmark.h>

#include "subprime/engine.hpp"
#include "support/reference.hpp"

namespace {

using namespace subprime;

void BM_NormalQuantile(benchmark::State& state) {
  double p = 1e-6;
  for (auto _ : state) {
    benchmark::DoNotOptimize(stats::normal_quantile(p));
    p = p < 0.999 ? p + 1e-3 : 1e-6;
  }
}
BENCHMARK(BM_NormalQuantile);

void BM_SampleNormal(benchmark::State& state) {
  stats::RandomStream rng(1, 0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(stats::sample_normal({1.0, 0.8}, rng));
  }
}
BENCHMARK(BM_SampleNormal);

void BM_RunPeriod(benchmark::State& state) {
  auto config = testing::reference_config();
  config.cohort_size = static_cast<std::uint32_t>(state.range(0));
  auto market_state = engine::initial_state(config);
  stats::RandomStream rng(2, 0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(market::run_period(market_state, 0.0, rng));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_RunPeriod)->Arg(1)->Arg(64);

void BM_AdaptiveTrajectory(benchmark::State& state) {
  auto config = testing::reference_config();
  config.subsidy_mode = engine::SubsidyMode::AdaptiveVar;
  config.horizon = static_cast<std::uint64_t>(state.range(0));
  std::uint64_t stream = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(engine::run_adaptive_subsidy(config, config.base_seed, stream++));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_AdaptiveTrajectory)->Arg(1000)->Arg(5000)->Unit(benchmark::kMillisecond);

void BM_MonteCarlo(benchmark::State& state) {
  auto config = testing::reference_config();
  config.subsidy_mode = engine::SubsidyMode::AdaptiveVar;
  config.replications = 100;
  for (auto _ : state) {
    benchmark::DoNotOptimize(engine::monte_carlo(config, 1));
  }
}
BENCHMARK(BM_MonteCarlo)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
