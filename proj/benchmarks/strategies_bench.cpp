#include <benchmark/benchmark.h>

#include <filesystem>
#include <random>

#include "fixtures.hpp"
#include "guardrail/kmeans.hpp"
#include "guardrail/percentile.hpp"
#include "guardrail/precompute.hpp"
#include "guardrail/strategies.hpp"

namespace {

using namespace guardrail;

// Stock-sized input: items x 53 weekly steps.
TimeSeriesDataset walks(std::size_t items, std::size_t steps = 53) {
  std::mt19937_64 gen(42);
  return testing::make_dataset(testing::random_walks(gen, items, steps));
}

void BM_PercentileLines(benchmark::State& state) {
  const auto ds = walks(static_cast<std::size_t>(state.range(0)));
  const std::vector<double> ps{5, 25, 50, 75, 95};
  for (auto _ : state) benchmark::DoNotOptimize(percentile_lines(ds, ps));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_PercentileLines)->Arg(50)->Arg(500)->Arg(2000);

void BM_KMeans(benchmark::State& state) {
  const auto rows = value_rows(walks(static_cast<std::size_t>(state.range(0))));
  for (auto _ : state) benchmark::DoNotOptimize(kmeans_timeseries(rows, 5, 7));
}
BENCHMARK(BM_KMeans)->Arg(50)->Arg(500)->Unit(benchmark::kMillisecond);

void BM_Strategy(benchmark::State& state) {
  const auto kind = static_cast<StrategyKind>(state.range(0));
  const auto ds = walks(500);
  const auto spec = default_spec(kind);
  for (auto _ : state) benchmark::DoNotOptimize(compute_guardrails(ds, "I250", spec));
  state.SetLabel(std::string(to_string(kind)));
}
BENCHMARK(BM_Strategy)
    ->Arg(static_cast<int>(StrategyKind::random))
    ->Arg(static_cast<int>(StrategyKind::percentile_markers))
    ->Arg(static_cast<int>(StrategyKind::percentile_exemplars))
    ->Arg(static_cast<int>(StrategyKind::cluster_representatives))
    ->Unit(benchmark::kMicrosecond);

// --all over 500 items with the four data-driven strategies: 2000 sets.
void BM_PrecomputeAll500(benchmark::State& state) {
  const auto ds = walks(500);
  const auto out = std::filesystem::temp_directory_path() / "guardrail_bench_precompute";
  PrecomputeRequest req{{StrategyKind::random, StrategyKind::percentile_markers,
                         StrategyKind::percentile_exemplars, StrategyKind::cluster_representatives},
                        {}, true, std::nullopt, out, nullptr};
  for (auto _ : state) {
    state.PauseTiming();
    std::filesystem::remove_all(out);
    state.ResumeTiming();
    benchmark::DoNotOptimize(precompute(ds, req));
  }
  std::filesystem::remove_all(out);
  state.SetItemsProcessed(state.iterations() * 2000);
}
BENCHMARK(BM_PrecomputeAll500)->Unit(benchmark::kSecond)->Iterations(1);

}  // namespace

BENCHMARK_MAIN();
