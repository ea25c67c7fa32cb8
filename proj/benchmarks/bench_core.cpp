#include "segccr/empirical.hpp"
#include "segccr/estimation.hpp"
#include "segccr/inference.hpp"
#include "segccr/likelihood.hpp"
#include "segccr/simulation.hpp"

#include <benchmark/benchmark.h>

namespace segccr {
namespace {

ScorePairs scenario_data(std::size_t n) {
  SeededRng rng(1, 0);
  return generate(ScenarioSpec::scenario1(0.8, 1.2, n), rng);
}

void BM_RankAndBin(benchmark::State& state) {
  const auto pairs = scenario_data(static_cast<std::size_t>(state.range(0)));
  const auto grid = CutoffGrid::equally_spaced(100);
  for (auto _ : state) {
    const auto ranks = to_uniform_ranks(pairs, Orientation::HigherIsStronger);
    benchmark::DoNotOptimize(category_counts(ranks, grid));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_RankAndBin)->Arg(1000)->Arg(10000)->Arg(100000);

void BM_ScoreBeta(benchmark::State& state) {
  const auto grid = CutoffGrid::equally_spaced(static_cast<std::size_t>(state.range(0)));
  const auto data = make_design_set({scenario_data(10000)}, Orientation::HigherIsStronger, grid);
  SegmentedParams p;
  p.tau = 0.5;
  p.beta.resize(1, 2);
  p.beta << 1.9, 1.3;
  for (auto _ : state) benchmark::DoNotOptimize(score_beta(p, data, grid));
}
BENCHMARK(BM_ScoreBeta)->Arg(28)->Arg(100)->Arg(400);

void BM_FitSegmented(benchmark::State& state) {
  const auto grid = CutoffGrid::equally_spaced(100);
  const auto data = make_design_set({scenario_data(10000)}, Orientation::HigherIsStronger, grid);
  const auto taus = default_tau_grid(grid);
  FitOptions options;
  options.warm_start = state.range(0) != 0;
  for (auto _ : state) benchmark::DoNotOptimize(fit_segmented(data, grid, taus, options));
}
BENCHMARK(BM_FitSegmented)->Arg(1)->Arg(0)->Unit(benchmark::kMillisecond);

void BM_QlrNullDraws(benchmark::State& state) {
  const auto pairs = scenario_data(10000);
  ModelSetup setup;
  setup.orientation = Orientation::HigherIsStronger;
  QlrOptions options;
  options.NB = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(qlr_null_pvalue(pairs, setup, options));
}
BENCHMARK(BM_QlrNullDraws)->Arg(50)->Arg(200)->Unit(benchmark::kMillisecond);

void BM_Bootstrap(benchmark::State& state) {
  const std::vector<ScorePairs> wfs{scenario_data(10000)};
  ModelSetup setup;
  setup.orientation = Orientation::HigherIsStronger;
  BootstrapOptions options;
  options.B = static_cast<std::size_t>(state.range(0));
  options.threads = 1;
  for (auto _ : state) benchmark::DoNotOptimize(bootstrap(wfs, setup, options));
}
BENCHMARK(BM_Bootstrap)->Arg(20)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace segccr

BENCHMARK_MAIN();
