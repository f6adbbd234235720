#include <benchmark/benchmark.h>

#include "sotm/autotune.hpp"
#include "sotm/sammon.hpp"
#include "sotm/training.hpp"
#include "sotm/viz.hpp"
#include "synthetic.hpp"

namespace {

using sotm::testing::Rng;

void BM_BatchUpdate(benchmark::State& state) {
  Rng rng(1);
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto slice = sotm::testing::weighted_slice(rng, n, 14);
  const auto array = sotm::pca_init(slice, 7, 2.0);
  for (auto _ : state) benchmark::DoNotOptimize(sotm::batch_update(array, slice, 1.0));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_BatchUpdate)->Arg(28)->Arg(1000)->Arg(40000);

void BM_TrainSotm(benchmark::State& state) {
  Rng rng(2);
  const auto cube = sotm::testing::make_panel(
      rng, {.entities = 28, .features = 14, .slices = static_cast<std::size_t>(state.range(0))});
  sotm::TrainConfig config;
  for (auto _ : state) benchmark::DoNotOptimize(sotm::train_sotm(cube, config));
}
BENCHMARK(BM_TrainSotm)->Arg(9)->Arg(22);

void BM_AutoTrain(benchmark::State& state) {
  Rng rng(3);
  const auto cube = sotm::testing::make_panel(rng, {.entities = 28, .features = 14, .slices = 22});
  sotm::TrainConfig config;
  const auto grid = sotm::TuneGrid::defaults(config.units);
  for (auto _ : state) benchmark::DoNotOptimize(sotm::auto_train(cube, config, grid));
}
BENCHMARK(BM_AutoTrain)->Unit(benchmark::kMillisecond);

void BM_UnitColors(benchmark::State& state) {
  Rng rng(4);
  const auto cube = sotm::testing::make_panel(
      rng, {.entities = 28, .features = 14, .slices = static_cast<std::size_t>(state.range(0))});
  const auto model = sotm::train_sotm(cube, {});
  for (auto _ : state) benchmark::DoNotOptimize(sotm::unit_colors(model));
}
BENCHMARK(BM_UnitColors)->Arg(9)->Arg(22)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
