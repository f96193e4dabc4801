// Parallel engine vs the serial reference on random table games.
//
//   pceve_bench --benchmark_filter=K:8

#include <random>

#include <benchmark/benchmark.h>

#include "pceve/shapley.hpp"
#include "pceve/testkit/games.hpp"

namespace {

pceve::testkit::GameHarness harness(unsigned k) {
  std::mt19937_64 rng(k);
  const auto game = pceve::testkit::random_table_game(rng, k, 4);
  return pceve::testkit::make_game_harness(rng, game, 128);
}

void BM_Parallel(benchmark::State& state) {
  const auto h = harness(static_cast<unsigned>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(pceve::explain_sample(h.model, h.image, h.parts));
  state.SetItemsProcessed(state.iterations() * (std::int64_t{1} << state.range(0)));
}

void BM_SerialReference(benchmark::State& state) {
  const auto h = harness(static_cast<unsigned>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(pceve::explain_sample_reference(h.model, h.image, h.parts));
  }
  state.SetItemsProcessed(state.iterations() * (std::int64_t{1} << state.range(0)));
}

void BM_ShapleyFromCache(benchmark::State& state) {
  const auto k = static_cast<unsigned>(state.range(0));
  std::mt19937_64 rng(k);
  const auto game = pceve::testkit::random_table_game(rng, k, 4);
  const pceve::CoalitionLogits cache{k, game.table};
  const pceve::CoalitionSpace space(k);
  const auto parts = pceve::testkit::default_part_names(k);
  const auto classes = pceve::testkit::default_class_names(4);
  for (auto _ : state) {
    benchmark::DoNotOptimize(pceve::shapley_from_logits(space, cache, parts, classes));
  }
}

}  // namespace

BENCHMARK(BM_Parallel)->ArgName("K")->DenseRange(4, 10, 2)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SerialReference)->ArgName("K")->DenseRange(4, 10, 2)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ShapleyFromCache)->ArgName("K")->DenseRange(8, 16, 4)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
