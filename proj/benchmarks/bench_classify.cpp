#include <benchmark/benchmark.h>

#include "mobind/flows.hpp"
#include "mobind/mobility.hpp"
#include "mobind/synth.hpp"

namespace {

mobind::HistoryMap eligible(std::size_t authors) {
  auto config = mobind::scenario_preset("world");
  config.n_authors = authors;
  config.multi_rate = 0.2;
  return mobind::filter_eligible_researchers(
      mobind::build_author_histories(mobind::generate_corpus(config).records), {2003, 2015});
}

void BM_Histories(benchmark::State& state) {
  auto config = mobind::scenario_preset("world");
  config.n_authors = static_cast<std::size_t>(state.range(0));
  const auto records = mobind::generate_corpus(config).records;
  for (auto _ : state) benchmark::DoNotOptimize(mobind::build_author_histories(records));
}
BENCHMARK(BM_Histories)->Arg(2000)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_Classify(benchmark::State& state) {
  const auto histories = eligible(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(mobind::classify_all(histories, mobind::Level::kCountry));
}
BENCHMARK(BM_Classify)->Arg(2000)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_FlowMatrix(benchmark::State& state) {
  const auto histories = eligible(static_cast<std::size_t>(state.range(0)));
  const auto events = mobind::classify_all(histories, mobind::Level::kCountry);
  const auto capacity = mobind::compute_capacities(histories);
  for (auto _ : state) benchmark::DoNotOptimize(mobind::build_flow_matrix(events, capacity));
}
BENCHMARK(BM_FlowMatrix)->Arg(2000)->Arg(10000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
