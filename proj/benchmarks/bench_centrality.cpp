#include <benchmark/benchmark.h>

#include <random>

#include "mobind/graphmetrics.hpp"

namespace {

mobind::Adjacency random_adjacency(std::size_t n, double mean_degree) {
  std::mt19937_64 rng(n);
  std::bernoulli_distribution edge(mean_degree / static_cast<double>(n - 1));
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
  for (std::uint32_t a = 0; a < n; ++a) {
    for (std::uint32_t b = a + 1; b < n; ++b) {
      if (edge(rng)) edges.emplace_back(a, b);
    }
  }
  return mobind::Adjacency::from_edges(n, edges);
}

void BM_Betweenness(benchmark::State& state) {
  const auto graph = random_adjacency(static_cast<std::size_t>(state.range(0)), 8.0);
  for (auto _ : state) benchmark::DoNotOptimize(mobind::betweenness_centrality(graph));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Betweenness)->RangeMultiplier(4)->Range(64, 4096)->Complexity();

void BM_Closeness(benchmark::State& state) {
  const auto graph = random_adjacency(static_cast<std::size_t>(state.range(0)), 8.0);
  for (auto _ : state) benchmark::DoNotOptimize(mobind::closeness_centrality(graph));
}
BENCHMARK(BM_Closeness)->RangeMultiplier(4)->Range(64, 4096);

}  // namespace

BENCHMARK_MAIN();
