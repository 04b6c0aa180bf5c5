#include <benchmark/benchmark.h>

#include <sstream>

#include "mobind/corpus.hpp"
#include "mobind/synth.hpp"

namespace {

std::string corpus_text(std::size_t authors) {
  auto config = mobind::scenario_preset("world");
  config.n_authors = authors;
  std::ostringstream out;
  mobind::write_corpus(out, mobind::generate_corpus(config).records);
  return out.str();
}

void BM_Ingest(benchmark::State& state) {
  const auto text = corpus_text(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    std::istringstream in(text);
    benchmark::DoNotOptimize(mobind::ingest_corpus(in));
  }
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * text.size()));
}
BENCHMARK(BM_Ingest)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);

void BM_ParseLine(benchmark::State& state) {
  const auto text = corpus_text(10);
  const auto line = text.substr(0, text.find('\n'));
  for (auto _ : state) benchmark::DoNotOptimize(mobind::parse_publication_line(line));
}
BENCHMARK(BM_ParseLine);

}  // namespace

BENCHMARK_MAIN();
