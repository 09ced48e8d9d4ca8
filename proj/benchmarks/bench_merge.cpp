#include <benchmark/benchmark.h>

#include "deid/merge.hpp"
#include "deid/random.hpp"

namespace {

std::vector<deid::EntityChunk> chunks(std::size_t n) {
  deid::Rng rng(n);
  std::vector<deid::EntityChunk> out;
  for (std::size_t i = 0; i < n; ++i) {
    deid::EntityChunk c;
    const auto s = rng.below(n * 4);
    c.span = {s, s + 1 + rng.below(12)};
    c.label = static_cast<deid::Label>(rng.below(13));
    c.source = rng.below(2) ? "gazetteer" : "rule";
    c.source_class = rng.below(2) ? "ner" : "rules";
    c.confidence = rng.uniform();
    out.push_back(std::move(c));
  }
  return out;
}

void BM_Merge(benchmark::State& state) {
  deid::MergePolicy policy;
  policy.set_default(0);
  policy.set_priority("rules", std::nullopt, 30);
  policy.set_priority("ner", std::nullopt, 20);
  const auto in = chunks(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(deid::merge(in, policy));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Merge)->RangeMultiplier(4)->Range(16, 4096)->Complexity();

}  // namespace
