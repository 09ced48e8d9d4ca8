#include <benchmark/benchmark.h>

#include "deid/langpack.hpp"
#include "deid/pipeline.hpp"
#include "deid/runner.hpp"
#include "deid/synth.hpp"

namespace {

std::shared_ptr<const deid::LanguagePack> english() {
  static const auto pack =
      std::make_shared<const deid::LanguagePack>(deid::LanguagePack::load(std::string(DEID_BENCH_PACKS_DIR) + "/en"));
  return pack;
}

const deid::synth::Corpus& notes() {
  static const auto corpus = deid::synth::generate_corpus(256, 1, {.target_bytes = 2048});
  return corpus;
}

void BM_Detect(benchmark::State& state) {
  const deid::Pipeline p(english());
  std::size_t i = 0, bytes = 0;
  for (auto _ : state) {
    const auto& doc = notes().documents[i++ % notes().documents.size()];
    benchmark::DoNotOptimize(p.detect(doc));
    bytes += doc.text.size();
  }
  state.SetBytesProcessed(static_cast<std::int64_t>(bytes));
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_Detect);

void BM_Process(benchmark::State& state) {
  deid::PipelineOptions opt;
  opt.rewrite.mode = static_cast<deid::RewriteMode>(state.range(0));
  opt.seed = 1;
  const deid::Pipeline p(english(), opt);
  std::size_t i = 0;
  for (auto _ : state) {
    const auto& doc = notes().documents[i++ % notes().documents.size()];
    benchmark::DoNotOptimize(p.process(doc));
  }
  state.SetItemsProcessed(state.iterations());
  state.SetLabel(std::string(deid::rewrite_mode_name(opt.rewrite.mode)));
}
BENCHMARK(BM_Process)->DenseRange(0, 3);

void BM_CorpusProcessor(benchmark::State& state) {
  deid::PipelineOptions opt;
  opt.rewrite.mode = deid::RewriteMode::Obfuscate;
  opt.seed = 1;
  const deid::Pipeline p(english(), opt);
  for (auto _ : state) {
    deid::CorpusProcessor proc(p, static_cast<unsigned>(state.range(0)));
    benchmark::DoNotOptimize(proc.process(notes().documents));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(notes().documents.size()));
}
BENCHMARK(BM_CorpusProcessor)->Arg(1)->Arg(2)->Arg(4)->UseRealTime()->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
