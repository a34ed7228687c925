// Serial reference kernels against their OpenMP counterparts.

#include <benchmark/benchmark.h>

#include <string>
#include <vector>

#include "geniuskit/metrics.hpp"
#include "geniuskit/pipeline.hpp"
#include "geniuskit/svc_clients.hpp"
#include "support/corpus.hpp"

using namespace geniuskit;

namespace {

const std::vector<std::string>& lines() {
  static const std::vector<std::string> out = [] {
    std::vector<std::string> v;
    for (const auto& d : synth::corpus(2000, 31)) v.push_back(nlohmann::json{{"text", d}}.dump());
    return v;
  }();
  return out;
}

const std::vector<metrics::EvalRecord>& eval_records() {
  static const std::vector<metrics::EvalRecord> out = [] {
    std::vector<metrics::EvalRecord> v;
    EchoStub stub;
    for (const auto& d : synth::corpus(2000, 37)) {
      const auto pair = build_pair(tokenize(d), PairConfig{});
      if (!pair.pair) continue;
      GenerationRequest req;
      req.sketch_text = pair.pair->sketch;
      v.push_back({d, pair.pair->sketch, generate(req, stub).texts[0]});
    }
    return v;
  }();
  return out;
}

void BM_BatchSerial(benchmark::State& state) {
  PipelineConfig config;
  for (auto _ : state) benchmark::DoNotOptimize(process_batch_serial(lines(), 0, config));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(lines().size()));
}

void BM_BatchParallel(benchmark::State& state) {
  PipelineConfig config;
  config.workers = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(process_batch(lines(), 0, config));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(lines().size()));
}

void BM_Evaluate(benchmark::State& state) {
  const int workers = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(metrics::evaluate_corpus(eval_records(), kDefaultMaskToken, workers));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(eval_records().size()));
}

}  // namespace

BENCHMARK(BM_BatchSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BatchParallel)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Evaluate)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
