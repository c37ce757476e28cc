// Serial reference path against the OpenMP kernels on a synthetic corpus.

#include <benchmark/benchmark.h>

#include "capscore/metric.hpp"
#include "capscore/parallel.hpp"
#include "capscore/perturb.hpp"
#include "synthetic.hpp"

using namespace capscore;

namespace {

const SplitCorpus& corpus() {
  static const SplitCorpus split = split_references(synth::synthetic_corpus(2000, 7));
  return split;
}

void score(benchmark::State& state, const char* name, Execution exec) {
  const auto& split = corpus();
  const EvalCorpus eval = make_eval_corpus(split.human_candidates, split.reference_sets);
  auto metric = make_metric(name, {});
  for (auto _ : state) benchmark::DoNotOptimize(score_corpus(*metric, eval, exec));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(eval.items.size()));
}

void tier(benchmark::State& state, PerturbKind kind, Execution exec) {
  const auto& split = corpus();
  const auto bag = build_bag(split.reference_sets, Scheme::CocoLite, 4);
  const PerturbationSpec spec{kind, 0.5, 11};
  for (auto _ : state)
    benchmark::DoNotOptimize(generate_tier(split.human_candidates, spec, &bag, Scheme::CocoLite, exec));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(split.human_candidates.size()));
}

}  // namespace

BENCHMARK_CAPTURE(score, bleu4_serial, "bleu-4", Execution::Serial);
BENCHMARK_CAPTURE(score, bleu4_parallel, "bleu-4", Execution::Parallel);
BENCHMARK_CAPTURE(score, meteor_serial, "meteor", Execution::Serial);
BENCHMARK_CAPTURE(score, meteor_parallel, "meteor", Execution::Parallel);
BENCHMARK_CAPTURE(score, cider_serial, "cider", Execution::Serial);
BENCHMARK_CAPTURE(score, cider_parallel, "cider", Execution::Parallel);
BENCHMARK_CAPTURE(tier, replace_serial, PerturbKind::Replace, Execution::Serial);
BENCHMARK_CAPTURE(tier, replace_parallel, PerturbKind::Replace, Execution::Parallel);
BENCHMARK_CAPTURE(tier, shuffle_serial, PerturbKind::Shuffle, Execution::Serial);
BENCHMARK_CAPTURE(tier, shuffle_parallel, PerturbKind::Shuffle, Execution::Parallel);

BENCHMARK_MAIN();
