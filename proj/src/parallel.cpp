#include "capscore/parallel.hpp"

#include <cmath>
#include <cstdlib>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "capscore/error.hpp"

namespace capscore {

void apply_thread_cap_from_env() {
#ifdef _OPENMP
  if (const char* env = std::getenv("CAPSCORE_THREADS"); env != nullptr && *env != '\0') {
    char* end = nullptr;
    const long cap = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || cap < 1)
      throw UsageError(std::string("CAPSCORE_THREADS must be a positive integer, got '") + env +
                       "'");
    if (cap < omp_get_max_threads()) omp_set_num_threads(static_cast<int>(cap));
  }
#endif
}

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

std::vector<double> score_tasks_serial(const Metric& metric, std::span<const ScoringTask> tasks) {
  std::vector<double> out(tasks.size());
  for (std::size_t i = 0; i < tasks.size(); ++i)
    out[i] = metric.score(*tasks[i].candidate, *tasks[i].refs);
  return out;
}

std::vector<double> score_tasks_parallel(const Metric& metric,
                                         std::span<const ScoringTask> tasks) {
  std::vector<double> out(tasks.size());
  parallel_for(tasks.size(),
               [&](std::size_t i) { out[i] = metric.score(*tasks[i].candidate, *tasks[i].refs); });
  return out;
}

std::vector<double> score_tasks(const Metric& metric, std::span<const ScoringTask> tasks,
                                Execution exec) {
  return exec == Execution::Serial ? score_tasks_serial(metric, tasks)
                                   : score_tasks_parallel(metric, tasks);
}

MetricReport score_corpus(Metric& metric, const EvalCorpus& corpus, Execution exec) {
  if (corpus.items.empty()) throw UsageError("cannot score an empty corpus");
  std::vector<ReferenceSet> refsets;
  refsets.reserve(corpus.items.size());
  for (const auto& item : corpus.items) refsets.push_back(item.references);
  metric.prepare(refsets);

  std::vector<ScoringTask> tasks;
  std::vector<const Caption*> cands;
  std::vector<const ReferenceSet*> refs;
  for (const auto& item : corpus.items) {
    tasks.push_back({&item.candidate, &item.references});
    cands.push_back(&item.candidate);
    refs.push_back(&item.references);
  }
  const auto scores = score_tasks(metric, tasks, exec);

  MetricReport report;
  report.metric_name = metric.name();
  report.signature = metric.signature();
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (!std::isfinite(scores[i]))
      throw IntegrityError(metric.name() + ": non-finite score for " + cands[i]->id);
    report.per_caption[cands[i]->id] = scores[i];
  }
  report.aggregate = metric.aggregate(cands, refs, scores);
  return report;
}

}  // namespace capscore
