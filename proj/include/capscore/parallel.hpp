#pragma once

#include <cstddef>
#include <exception>
#include <span>
#include <vector>

#include "capscore/corpus.hpp"
#include "capscore/metric.hpp"
#include "capscore/signature.hpp"

namespace capscore {

/// Serial is the reference path; Parallel fans out with OpenMP and must give
/// bit-identical results.
enum class Execution { Serial, Parallel };

/// Applies CAPSCORE_THREADS (if set) as an upper bound on OpenMP threads.
void apply_thread_cap_from_env();
int max_threads();

struct ScoringTask {
  const Caption* candidate;
  const ReferenceSet* refs;
};

std::vector<double> score_tasks_serial(const Metric& metric, std::span<const ScoringTask> tasks);
std::vector<double> score_tasks_parallel(const Metric& metric, std::span<const ScoringTask> tasks);
std::vector<double> score_tasks(const Metric& metric, std::span<const ScoringTask> tasks,
                                Execution exec);

/// Prepares `metric` on the corpus references, scores every item and fills
/// a report. Throws IntegrityError on non-finite scores.
MetricReport score_corpus(Metric& metric, const EvalCorpus& corpus,
                          Execution exec = Execution::Parallel);

/// Runs `body(i)` for i in [0, n), rethrowing the first exception on the
/// calling thread.
template <typename Body>
void parallel_for(std::size_t n, Body&& body) {
  std::exception_ptr failure;
  const auto count = static_cast<long long>(n);
#pragma omp parallel for schedule(dynamic, 64)
  for (long long i = 0; i < count; ++i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
#pragma omp critical(capscore_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace capscore
