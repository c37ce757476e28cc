#pragma once

#include <span>
#include <string>
#include <vector>

#include "capscore/corpus.hpp"
#include "capscore/signature.hpp"
#include "capscore/text.hpp"

namespace capscore {

enum class BleuSmoothing {
  /// A zero clipped count is replaced by `smoothing_epsilon`.
  Epsilon,
  /// The k-th order with a zero count gets precision 1 / (2^k * total).
  Exp,
};

enum class RefLenPolicy {
  Closest,  // ties resolve to the shorter reference
  Shortest,
};

struct BleuConfig {
  int max_order = 4;
  /// Weights for BLEU_N. Empty means uniform 1/N.
  std::vector<double> weights;
  double smoothing_epsilon = 1e-15;
  BleuSmoothing smoothing = BleuSmoothing::Epsilon;
  RefLenPolicy ref_len = RefLenPolicy::Closest;

  /// Throws UsageError when the invariants do not hold.
  void validate() const;
  double weight(int order) const;

  /// Settings of the standardized corpus BLEU (exp smoothing).
  static BleuConfig standardized();
};

/// Sufficient statistics: clipped matches and candidate n-gram totals per
/// order, candidate length and the effective reference length.
struct BleuStats {
  std::vector<double> matches;
  std::vector<double> totals;
  double candidate_length = 0.0;
  double reference_length = 0.0;

  explicit BleuStats(int max_order = 4)
      : matches(static_cast<std::size_t>(max_order), 0.0),
        totals(static_cast<std::size_t>(max_order), 0.0) {}

  BleuStats& operator+=(const BleuStats& other);
};

BleuStats bleu_stats(std::span<const Token> candidate,
                     std::span<const std::vector<Token>> references, const BleuConfig& cfg);

double brevity_penalty(double candidate_length, double reference_length);

/// BLEU_1..BLEU_N from accumulated statistics. BLEU_k for k < N averages the
/// first k log precisions uniformly; BLEU_N uses the configured weights.
std::vector<double> bleu_from_stats(const BleuStats& stats, const BleuConfig& cfg);

struct BleuScores {
  std::vector<double> scores;  // BLEU_1..BLEU_N
  bool empty_candidate = false;
};

/// Throws UsageError when `refs` is empty.
BleuScores bleu_sentence(const TokenizedCaption& candidate,
                         std::span<const TokenizedCaption> refs, const BleuConfig& cfg);

std::string bleu_signature(const BleuConfig& cfg, Scheme scheme, std::string_view name = "BLEU");

/// Standardized corpus BLEU: statistics are summed over all items before the
/// formula is applied once. Per-caption entries are the same formula applied
/// to each item on its own.
MetricReport bleu_corpus(const EvalCorpus& corpus, const BleuConfig& cfg, Scheme scheme);

}  // namespace capscore
