#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "capscore/corpus.hpp"
#include "capscore/metric.hpp"
#include "capscore/parallel.hpp"

namespace capscore {

enum class TieMode {
  /// Tied values share their average rank; rho is the Pearson correlation
  /// of the ranks.
  Fractional,
  /// Ties are broken by a seeded shuffle; rho = 1 - 6 sum d^2 / (n (n^2 - 1)).
  Random,
};

struct TiePolicy {
  TieMode mode = TieMode::Fractional;
  std::uint64_t seed = 0;

  /// "fractional" or "random(<seed>)".
  std::string str() const;
  /// Inverse of str(); also accepts plain "random" (seed 0).
  static TiePolicy parse(std::string_view text);
};

/// Ranks in ascending value order, 1 = smallest. Throws IntegrityError on
/// non-finite input.
std::vector<double> rank_values(std::span<const double> values, const TiePolicy& ties);

struct ScoredCaption {
  std::string caption_id;
  double score;
};

std::vector<double> rank_captions(std::span<const ScoredCaption> scored, const TiePolicy& ties);

/// Pearson correlation; 0 when either side has zero variance.
double pearson(std::span<const double> x, std::span<const double> y);

/// 1 - 6 sum d^2 / (n (n^2 - 1)) on two rank vectors.
double spearman_from_ranks(std::span<const double> x_ranks, std::span<const double> y_ranks);

/// Ranks both inputs under the tie policy, then correlates them.
/// Throws UsageError on length mismatch or n < 2.
double spearman(std::span<const double> known, std::span<const double> metric,
                const TiePolicy& ties = {});

struct Tier {
  std::string name;
  int expected_rank = 1;  // 1 = worst
  std::vector<Caption> captions;
};

struct HistogramBin {
  double lo = 0.0;
  double hi = 0.0;
  std::vector<std::size_t> counts;  // one per tier, in RankResult::tier_names order
};

struct RankResult {
  std::string metric_signature;
  double rho = 0.0;
  TiePolicy ties;
  std::vector<std::string> tier_names;  // worst first
  std::vector<std::size_t> tier_sizes;
  std::vector<HistogramBin> bins;
};

struct ExperimentOptions {
  std::size_t bins = 50;
  TiePolicy ties;
  Execution exec = Execution::Parallel;
};

/// Scores of every caption of every tier, tiers in expected-rank order.
struct TierScores {
  std::vector<std::string> tier_names;
  std::vector<std::vector<double>> scores;
  std::string metric_signature;
};

/// Validates alignment, prepares the metric on `refsets` and scores all
/// tiers.
TierScores score_tiers(std::span<const Tier> tiers, std::span<const ReferenceSet> refsets,
                       Metric& metric, Execution exec = Execution::Parallel);

/// Known order = position in the concatenation of tiers (worst first, image
/// order within a tier); metric order = rank of score.
RankResult rank_tier_scores(const TierScores& scores, const ExperimentOptions& options);

RankResult run_tier_experiment(std::span<const Tier> tiers, std::span<const ReferenceSet> refsets,
                               Metric& metric, const ExperimentOptions& options = {});

/// Two tiers: model captions (rank 1) and human captions (rank 2). Model
/// captions are reordered to the human image order.
RankResult run_model_vs_human(std::span<const Caption> model_captions,
                              std::span<const Caption> human_captions,
                              std::span<const ReferenceSet> refsets, Metric& metric,
                              const ExperimentOptions& options = {});

std::string rank_result_json(const RankResult& result);
std::string rank_result_csv(const RankResult& result);
/// Writes `<stem>.json` and `<stem>.csv`.
void export_rank_result(const RankResult& result, const std::filesystem::path& stem);

}  // namespace capscore
