#pragma once

#include <span>
#include <string>
#include <vector>

#include "capscore/text.hpp"

namespace capscore {

enum class MatchStage { Exact, Stem, Synonym };

struct MeteorConfig {
  double alpha = 0.85;
  double beta = 0.2;
  double gamma = 0.6;
  std::vector<MatchStage> stages{MatchStage::Exact, MatchStage::Stem, MatchStage::Synonym};

  void validate() const;
};

/// Outcome of aligning a candidate against one reference.
struct MeteorAlignment {
  /// ref_of[i] is the reference position aligned to candidate token i, or -1.
  std::vector<int> ref_of;
  int matches = 0;
  int chunks = 0;
  double precision = 0.0;
  double recall = 0.0;
  double fmean = 0.0;
  double penalty = 0.0;
  double score = 0.0;
};

/// Number of maximal runs of matches that are contiguous and in the same
/// order in both sentences.
int count_chunks(std::span<const int> ref_of);

/// Stage-by-stage one-to-one unigram alignment. Within the exact and stem
/// stages the pairing of repeated words is searched for the fewest chunks.
MeteorAlignment meteor_align(std::span<const Token> candidate, std::span<const Token> reference,
                             const MeteorConfig& cfg, const SynonymTable& synonyms);

/// Best score over the references. Throws UsageError on empty input.
double meteor(const TokenizedCaption& candidate, std::span<const TokenizedCaption> refs,
              const MeteorConfig& cfg, const SynonymTable& synonyms);

std::string meteor_signature(const MeteorConfig& cfg, Scheme scheme, bool synonyms_loaded);

}  // namespace capscore
