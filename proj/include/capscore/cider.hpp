#pragma once

#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "capscore/corpus.hpp"
#include "capscore/text.hpp"

namespace capscore {

struct CiderConfig {
  int max_order = 4;
  /// Per-order weights; empty means uniform 1/N.
  std::vector<double> weights;
  double scale = 10.0;

  void validate() const;
  double weight(int order) const;
};

/// Document frequencies over the reference sets of an evaluation corpus.
struct CorpusStats {
  Scheme scheme = Scheme::CocoLite;
  bool stemmed = true;
  int max_order = 4;
  std::size_t num_images = 0;
  /// doc_freq[n-1][gram]: images whose references contain the n-gram.
  std::vector<std::unordered_map<std::string, int>> doc_freq;

  /// Unseen n-grams count as appearing in one image.
  int df(int order, const std::string& gram) const;
};

CorpusStats cider_build_stats(std::span<const ReferenceSet> refsets, Scheme scheme,
                              bool stem = true, int max_order = 4);

/// Tokens are stemmed here when `stats.stemmed` is set, so callers pass the
/// plain tokenizer output.
double cider_score(const TokenizedCaption& candidate, std::span<const TokenizedCaption> refs,
                   const CorpusStats& stats, const CiderConfig& cfg);

std::string cider_signature(const CiderConfig& cfg, const CorpusStats& stats);

}  // namespace capscore
