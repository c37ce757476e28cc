#include "capscore/cider.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_set>

#include "capscore/error.hpp"
#include "capscore/signature.hpp"

namespace capscore {

void CiderConfig::validate() const {
  if (max_order < 1) throw UsageError("CIDEr: max order must be >= 1");
  if (!weights.empty()) {
    if (weights.size() != static_cast<std::size_t>(max_order))
      throw UsageError("CIDEr: need one weight per order");
    const double sum = std::accumulate(weights.begin(), weights.end(), 0.0);
    if (std::abs(sum - 1.0) > 1e-9) throw UsageError("CIDEr: weights must sum to 1");
  }
  if (!(scale > 0.0)) throw UsageError("CIDEr: scale must be positive");
}

double CiderConfig::weight(int order) const {
  if (weights.empty()) return 1.0 / max_order;
  return weights[static_cast<std::size_t>(order - 1)];
}

int CorpusStats::df(int order, const std::string& gram) const {
  const auto& table = doc_freq[static_cast<std::size_t>(order - 1)];
  auto it = table.find(gram);
  return it == table.end() ? 1 : it->second;
}

namespace {

std::vector<Token> prepare_tokens(std::span<const Token> tokens, bool stem) {
  if (stem) return stem_all(tokens);
  return {tokens.begin(), tokens.end()};
}

struct TfIdf {
  std::unordered_map<std::string, double> weights;
  double norm = 0.0;
};

TfIdf tfidf(const NGramCounts& counts, const CorpusStats& stats) {
  TfIdf v;
  const double n_images = static_cast<double>(stats.num_images);
  v.weights.reserve(counts.counts.size());
  double sq = 0.0;
  for (const auto& [gram, tf] : counts.counts) {
    const double g = tf * std::log(n_images / std::max(1, stats.df(counts.n, gram)));
    v.weights.emplace(gram, g);
    sq += g * g;
  }
  v.norm = std::sqrt(sq);
  return v;
}

double cosine_sparse(const TfIdf& a, const TfIdf& b) {
  if (a.norm == 0.0 || b.norm == 0.0) return 0.0;
  const TfIdf& small = a.weights.size() <= b.weights.size() ? a : b;
  const TfIdf& large = &small == &a ? b : a;
  double dot = 0.0;
  for (const auto& [gram, w] : small.weights) {
    auto it = large.weights.find(gram);
    if (it != large.weights.end()) dot += w * it->second;
  }
  return dot / (a.norm * b.norm);
}

}  // namespace

CorpusStats cider_build_stats(std::span<const ReferenceSet> refsets, Scheme scheme, bool stem,
                              int max_order) {
  if (refsets.empty()) throw UsageError("CIDEr: no reference sets");
  if (max_order < 1) throw UsageError("CIDEr: max order must be >= 1");
  CorpusStats stats;
  stats.scheme = scheme;
  stats.stemmed = stem;
  stats.max_order = max_order;
  stats.num_images = refsets.size();
  stats.doc_freq.resize(static_cast<std::size_t>(max_order));
  for (const auto& set : refsets) {
    std::vector<std::vector<Token>> refs;
    for (const auto& r : set.refs) refs.push_back(prepare_tokens(tokenize_words(r.text, scheme), stem));
    for (int n = 1; n <= max_order; ++n) {
      std::unordered_set<std::string> present;
      for (const auto& tokens : refs)
        for (auto& [gram, c] : ngram_counts(tokens, n).counts) present.insert(gram);
      auto& table = stats.doc_freq[static_cast<std::size_t>(n - 1)];
      for (const auto& gram : present) ++table[gram];
    }
  }
  return stats;
}

double cider_score(const TokenizedCaption& candidate, std::span<const TokenizedCaption> refs,
                   const CorpusStats& stats, const CiderConfig& cfg) {
  cfg.validate();
  if (refs.empty()) throw UsageError("CIDEr: no references");
  if (cfg.max_order > stats.max_order)
    throw UsageError("CIDEr: statistics were built for a lower max order");
  const auto cand = prepare_tokens(candidate.tokens, stats.stemmed);
  std::vector<std::vector<Token>> ref_tokens;
  ref_tokens.reserve(refs.size());
  for (const auto& r : refs) ref_tokens.push_back(prepare_tokens(r.tokens, stats.stemmed));

  double total = 0.0;
  for (int n = 1; n <= cfg.max_order; ++n) {
    const TfIdf c = tfidf(ngram_counts(cand, n), stats);
    double sum = 0.0;
    for (const auto& r : ref_tokens) sum += cosine_sparse(c, tfidf(ngram_counts(r, n), stats));
    total += cfg.weight(n) * sum / static_cast<double>(refs.size());
  }
  return cfg.scale * total;
}

std::string cider_signature(const CiderConfig& cfg, const CorpusStats& stats) {
  Signature sig{"CIDEr", stats.scheme};
  sig.set("idf", "corpus");
  sig.set("images", static_cast<int>(stats.num_images));
  sig.set("n", cfg.max_order);
  sig.set("scale", cfg.scale);
  sig.set("stem", stats.stemmed ? "porter" : "none");
  if (cfg.weights.empty()) {
    sig.set("w", "uniform");
  } else {
    std::string w;
    for (std::size_t i = 0; i < cfg.weights.size(); ++i) {
      if (i) w += ',';
      w += format_number(cfg.weights[i]);
    }
    sig.set("w", w);
  }
  return sig.str();
}

}  // namespace capscore
