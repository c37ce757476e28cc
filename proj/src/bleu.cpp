#include "capscore/bleu.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numeric>

#include "capscore/error.hpp"

namespace capscore {

void BleuConfig::validate() const {
  if (max_order < 1) throw UsageError("BLEU: max order must be >= 1");
  if (!(smoothing_epsilon > 0.0)) throw UsageError("BLEU: smoothing epsilon must be positive");
  if (!weights.empty()) {
    if (weights.size() != static_cast<std::size_t>(max_order))
      throw UsageError("BLEU: need one weight per order");
    if (std::any_of(weights.begin(), weights.end(), [](double w) { return !(w >= 0.0); }))
      throw UsageError("BLEU: weights must be non-negative");
    const double sum = std::accumulate(weights.begin(), weights.end(), 0.0);
    if (std::abs(sum - 1.0) > 1e-9) throw UsageError("BLEU: weights must sum to 1");
  }
}

double BleuConfig::weight(int order) const {
  if (weights.empty()) return 1.0 / max_order;
  return weights[static_cast<std::size_t>(order - 1)];
}

BleuConfig BleuConfig::standardized() {
  BleuConfig cfg;
  cfg.smoothing = BleuSmoothing::Exp;
  return cfg;
}

BleuStats& BleuStats::operator+=(const BleuStats& other) {
  for (std::size_t n = 0; n < matches.size() && n < other.matches.size(); ++n) {
    matches[n] += other.matches[n];
    totals[n] += other.totals[n];
  }
  candidate_length += other.candidate_length;
  reference_length += other.reference_length;
  return *this;
}

namespace {

double effective_reference_length(std::size_t candidate_length,
                                  std::span<const std::vector<Token>> references,
                                  RefLenPolicy policy) {
  std::size_t best = references.front().size();
  for (const auto& ref : references) {
    const std::size_t len = ref.size();
    if (policy == RefLenPolicy::Shortest) {
      best = std::min(best, len);
      continue;
    }
    const auto dist = [&](std::size_t l) {
      return l > candidate_length ? l - candidate_length : candidate_length - l;
    };
    if (dist(len) < dist(best) || (dist(len) == dist(best) && len < best)) best = len;
  }
  return static_cast<double>(best);
}

}  // namespace

BleuStats bleu_stats(std::span<const Token> candidate,
                     std::span<const std::vector<Token>> references, const BleuConfig& cfg) {
  if (references.empty()) throw UsageError("BLEU: at least one reference is required");
  BleuStats stats(cfg.max_order);
  stats.candidate_length = static_cast<double>(candidate.size());
  stats.reference_length = effective_reference_length(candidate.size(), references, cfg.ref_len);
  for (int n = 1; n <= cfg.max_order; ++n) {
    const NGramCounts cand = ngram_counts(candidate, n);
    std::vector<NGramCounts> refs;
    refs.reserve(references.size());
    for (const auto& ref : references) refs.push_back(ngram_counts(ref, n));
    double clipped = 0.0;
    for (const auto& [gram, count] : cand.counts) {
      int max_ref = 0;
      for (const auto& ref : refs) max_ref = std::max(max_ref, ref.count(gram));
      clipped += std::min(count, max_ref);
    }
    const auto idx = static_cast<std::size_t>(n - 1);
    stats.matches[idx] = clipped;
    stats.totals[idx] = static_cast<double>(cand.total());
  }
  return stats;
}

double brevity_penalty(double candidate_length, double reference_length) {
  if (candidate_length <= 0.0) return 0.0;
  if (candidate_length > reference_length) return 1.0;
  return std::exp(1.0 - reference_length / candidate_length);
}

std::vector<double> bleu_from_stats(const BleuStats& stats, const BleuConfig& cfg) {
  const auto orders = static_cast<std::size_t>(cfg.max_order);
  std::vector<double> scores(orders, 0.0);
  if (stats.candidate_length <= 0.0) return scores;

  std::vector<double> log_precision(orders);
  double exp_factor = 1.0;
  for (std::size_t n = 0; n < orders; ++n) {
    const double total = stats.totals[n];
    const double matched = stats.matches[n];
    double p;
    if (matched > 0.0) {
      p = matched / total;
    } else if (cfg.smoothing == BleuSmoothing::Exp) {
      exp_factor *= 2.0;
      p = 1.0 / (exp_factor * std::max(total, 1.0));
    } else {
      p = cfg.smoothing_epsilon / std::max(total, 1.0);
    }
    log_precision[n] = std::log(p);
  }

  const double bp = brevity_penalty(stats.candidate_length, stats.reference_length);
  for (std::size_t k = 1; k <= orders; ++k) {
    double sum = 0.0;
    if (k == orders) {
      for (std::size_t n = 0; n < k; ++n)
        sum += cfg.weight(static_cast<int>(n + 1)) * log_precision[n];
    } else {
      for (std::size_t n = 0; n < k; ++n) sum += log_precision[n] / static_cast<double>(k);
    }
    scores[k - 1] = bp * std::exp(sum);
  }
  return scores;
}

BleuScores bleu_sentence(const TokenizedCaption& candidate,
                         std::span<const TokenizedCaption> refs, const BleuConfig& cfg) {
  cfg.validate();
  if (refs.empty()) throw UsageError("BLEU: at least one reference is required");
  BleuScores out;
  if (candidate.tokens.empty()) {
    out.scores.assign(static_cast<std::size_t>(cfg.max_order), 0.0);
    out.empty_candidate = true;
    return out;
  }
  std::vector<std::vector<Token>> ref_tokens;
  ref_tokens.reserve(refs.size());
  for (const auto& r : refs) ref_tokens.push_back(r.tokens);
  out.scores = bleu_from_stats(bleu_stats(candidate.tokens, ref_tokens, cfg), cfg);
  return out;
}

namespace {

void set_common(Signature& sig, const BleuConfig& cfg) {
  sig.set("n", cfg.max_order);
  sig.set("reflen", cfg.ref_len == RefLenPolicy::Closest ? "closest" : "shortest");
  if (cfg.smoothing == BleuSmoothing::Epsilon)
    sig.set("eps", cfg.smoothing_epsilon);
  else
    sig.set("smooth", "exp");
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
}

}  // namespace

std::string bleu_signature(const BleuConfig& cfg, Scheme scheme, std::string_view name) {
  Signature sig{std::string(name), scheme};
  set_common(sig, cfg);
  return sig.str();
}

MetricReport bleu_corpus(const EvalCorpus& corpus, const BleuConfig& cfg, Scheme scheme) {
  cfg.validate();
  if (corpus.items.empty()) throw UsageError("BLEU: corpus is empty");
  BleuStats total(cfg.max_order);
  MetricReport report;
  report.metric_name = "sacrebleu";
  std::size_t min_refs = corpus.items.front().references.refs.size();
  std::size_t max_refs = min_refs;
  for (const auto& item : corpus.items) {
    const auto cand = tokenize_words(item.candidate.text, scheme);
    std::vector<std::vector<Token>> refs;
    for (const auto& r : item.references.refs) refs.push_back(tokenize_words(r.text, scheme));
    if (refs.empty()) throw UsageError("BLEU: image " + item.image_id + " has no references");
    min_refs = std::min(min_refs, refs.size());
    max_refs = std::max(max_refs, refs.size());
    const BleuStats stats = bleu_stats(cand, refs, cfg);
    total += stats;
    report.per_caption[item.candidate.id] = bleu_from_stats(stats, cfg).back();
  }
  report.aggregate = bleu_from_stats(total, cfg).back();
  Signature sig{"SACREBLEU", scheme};
  set_common(sig, cfg);
  sig.set("nrefs", min_refs == max_refs ? std::to_string(min_refs) : std::string("var"));
  report.signature = sig.str();
  return report;
}

}  // namespace capscore
