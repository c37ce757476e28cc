#include "capscore/metric.hpp"

#include <numeric>

#include "capscore/error.hpp"
#include "capscore/signature.hpp"

namespace capscore {

double Metric::aggregate(std::span<const Caption* const> candidates,
                         std::span<const ReferenceSet* const> refs,
                         std::span<const double> scores) const {
  (void)candidates;
  (void)refs;
  if (scores.empty()) return 0.0;
  return std::accumulate(scores.begin(), scores.end(), 0.0) / static_cast<double>(scores.size());
}

void TokenizingMetric::prepare(std::span<const ReferenceSet> refsets) {
  cache_.clear();
  cache_.reserve(refsets.size());
  for (const auto& set : refsets) {
    std::vector<TokenizedCaption> refs;
    refs.reserve(set.refs.size());
    for (const auto& r : set.refs) refs.push_back(tokenize(r.text, scheme_, r.id));
    cache_.emplace(set.image_id, std::move(refs));
  }
}

std::vector<TokenizedCaption> TokenizingMetric::references(const ReferenceSet& refs) const {
  if (auto it = cache_.find(refs.image_id);
      it != cache_.end() && it->second.size() == refs.refs.size())
    return it->second;
  std::vector<TokenizedCaption> out;
  out.reserve(refs.refs.size());
  for (const auto& r : refs.refs) out.push_back(tokenize(r.text, scheme_, r.id));
  return out;
}

TokenizedCaption TokenizingMetric::candidate_tokens(const Caption& c) const {
  return tokenize(c.text, scheme_, c.id);
}

// ---------------------------------------------------------------------------

BleuMetric::BleuMetric(int order, BleuConfig cfg, Scheme scheme)
    : TokenizingMetric(scheme), order_(order), cfg_(std::move(cfg)) {
  cfg_.validate();
  if (order_ < 1 || order_ > cfg_.max_order)
    throw UsageError("BLEU: order " + std::to_string(order_) + " outside 1.." +
                     std::to_string(cfg_.max_order));
}

std::string BleuMetric::name() const { return "bleu-" + std::to_string(order_); }

std::string BleuMetric::signature() const {
  BleuConfig shown = cfg_;
  shown.max_order = order_;
  if (order_ != cfg_.max_order) shown.weights.clear();
  return bleu_signature(shown, scheme(), "BLEU-" + std::to_string(order_));
}

double BleuMetric::score(const Caption& candidate, const ReferenceSet& refs) const {
  const auto cand = candidate_tokens(candidate);
  const auto r = references(refs);
  return bleu_sentence(cand, r, cfg_).scores[static_cast<std::size_t>(order_ - 1)];
}

// ---------------------------------------------------------------------------

StandardizedBleuMetric::StandardizedBleuMetric(BleuConfig cfg, Scheme scheme)
    : TokenizingMetric(scheme), cfg_(std::move(cfg)) {
  cfg_.validate();
}

std::string StandardizedBleuMetric::signature() const {
  return bleu_signature(cfg_, scheme(), "SACREBLEU");
}

BleuStats StandardizedBleuMetric::stats(const Caption& candidate, const ReferenceSet& refs) const {
  const auto cand = candidate_tokens(candidate);
  std::vector<std::vector<Token>> r;
  for (auto& t : references(refs)) r.push_back(std::move(t.tokens));
  return bleu_stats(cand.tokens, r, cfg_);
}

double StandardizedBleuMetric::score(const Caption& candidate, const ReferenceSet& refs) const {
  return bleu_from_stats(stats(candidate, refs), cfg_).back();
}

double StandardizedBleuMetric::aggregate(std::span<const Caption* const> candidates,
                                         std::span<const ReferenceSet* const> refs,
                                         std::span<const double> scores) const {
  (void)scores;
  BleuStats total(cfg_.max_order);
  for (std::size_t i = 0; i < candidates.size(); ++i) total += stats(*candidates[i], *refs[i]);
  return bleu_from_stats(total, cfg_).back();
}

// ---------------------------------------------------------------------------

MeteorMetric::MeteorMetric(MeteorConfig cfg, std::shared_ptr<const SynonymTable> synonyms,
                           Scheme scheme)
    : TokenizingMetric(scheme), cfg_(std::move(cfg)), synonyms_(std::move(synonyms)) {
  cfg_.validate();
  if (!synonyms_) synonyms_ = std::make_shared<SynonymTable>();
}

std::string MeteorMetric::signature() const {
  return meteor_signature(cfg_, scheme(), !synonyms_->empty());
}

double MeteorMetric::score(const Caption& candidate, const ReferenceSet& refs) const {
  const auto cand = candidate_tokens(candidate);
  if (cand.tokens.empty()) return 0.0;
  return meteor(cand, references(refs), cfg_, *synonyms_);
}

// ---------------------------------------------------------------------------

RougeMetric::RougeMetric(RougeConfig cfg, Scheme scheme)
    : TokenizingMetric(scheme), cfg_(cfg) {
  cfg_.validate();
}

std::string RougeMetric::signature() const { return rouge_signature(cfg_, scheme()); }

double RougeMetric::score(const Caption& candidate, const ReferenceSet& refs) const {
  const auto cand = candidate_tokens(candidate);
  if (cand.tokens.empty()) return 0.0;
  return rouge_l(cand, references(refs), cfg_);
}

// ---------------------------------------------------------------------------

CiderMetric::CiderMetric(CiderConfig cfg, Scheme scheme, bool stem)
    : TokenizingMetric(scheme), cfg_(std::move(cfg)), stem_(stem) {
  cfg_.validate();
}

void CiderMetric::prepare(std::span<const ReferenceSet> refsets) {
  TokenizingMetric::prepare(refsets);
  stats_ = std::make_unique<CorpusStats>(cider_build_stats(refsets, scheme(), stem_, cfg_.max_order));
}

std::string CiderMetric::signature() const {
  if (stats_) return cider_signature(cfg_, *stats_);
  CorpusStats unprepared;
  unprepared.scheme = scheme();
  unprepared.stemmed = stem_;
  unprepared.max_order = cfg_.max_order;
  return cider_signature(cfg_, unprepared);
}

double CiderMetric::score(const Caption& candidate, const ReferenceSet& refs) const {
  if (!stats_) throw UsageError("CIDEr: prepare() must run before scoring");
  return cider_score(candidate_tokens(candidate), references(refs), *stats_, cfg_);
}

// ---------------------------------------------------------------------------

namespace {

std::vector<std::string> reference_ids(const ReferenceSet& refs) {
  std::vector<std::string> ids;
  ids.reserve(refs.refs.size());
  for (const auto& r : refs.refs) ids.push_back(r.id);
  return ids;
}

}  // namespace

BertScoreMetric::BertScoreMetric(std::shared_ptr<const EmbeddingBundle> bundle,
                                 std::shared_ptr<const TokenWeights> weights)
    : bundle_(std::move(bundle)), weights_(std::move(weights)) {
  if (!bundle_) throw UsageError("bertscore needs an embedding bundle");
}

std::string BertScoreMetric::signature() const {
  Signature sig{"BERTScore", Scheme::CocoLite};
  sig.set("dim", static_cast<int>(bundle_->dim));
  sig.set("f", "f1");
  sig.set("idf", weights_ ? "table" : "none");
  sig.set("refs", "best-f1");
  sig.set("rescale", "none");
  return sig.str();
}

double BertScoreMetric::score(const Caption& candidate, const ReferenceSet& refs) const {
  const auto ids = reference_ids(refs);
  return bertscore(candidate.id, ids, *bundle_, weights_.get()).f1;
}

ClipScoreMetric::ClipScoreMetric(std::shared_ptr<const EmbeddingBundle> bundle, bool with_refs,
                                 double w)
    : bundle_(std::move(bundle)), with_refs_(with_refs), w_(w) {
  if (!bundle_) throw UsageError(name() + " needs an embedding bundle");
  if (!(w_ > 0.0)) throw UsageError("CLIPScore: w must be positive");
}

std::string ClipScoreMetric::signature() const {
  Signature sig{with_refs_ ? "CLIPScore-ref" : "CLIPScore", Scheme::CocoLite};
  sig.set("dim", static_cast<int>(bundle_->dim));
  sig.set("w", w_);
  return sig.str();
}

double ClipScoreMetric::score(const Caption& candidate, const ReferenceSet& refs) const {
  if (!with_refs_) return clipscore(candidate.image_id, candidate.id, *bundle_, w_);
  const auto ids = reference_ids(refs);
  return clipscore_ref(candidate.image_id, candidate.id, ids, *bundle_, w_);
}

ExternalScoreMetric::ExternalScoreMetric(ExternalScores scores) : scores_(std::move(scores)) {}

std::string ExternalScoreMetric::signature() const {
  return scores_.metric + "|src:external|n:" + std::to_string(scores_.scores.size()) + "|v:" +
         std::string(kVersion);
}

double ExternalScoreMetric::score(const Caption& candidate, const ReferenceSet& refs) const {
  (void)refs;
  auto it = scores_.scores.find(candidate.id);
  if (it == scores_.scores.end())
    throw IntegrityError(scores_.metric + ": no external score for caption " + candidate.id);
  return it->second;
}

// ---------------------------------------------------------------------------

std::vector<std::string> registered_metric_names() {
  return {"bleu-1",  "bleu-2",    "bleu-3",    "bleu-4",    "sacrebleu",    "meteor",
          "rouge-l", "cider", "bertscore", "clipscore", "clipscore-ref"};
}

std::unique_ptr<Metric> make_metric(const std::string& name, const MetricResources& res) {
  if (name.size() == 6 && name.starts_with("bleu-") && name[5] >= '1' && name[5] <= '4')
    return std::make_unique<BleuMetric>(name[5] - '0', BleuConfig{}, res.scheme);
  if (name == "sacrebleu") return std::make_unique<StandardizedBleuMetric>();
  if (name == "meteor") return std::make_unique<MeteorMetric>(MeteorConfig{}, res.synonyms, res.scheme);
  if (name == "rouge-l") return std::make_unique<RougeMetric>(RougeConfig{}, res.scheme);
  if (name == "cider") return std::make_unique<CiderMetric>(CiderConfig{}, res.scheme);
  if (name == "bertscore" || name == "clipscore" || name == "clipscore-ref") {
    if (!res.embeddings) throw UsageError("metric " + name + " needs --embeddings");
    if (name == "bertscore") return std::make_unique<BertScoreMetric>(res.embeddings);
    return std::make_unique<ClipScoreMetric>(res.embeddings, name == "clipscore-ref", res.clip_w);
  }
  throw UsageError("unknown metric '" + name + "'");
}

}  // namespace capscore
