#pragma once

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "capscore/bleu.hpp"
#include "capscore/cider.hpp"
#include "capscore/corpus.hpp"
#include "capscore/embedding.hpp"
#include "capscore/meteor.hpp"
#include "capscore/rouge.hpp"

namespace capscore {

/// A caption-level scorer. prepare() runs once, sequentially, before any
/// scoring; score() must then be safe to call concurrently.
class Metric {
 public:
  virtual ~Metric() = default;

  virtual std::string name() const = 0;
  virtual std::string signature() const = 0;

  /// Receives every reference set of the evaluation corpus.
  virtual void prepare(std::span<const ReferenceSet> refsets) { (void)refsets; }

  virtual double score(const Caption& candidate, const ReferenceSet& refs) const = 0;

  /// Corpus-level value from per-caption scores; the mean unless overridden.
  virtual double aggregate(std::span<const Caption* const> candidates,
                           std::span<const ReferenceSet* const> refs,
                           std::span<const double> scores) const;
};

/// Shared plumbing for the n-gram metrics: caches tokenized references per
/// image after prepare().
class TokenizingMetric : public Metric {
 public:
  explicit TokenizingMetric(Scheme scheme) : scheme_(scheme) {}

  void prepare(std::span<const ReferenceSet> refsets) override;
  Scheme scheme() const { return scheme_; }

 protected:
  std::vector<TokenizedCaption> references(const ReferenceSet& refs) const;
  TokenizedCaption candidate_tokens(const Caption& c) const;

 private:
  Scheme scheme_;
  std::unordered_map<std::string, std::vector<TokenizedCaption>> cache_;
};

/// Sentence BLEU_k for one order k <= cfg.max_order.
class BleuMetric final : public TokenizingMetric {
 public:
  BleuMetric(int order, BleuConfig cfg = {}, Scheme scheme = Scheme::CocoLite);
  std::string name() const override;
  std::string signature() const override;
  double score(const Caption& candidate, const ReferenceSet& refs) const override;

 private:
  int order_;
  BleuConfig cfg_;
};

/// Standardized BLEU. score() treats the caption as a one-item corpus;
/// aggregate() pools statistics over all captions.
class StandardizedBleuMetric final : public TokenizingMetric {
 public:
  explicit StandardizedBleuMetric(BleuConfig cfg = BleuConfig::standardized(),
                                  Scheme scheme = Scheme::IntlLite);
  std::string name() const override { return "sacrebleu"; }
  std::string signature() const override;
  double score(const Caption& candidate, const ReferenceSet& refs) const override;
  double aggregate(std::span<const Caption* const> candidates,
                   std::span<const ReferenceSet* const> refs,
                   std::span<const double> scores) const override;

 private:
  BleuStats stats(const Caption& candidate, const ReferenceSet& refs) const;
  BleuConfig cfg_;
};

class MeteorMetric final : public TokenizingMetric {
 public:
  MeteorMetric(MeteorConfig cfg = {}, std::shared_ptr<const SynonymTable> synonyms = nullptr,
               Scheme scheme = Scheme::CocoLite);
  std::string name() const override { return "meteor"; }
  std::string signature() const override;
  double score(const Caption& candidate, const ReferenceSet& refs) const override;

 private:
  MeteorConfig cfg_;
  std::shared_ptr<const SynonymTable> synonyms_;
};

class RougeMetric final : public TokenizingMetric {
 public:
  explicit RougeMetric(RougeConfig cfg = {}, Scheme scheme = Scheme::CocoLite);
  std::string name() const override { return "rouge-l"; }
  std::string signature() const override;
  double score(const Caption& candidate, const ReferenceSet& refs) const override;

 private:
  RougeConfig cfg_;
};

/// Document frequencies are computed in prepare() over the corpus references.
class CiderMetric final : public TokenizingMetric {
 public:
  explicit CiderMetric(CiderConfig cfg = {}, Scheme scheme = Scheme::CocoLite, bool stem = true);
  std::string name() const override { return "cider"; }
  std::string signature() const override;
  void prepare(std::span<const ReferenceSet> refsets) override;
  double score(const Caption& candidate, const ReferenceSet& refs) const override;

 private:
  CiderConfig cfg_;
  bool stem_;
  std::unique_ptr<CorpusStats> stats_;
};

/// BERTScore F1 over externally exported token embeddings.
class BertScoreMetric final : public Metric {
 public:
  explicit BertScoreMetric(std::shared_ptr<const EmbeddingBundle> bundle,
                           std::shared_ptr<const TokenWeights> weights = nullptr);
  std::string name() const override { return "bertscore"; }
  std::string signature() const override;
  double score(const Caption& candidate, const ReferenceSet& refs) const override;

 private:
  std::shared_ptr<const EmbeddingBundle> bundle_;
  std::shared_ptr<const TokenWeights> weights_;
};

class ClipScoreMetric final : public Metric {
 public:
  ClipScoreMetric(std::shared_ptr<const EmbeddingBundle> bundle, bool with_refs, double w = 1.0);
  std::string name() const override { return with_refs_ ? "clipscore-ref" : "clipscore"; }
  std::string signature() const override;
  double score(const Caption& candidate, const ReferenceSet& refs) const override;

 private:
  std::shared_ptr<const EmbeddingBundle> bundle_;
  bool with_refs_;
  double w_;
};

/// Scores read from a file produced by an external tool (e.g. SPICE).
class ExternalScoreMetric final : public Metric {
 public:
  explicit ExternalScoreMetric(ExternalScores scores);
  std::string name() const override { return scores_.metric; }
  std::string signature() const override;
  double score(const Caption& candidate, const ReferenceSet& refs) const override;

 private:
  ExternalScores scores_;
};

/// Wraps a callable; handy for oracle and constant scorers in experiments.
class FunctionMetric final : public Metric {
 public:
  using Fn = std::function<double(const Caption&, const ReferenceSet&)>;
  FunctionMetric(std::string name, Fn fn) : name_(std::move(name)), fn_(std::move(fn)) {}
  std::string name() const override { return name_; }
  std::string signature() const override { return name_ + "|v:0.1.0"; }
  double score(const Caption& candidate, const ReferenceSet& refs) const override {
    return fn_(candidate, refs);
  }

 private:
  std::string name_;
  Fn fn_;
};

/// Inputs a metric may need beyond the captions themselves.
struct MetricResources {
  Scheme scheme = Scheme::CocoLite;
  std::shared_ptr<const SynonymTable> synonyms;
  std::shared_ptr<const EmbeddingBundle> embeddings;
  double clip_w = 1.0;
};

/// Names: bleu-1..bleu-4, sacrebleu, meteor, rouge-l, cider, bertscore,
/// clipscore, clipscore-ref. Throws UsageError for unknown names and when an
/// embedding metric is requested without embeddings.
std::unique_ptr<Metric> make_metric(const std::string& name, const MetricResources& resources);

std::vector<std::string> registered_metric_names();

}  // namespace capscore
