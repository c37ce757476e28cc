#include "capscore/rouge.hpp"

#include <algorithm>
#include <vector>

#include "capscore/error.hpp"
#include "capscore/signature.hpp"

namespace capscore {

void RougeConfig::validate() const {
  if (beta_mode == RougeBetaMode::Fixed && !(beta > 0.0))
    throw UsageError("ROUGE-L: fixed beta must be positive");
}

std::size_t lcs_length(std::span<const Token> a, std::span<const Token> b) {
  if (a.size() < b.size()) std::swap(a, b);
  std::vector<std::size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j)
      cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

double rouge_f(double recall, double precision, const RougeConfig& cfg) {
  if (recall <= 0.0 || precision <= 0.0) return 0.0;
  const double beta = cfg.beta_mode == RougeBetaMode::Ratio ? precision / recall : cfg.beta;
  const double b2 = beta * beta;
  return (1.0 + b2) * recall * precision / (recall + b2 * precision);
}

double rouge_l(const TokenizedCaption& candidate, std::span<const TokenizedCaption> refs,
               const RougeConfig& cfg) {
  cfg.validate();
  if (candidate.tokens.empty()) throw UsageError("ROUGE-L: empty candidate");
  if (refs.empty()) throw UsageError("ROUGE-L: no references");
  const double n = static_cast<double>(candidate.tokens.size());
  double best_f = 0.0, best_p = 0.0, best_r = 0.0;
  for (const auto& ref : refs) {
    if (ref.tokens.empty()) throw UsageError("ROUGE-L: empty reference");
    const double lcs = static_cast<double>(lcs_length(candidate.tokens, ref.tokens));
    const double r = lcs / static_cast<double>(ref.tokens.size());
    const double p = lcs / n;
    best_f = std::max(best_f, rouge_f(r, p, cfg));
    best_p = std::max(best_p, p);
    best_r = std::max(best_r, r);
  }
  return cfg.multi_ref == RougeMultiRef::Max ? best_f : rouge_f(best_r, best_p, cfg);
}

std::string rouge_signature(const RougeConfig& cfg, Scheme scheme) {
  Signature sig{"ROUGE-L", scheme};
  if (cfg.beta_mode == RougeBetaMode::Ratio)
    sig.set("beta", "ratio");
  else
    sig.set("beta", cfg.beta);
  sig.set("refs", cfg.multi_ref == RougeMultiRef::Max ? "max" : "pr-max");
  return sig.str();
}

}  // namespace capscore
