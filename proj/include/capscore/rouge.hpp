#pragma once

#include <span>
#include <string>

#include "capscore/text.hpp"

namespace capscore {

enum class RougeBetaMode {
  Ratio,  // beta = P_lcs / R_lcs
  Fixed,
};

enum class RougeMultiRef {
  /// Best per-reference F.
  Max,
  /// Best precision and best recall taken separately, then combined; this
  /// is how the COCO caption toolkit aggregates references.
  PrMax,
};

struct RougeConfig {
  RougeBetaMode beta_mode = RougeBetaMode::Fixed;
  double beta = 1.2;
  RougeMultiRef multi_ref = RougeMultiRef::Max;

  void validate() const;
};

std::size_t lcs_length(std::span<const Token> a, std::span<const Token> b);

/// F_lcs for one (recall, precision) pair under the configured beta.
double rouge_f(double recall, double precision, const RougeConfig& cfg);

/// Throws UsageError on empty input.
double rouge_l(const TokenizedCaption& candidate, std::span<const TokenizedCaption> refs,
               const RougeConfig& cfg);

std::string rouge_signature(const RougeConfig& cfg, Scheme scheme);

}  // namespace capscore
