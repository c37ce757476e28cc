#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "capscore/corpus.hpp"
#include "capscore/parallel.hpp"
#include "capscore/text.hpp"

namespace capscore {

/// Sorted vocabulary of reference words occurring at least `min_count` times.
struct BagOfWords {
  std::vector<Token> words;
  std::size_t min_count = 4;
  Scheme scheme = Scheme::CocoLite;

  /// Identifies the bag: scheme, threshold, size and a hash of the words.
  std::string signature() const;
};

/// Throws IntegrityError when no word reaches the threshold.
BagOfWords build_bag(std::span<const ReferenceSet> refsets, Scheme scheme,
                     std::size_t min_count = 4);

enum class PerturbKind { Replace, Shuffle, RandomSwap };

std::string_view kind_name(PerturbKind kind);

struct PerturbationSpec {
  PerturbKind kind = PerturbKind::Replace;
  double fraction = 0.25;  // ignored for RandomSwap
  std::uint64_t master_seed = 0;

  void validate() const;
  /// Replace25, Replace50, Shuffle25, ShuffleAll, Random, ...
  std::string tier_name() const;
};

/// Per-caption random source. Draws are defined here rather than through
/// std::uniform_int_distribution so tiers are identical across standard
/// libraries.
class SeedStream {
 public:
  explicit SeedStream(std::uint64_t seed) : engine_(seed) {}

  /// Uniform integer in [0, bound); bound > 0.
  std::uint64_t below(std::uint64_t bound);
  void shuffle(std::span<std::size_t> values);

 private:
  std::mt19937_64 engine_;
};

std::uint64_t fnv1a64(std::string_view bytes);
std::uint64_t splitmix64(std::uint64_t x);
/// Seed for one caption of one tier: a function of master seed, tier salt
/// and caption id only, so results do not depend on evaluation order.
std::uint64_t derive_seed(std::uint64_t master_seed, std::string_view salt,
                          std::string_view caption_id);

/// round(fraction * length), halves rounded up.
std::size_t perturbed_count(double fraction, std::size_t length);

TokenizedCaption perturb_replace(const TokenizedCaption& caption, double fraction,
                                 const BagOfWords& bag, SeedStream& rng);
TokenizedCaption perturb_shuffle(const TokenizedCaption& caption, double fraction,
                                 SeedStream& rng);

/// Seeded derangement: caption i receives the text of another image's
/// caption. Throws UsageError for fewer than two captions.
std::vector<Caption> assign_random_captions(std::span<const Caption> captions, std::uint64_t seed);

struct GeneratedTier {
  std::string name;
  std::vector<Caption> captions;
  /// Captions whose perturbed count rounded to zero and were passed through.
  std::size_t passthrough = 0;
};

/// Normalises each caption with the given scheme and applies the spec. Tier
/// caption ids are "<tier>/<image_id>".
GeneratedTier generate_tier(std::span<const Caption> human, const PerturbationSpec& spec,
                            const BagOfWords* bag, Scheme scheme,
                            Execution exec = Execution::Parallel);

/// The pristine tier in the same normalised form as the perturbed tiers.
GeneratedTier normalized_tier(std::span<const Caption> human, const std::string& name,
                              Scheme scheme);

}  // namespace capscore
