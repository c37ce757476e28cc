#include "capscore/perturb.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <limits>
#include <numeric>

#include "capscore/error.hpp"
#include "capscore/signature.hpp"

namespace capscore {

std::string BagOfWords::signature() const {
  std::uint64_t h = fnv1a64("");
  for (const auto& w : words) h = splitmix64(h ^ fnv1a64(w));
  char hex[17];
  std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(h));
  Signature sig{"BOW", scheme};
  sig.set("hash", std::string(hex));
  sig.set("min", static_cast<int>(min_count));
  sig.set("size", static_cast<int>(words.size()));
  return sig.str();
}

BagOfWords build_bag(std::span<const ReferenceSet> refsets, Scheme scheme, std::size_t min_count) {
  if (refsets.empty()) throw UsageError("bag of words: no reference sets");
  std::map<Token, std::size_t> counts;
  for (const auto& set : refsets)
    for (const auto& ref : set.refs)
      for (auto& tok : tokenize_words(ref.text, scheme)) ++counts[std::move(tok)];
  BagOfWords bag;
  bag.min_count = min_count;
  bag.scheme = scheme;
  for (const auto& [word, count] : counts)
    if (count >= min_count) bag.words.push_back(word);
  if (bag.words.empty())
    throw IntegrityError("bag of words is empty at min_count " + std::to_string(min_count));
  return bag;
}

std::string_view kind_name(PerturbKind kind) {
  switch (kind) {
    case PerturbKind::Replace:
      return "replace";
    case PerturbKind::Shuffle:
      return "shuffle";
    case PerturbKind::RandomSwap:
      return "random";
  }
  return "unknown";
}

void PerturbationSpec::validate() const {
  if (kind != PerturbKind::RandomSwap && !(fraction >= 0.0 && fraction <= 1.0))
    throw UsageError("perturbation fraction must lie in [0,1]");
}

std::string PerturbationSpec::tier_name() const {
  if (kind == PerturbKind::RandomSwap) return "Random";
  const std::string base = kind == PerturbKind::Replace ? "Replace" : "Shuffle";
  if (kind == PerturbKind::Shuffle && fraction == 1.0) return base + "All";
  const double pct = fraction * 100.0;
  if (pct == std::floor(pct)) return base + std::to_string(static_cast<int>(pct));
  return base + format_number(pct);
}

std::uint64_t SeedStream::below(std::uint64_t bound) {
  // rejection sampling on the top of the range keeps the draw unbiased
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return x % bound;
}

void SeedStream::shuffle(std::span<std::size_t> values) {
  for (std::size_t i = values.size(); i > 1; --i) std::swap(values[i - 1], values[below(i)]);
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master_seed, std::string_view salt,
                          std::string_view caption_id) {
  return splitmix64(splitmix64(master_seed ^ fnv1a64(salt)) ^ fnv1a64(caption_id));
}

std::size_t perturbed_count(double fraction, std::size_t length) {
  const double k = std::floor(fraction * static_cast<double>(length) + 0.5);
  return std::min(length, static_cast<std::size_t>(std::max(0.0, k)));
}

namespace {

// First k entries of a uniformly shuffled index list, i.e. k positions
// drawn without replacement.
std::vector<std::size_t> choose_positions(std::size_t length, std::size_t k, SeedStream& rng) {
  std::vector<std::size_t> idx(length);
  std::iota(idx.begin(), idx.end(), 0);
  for (std::size_t i = 0; i < k; ++i) std::swap(idx[i], idx[i + rng.below(length - i)]);
  idx.resize(k);
  return idx;
}

}  // namespace

TokenizedCaption perturb_replace(const TokenizedCaption& caption, double fraction,
                                 const BagOfWords& bag, SeedStream& rng) {
  if (bag.words.empty()) throw UsageError("replace: bag of words is empty");
  TokenizedCaption out = caption;
  const std::size_t k = perturbed_count(fraction, caption.tokens.size());
  for (std::size_t pos : choose_positions(caption.tokens.size(), k, rng))
    out.tokens[pos] = bag.words[rng.below(bag.words.size())];
  return out;
}

TokenizedCaption perturb_shuffle(const TokenizedCaption& caption, double fraction,
                                 SeedStream& rng) {
  TokenizedCaption out = caption;
  const std::size_t k = perturbed_count(fraction, caption.tokens.size());
  if (k < 2) return out;
  auto positions = choose_positions(caption.tokens.size(), k, rng);
  std::sort(positions.begin(), positions.end());
  std::vector<std::size_t> perm(k);
  for (int attempt = 0; attempt <= 10; ++attempt) {
    std::iota(perm.begin(), perm.end(), 0);
    rng.shuffle(perm);
    bool identity = true;
    for (std::size_t i = 0; i < k && identity; ++i) identity = perm[i] == i;
    if (!identity) break;
  }
  for (std::size_t i = 0; i < k; ++i) out.tokens[positions[i]] = caption.tokens[positions[perm[i]]];
  return out;
}

std::vector<Caption> assign_random_captions(std::span<const Caption> captions,
                                            std::uint64_t seed) {
  if (captions.size() < 2) throw UsageError("random swap needs at least two captions");
  SeedStream rng(splitmix64(seed ^ fnv1a64("random-swap")));
  std::vector<std::size_t> perm(captions.size());
  for (;;) {
    std::iota(perm.begin(), perm.end(), 0);
    rng.shuffle(perm);
    bool fixed_point = false;
    for (std::size_t i = 0; i < perm.size() && !fixed_point; ++i) fixed_point = perm[i] == i;
    if (!fixed_point) break;
  }
  std::vector<Caption> out;
  out.reserve(captions.size());
  for (std::size_t i = 0; i < captions.size(); ++i)
    out.push_back(Caption{captions[i].id, captions[i].image_id, captions[perm[i]].text});
  return out;
}

GeneratedTier normalized_tier(std::span<const Caption> human, const std::string& name,
                              Scheme scheme) {
  GeneratedTier tier;
  tier.name = name;
  tier.captions.reserve(human.size());
  for (const auto& c : human)
    tier.captions.push_back(
        Caption{name + "/" + c.image_id, c.image_id, join_tokens(tokenize_words(c.text, scheme))});
  return tier;
}

GeneratedTier generate_tier(std::span<const Caption> human, const PerturbationSpec& spec,
                            const BagOfWords* bag, Scheme scheme, Execution exec) {
  spec.validate();
  GeneratedTier tier;
  tier.name = spec.tier_name();
  if (spec.kind == PerturbKind::RandomSwap) {
    GeneratedTier base = normalized_tier(human, tier.name, scheme);
    tier.captions = assign_random_captions(base.captions, spec.master_seed);
    return tier;
  }
  if (spec.kind == PerturbKind::Replace && (bag == nullptr || bag->words.empty()))
    throw IntegrityError("replace tier needs a non-empty bag of words");

  const std::string salt = tier.name;
  tier.captions.resize(human.size());
  std::vector<char> passthrough(human.size(), 0);
  auto one = [&](std::size_t i) {
    const Caption& c = human[i];
    const TokenizedCaption tokens = tokenize(c.text, scheme, c.id);
    SeedStream rng(derive_seed(spec.master_seed, salt, c.id));
    const TokenizedCaption out = spec.kind == PerturbKind::Replace
                                     ? perturb_replace(tokens, spec.fraction, *bag, rng)
                                     : perturb_shuffle(tokens, spec.fraction, rng);
    const std::size_t k = perturbed_count(spec.fraction, tokens.tokens.size());
    passthrough[i] = spec.kind == PerturbKind::Replace ? k == 0 : k < 2;
    tier.captions[i] = Caption{tier.name + "/" + c.image_id, c.image_id, join_tokens(out.tokens)};
  };
  if (exec == Execution::Serial) {
    for (std::size_t i = 0; i < human.size(); ++i) one(i);
  } else {
    parallel_for(human.size(), one);
  }
  tier.passthrough = static_cast<std::size_t>(std::count(passthrough.begin(), passthrough.end(), 1));
  return tier;
}

}  // namespace capscore
