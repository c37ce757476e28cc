#include "capscore/meteor.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "capscore/error.hpp"
#include "capscore/signature.hpp"

namespace capscore {

void MeteorConfig::validate() const {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw UsageError("METEOR: alpha must lie in [0,1]");
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw UsageError("METEOR: gamma must lie in [0,1]");
  if (!(beta >= 0.0)) throw UsageError("METEOR: beta must be >= 0");
}

int count_chunks(std::span<const int> ref_of) {
  int chunks = 0;
  int prev_cand = -2;
  int prev_ref = -2;
  for (int i = 0; i < static_cast<int>(ref_of.size()); ++i) {
    const int j = ref_of[static_cast<std::size_t>(i)];
    if (j < 0) continue;
    if (!(i == prev_cand + 1 && j == prev_ref + 1)) ++chunks;
    prev_cand = i;
    prev_ref = j;
  }
  return chunks;
}

namespace {

constexpr long kSearchBudget = 4000;

// Pairs tokens sharing a key (surface form or stem) among the still
// unaligned positions. Every key contributes min(#cand, #ref) matches; which
// occurrences pair up is chosen to minimise the chunk count of the whole
// alignment, by depth-first search with a node budget.
class KeyedAligner {
 public:
  KeyedAligner(std::vector<int>& ref_of, std::vector<char>& ref_used,
               const std::vector<Token>& cand_keys, const std::vector<Token>& ref_keys)
      : ref_of_(ref_of), ref_used_(ref_used) {
    std::map<std::string, int> key_id;
    auto id_of = [&](const Token& k) {
      return key_id.emplace(k, static_cast<int>(key_id.size())).first->second;
    };
    for (std::size_t j = 0; j < ref_keys.size(); ++j) {
      if (ref_used_[j]) continue;
      const int id = id_of(ref_keys[j]);
      if (static_cast<std::size_t>(id) >= pool_.size()) pool_.resize(id + 1);
      pool_[id].push_back(static_cast<int>(j));
    }
    for (std::size_t i = 0; i < cand_keys.size(); ++i) {
      if (ref_of_[i] >= 0) continue;
      auto it = key_id.find(cand_keys[i]);
      if (it == key_id.end()) continue;
      open_.push_back({static_cast<int>(i), it->second});
    }
    quota_.assign(pool_.size(), 0);
    remaining_cands_.assign(pool_.size(), 0);
    for (const auto& o : open_) ++remaining_cands_[o.key];
    for (std::size_t k = 0; k < pool_.size(); ++k)
      quota_[k] = std::min<int>(remaining_cands_[k], static_cast<int>(pool_[k].size()));
  }

  void run() {
    if (open_.empty()) return;
    best_chunks_ = -1;
    search(0);
    for (std::size_t i = 0; i < best_.size(); ++i) {
      if (best_[i] < 0) continue;
      ref_of_[static_cast<std::size_t>(open_[i].cand)] = best_[i];
      ref_used_[static_cast<std::size_t>(best_[i])] = 1;
    }
  }

 private:
  struct Open {
    int cand;
    int key;
  };

  void search(std::size_t idx) {
    if (nodes_++ > kSearchBudget && best_chunks_ >= 0) return;
    if (idx == open_.size()) {
      const int chunks = count_chunks(ref_of_);
      if (best_chunks_ < 0 || chunks < best_chunks_) {
        best_chunks_ = chunks;
        best_.resize(open_.size());
        for (std::size_t i = 0; i < open_.size(); ++i)
          best_[i] = ref_of_[static_cast<std::size_t>(open_[i].cand)];
      }
      return;
    }
    const Open o = open_[idx];
    const auto key = static_cast<std::size_t>(o.key);
    const int cand_pos = o.cand;
    --remaining_cands_[key];

    if (quota_[key] > 0) {
      // Try the reference position continuing the previous match first; the
      // first leaf reached is then a sensible greedy alignment.
      const int prev_ref = cand_pos > 0 ? ref_of_[static_cast<std::size_t>(cand_pos - 1)] : -2;
      std::vector<int> order;
      for (int j : pool_[key])
        if (!ref_used_[static_cast<std::size_t>(j)]) order.push_back(j);
      std::stable_partition(order.begin(), order.end(), [&](int j) { return j == prev_ref + 1; });
      for (int j : order) {
        ref_used_[static_cast<std::size_t>(j)] = 1;
        ref_of_[static_cast<std::size_t>(cand_pos)] = j;
        --quota_[key];
        search(idx + 1);
        ++quota_[key];
        ref_of_[static_cast<std::size_t>(cand_pos)] = -1;
        ref_used_[static_cast<std::size_t>(j)] = 0;
        if (nodes_ > kSearchBudget && best_chunks_ >= 0) break;
      }
    }
    // Leaving this token unaligned is allowed only while later tokens with
    // the same key can still fill the quota.
    if (remaining_cands_[key] >= quota_[key] && !(nodes_ > kSearchBudget && best_chunks_ >= 0))
      search(idx + 1);
    ++remaining_cands_[key];
  }

  std::vector<int>& ref_of_;
  std::vector<char>& ref_used_;
  std::vector<std::vector<int>> pool_;
  std::vector<Open> open_;
  std::vector<int> quota_;
  std::vector<int> remaining_cands_;
  std::vector<int> best_;
  int best_chunks_ = -1;
  long nodes_ = 0;
};

}  // namespace

MeteorAlignment meteor_align(std::span<const Token> candidate, std::span<const Token> reference,
                             const MeteorConfig& cfg, const SynonymTable& synonyms) {
  MeteorAlignment out;
  out.ref_of.assign(candidate.size(), -1);
  std::vector<char> ref_used(reference.size(), 0);

  for (MatchStage stage : cfg.stages) {
    switch (stage) {
      case MatchStage::Exact: {
        const std::vector<Token> ck(candidate.begin(), candidate.end());
        const std::vector<Token> rk(reference.begin(), reference.end());
        KeyedAligner(out.ref_of, ref_used, ck, rk).run();
        break;
      }
      case MatchStage::Stem:
        KeyedAligner(out.ref_of, ref_used, stem_all(candidate), stem_all(reference)).run();
        break;
      case MatchStage::Synonym:
        if (synonyms.empty()) break;
        for (std::size_t i = 0; i < candidate.size(); ++i) {
          if (out.ref_of[i] >= 0) continue;
          for (std::size_t j = 0; j < reference.size(); ++j) {
            if (ref_used[j] || !synonyms.are_synonyms(candidate[i], reference[j])) continue;
            out.ref_of[i] = static_cast<int>(j);
            ref_used[j] = 1;
            break;
          }
        }
        break;
    }
  }

  out.matches = static_cast<int>(std::count_if(out.ref_of.begin(), out.ref_of.end(),
                                               [](int j) { return j >= 0; }));
  if (out.matches == 0) return out;
  out.chunks = count_chunks(out.ref_of);
  const double m = out.matches;
  out.precision = m / static_cast<double>(candidate.size());
  out.recall = m / static_cast<double>(reference.size());
  out.fmean = out.precision * out.recall /
              (cfg.alpha * out.precision + (1.0 - cfg.alpha) * out.recall);
  const double frag = out.chunks / m;
  out.penalty = cfg.gamma * std::pow(frag, cfg.beta);
  out.score = (1.0 - out.penalty) * out.fmean;
  return out;
}

double meteor(const TokenizedCaption& candidate, std::span<const TokenizedCaption> refs,
              const MeteorConfig& cfg, const SynonymTable& synonyms) {
  cfg.validate();
  if (candidate.tokens.empty()) throw UsageError("METEOR: empty candidate");
  if (refs.empty()) throw UsageError("METEOR: no references");
  double best = 0.0;
  for (const auto& ref : refs) {
    if (ref.tokens.empty()) throw UsageError("METEOR: empty reference");
    best = std::max(best, meteor_align(candidate.tokens, ref.tokens, cfg, synonyms).score);
  }
  return best;
}

std::string meteor_signature(const MeteorConfig& cfg, Scheme scheme, bool synonyms_loaded) {
  Signature sig{"METEOR", scheme};
  sig.set("alpha", cfg.alpha);
  sig.set("beta", cfg.beta);
  sig.set("gamma", cfg.gamma);
  std::string stages;
  for (MatchStage s : cfg.stages) {
    if (!stages.empty()) stages += ',';
    stages += s == MatchStage::Exact ? "exact" : s == MatchStage::Stem ? "stem" : "synonym";
  }
  sig.set("stages", stages);
  sig.set("syn", synonyms_loaded ? "table" : "none");
  return sig.str();
}

}  // namespace capscore
