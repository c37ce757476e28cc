#include "capscore/rankeval.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_map>

#include "capscore/error.hpp"
#include "capscore/perturb.hpp"
#include "capscore/signature.hpp"
#include "json.hpp"

namespace capscore {

std::string TiePolicy::str() const {
  if (mode == TieMode::Fractional) return "fractional";
  return "random(" + std::to_string(seed) + ")";
}

TiePolicy TiePolicy::parse(std::string_view text) {
  if (text == "fractional") return {};
  if (text == "random") return {TieMode::Random, 0};
  if (text.starts_with("random(") && text.ends_with(")")) {
    const std::string digits(text.substr(7, text.size() - 8));
    try {
      std::size_t used = 0;
      const unsigned long long seed = std::stoull(digits, &used);
      if (used == digits.size() && !digits.empty()) return {TieMode::Random, seed};
    } catch (const std::exception&) {
    }
  }
  throw UsageError("unknown tie mode '" + std::string(text) +
                   "' (expected fractional, random or random(<seed>))");
}

std::vector<double> rank_values(std::span<const double> values, const TiePolicy& ties) {
  for (double v : values)
    if (!std::isfinite(v)) throw IntegrityError("cannot rank a non-finite score");
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> ranks(n);

  if (ties.mode == TieMode::Random) {
    SeedStream rng(splitmix64(ties.seed ^ fnv1a64("tie-break")));
    rng.shuffle(order);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    for (std::size_t pos = 0; pos < n; ++pos) ranks[order[pos]] = static_cast<double>(pos + 1);
    return ranks;
  }

  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  for (std::size_t start = 0; start < n;) {
    std::size_t end = start + 1;
    while (end < n && values[order[end]] == values[order[start]]) ++end;
    // positions start..end-1 hold ranks start+1..end
    const double avg = (static_cast<double>(start + 1) + static_cast<double>(end)) / 2.0;
    for (std::size_t k = start; k < end; ++k) ranks[order[k]] = avg;
    start = end;
  }
  return ranks;
}

std::vector<double> rank_captions(std::span<const ScoredCaption> scored, const TiePolicy& ties) {
  std::vector<double> values;
  values.reserve(scored.size());
  for (const auto& s : scored) values.push_back(s.score);
  return rank_values(values, ties);
}

double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw UsageError("pearson: length mismatch");
  const std::size_t n = x.size();
  if (n == 0) return 0.0;
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

double spearman_from_ranks(std::span<const double> x_ranks, std::span<const double> y_ranks) {
  if (x_ranks.size() != y_ranks.size()) throw UsageError("spearman: length mismatch");
  const double n = static_cast<double>(x_ranks.size());
  if (x_ranks.size() < 2) throw UsageError("spearman: need at least two samples");
  double d2 = 0.0;
  for (std::size_t i = 0; i < x_ranks.size(); ++i) {
    const double d = x_ranks[i] - y_ranks[i];
    d2 += d * d;
  }
  return 1.0 - 6.0 * d2 / (n * (n * n - 1.0));
}

double spearman(std::span<const double> known, std::span<const double> metric,
                const TiePolicy& ties) {
  if (known.size() != metric.size())
    throw UsageError("spearman: length mismatch (" + std::to_string(known.size()) + " vs " +
                     std::to_string(metric.size()) + ")");
  if (known.size() < 2) throw UsageError("spearman: need at least two samples");
  if (ties.mode == TieMode::Fractional)
    return pearson(rank_values(known, ties), rank_values(metric, ties));
  TiePolicy known_ties = ties;
  known_ties.seed = splitmix64(ties.seed);
  return spearman_from_ranks(rank_values(known, known_ties), rank_values(metric, ties));
}

// ---------------------------------------------------------------------------

namespace {

std::vector<const Tier*> sorted_tiers(std::span<const Tier> tiers) {
  if (tiers.size() < 2) throw UsageError("a tier experiment needs at least two tiers");
  std::vector<const Tier*> out;
  for (const auto& t : tiers) out.push_back(&t);
  std::sort(out.begin(), out.end(),
            [](const Tier* a, const Tier* b) { return a->expected_rank < b->expected_rank; });
  for (std::size_t i = 0; i < out.size(); ++i)
    if (out[i]->expected_rank != static_cast<int>(i + 1))
      throw UsageError("tier expected ranks must be distinct and contiguous from 1");
  const auto& first = out.front()->captions;
  for (const Tier* t : out) {
    if (t->captions.size() != first.size())
      throw IntegrityError("tier " + t->name + " has " + std::to_string(t->captions.size()) +
                           " captions, expected " + std::to_string(first.size()));
    for (std::size_t i = 0; i < first.size(); ++i)
      if (t->captions[i].image_id != first[i].image_id)
        throw IntegrityError("tier " + t->name + " is misaligned at position " +
                             std::to_string(i) + " (image " + t->captions[i].image_id + ")");
  }
  if (first.empty()) throw UsageError("tiers are empty");
  return out;
}

}  // namespace

TierScores score_tiers(std::span<const Tier> tiers, std::span<const ReferenceSet> refsets,
                       Metric& metric, Execution exec) {
  const auto ordered = sorted_tiers(tiers);
  std::unordered_map<std::string, const ReferenceSet*> by_image;
  for (const auto& set : refsets) by_image.emplace(set.image_id, &set);

  std::vector<ScoringTask> tasks;
  for (const Tier* t : ordered) {
    for (const auto& c : t->captions) {
      auto it = by_image.find(c.image_id);
      if (it == by_image.end())
        throw IntegrityError("no references for image " + c.image_id + " (tier " + t->name + ")");
      tasks.push_back({&c, it->second});
    }
  }
  metric.prepare(refsets);
  const auto flat = score_tasks(metric, tasks, exec);

  TierScores out;
  out.metric_signature = metric.signature();
  std::size_t pos = 0;
  for (const Tier* t : ordered) {
    out.tier_names.push_back(t->name);
    out.scores.emplace_back(flat.begin() + static_cast<std::ptrdiff_t>(pos),
                            flat.begin() + static_cast<std::ptrdiff_t>(pos + t->captions.size()));
    pos += t->captions.size();
  }
  for (std::size_t i = 0; i < flat.size(); ++i)
    if (!std::isfinite(flat[i]))
      throw IntegrityError(metric.name() + ": non-finite score for " + tasks[i].candidate->id);
  return out;
}

RankResult rank_tier_scores(const TierScores& scores, const ExperimentOptions& options) {
  if (options.bins < 1) throw UsageError("histogram needs at least one bin");
  if (scores.scores.size() < 2) throw UsageError("a tier experiment needs at least two tiers");
  std::vector<double> flat;
  for (const auto& s : scores.scores) flat.insert(flat.end(), s.begin(), s.end());
  const std::size_t n = flat.size();
  std::vector<double> known(n);
  std::iota(known.begin(), known.end(), 1.0);

  RankResult result;
  result.metric_signature = scores.metric_signature;
  result.ties = options.ties;
  result.tier_names = scores.tier_names;
  result.rho = spearman(known, flat, options.ties);

  const std::vector<double> ranks = rank_values(flat, options.ties);
  const double width = static_cast<double>(n) / static_cast<double>(options.bins);
  result.bins.resize(options.bins);
  for (std::size_t b = 0; b < options.bins; ++b) {
    result.bins[b].lo = 1.0 + static_cast<double>(b) * width;
    result.bins[b].hi = 1.0 + static_cast<double>(b + 1) * width;
    result.bins[b].counts.assign(scores.scores.size(), 0);
  }
  std::size_t pos = 0;
  for (std::size_t t = 0; t < scores.scores.size(); ++t) {
    result.tier_sizes.push_back(scores.scores[t].size());
    for (std::size_t i = 0; i < scores.scores[t].size(); ++i, ++pos) {
      auto b = static_cast<std::size_t>(std::floor((ranks[pos] - 1.0) / width));
      b = std::min(b, options.bins - 1);
      ++result.bins[b].counts[t];
    }
  }
  return result;
}

RankResult run_tier_experiment(std::span<const Tier> tiers, std::span<const ReferenceSet> refsets,
                               Metric& metric, const ExperimentOptions& options) {
  return rank_tier_scores(score_tiers(tiers, refsets, metric, options.exec), options);
}

RankResult run_model_vs_human(std::span<const Caption> model_captions,
                              std::span<const Caption> human_captions,
                              std::span<const ReferenceSet> refsets, Metric& metric,
                              const ExperimentOptions& options) {
  if (model_captions.size() != human_captions.size())
    throw IntegrityError("model covers " + std::to_string(model_captions.size()) +
                         " images, human captions cover " + std::to_string(human_captions.size()));
  std::unordered_map<std::string, const Caption*> model_by_image;
  for (const auto& c : model_captions) model_by_image.emplace(c.image_id, &c);
  Tier model{"Model", 1, {}};
  Tier human{"Human", 2, {human_captions.begin(), human_captions.end()}};
  for (const auto& h : human_captions) {
    auto it = model_by_image.find(h.image_id);
    if (it == model_by_image.end())
      throw IntegrityError("model captions lack image " + h.image_id);
    model.captions.push_back(*it->second);
  }
  const Tier tiers[] = {std::move(model), std::move(human)};
  return run_tier_experiment(tiers, refsets, metric, options);
}

std::string rank_result_json(const RankResult& result) {
  nlohmann::ordered_json root;
  root["metric_signature"] = result.metric_signature;
  root["rho"] = result.rho;
  root["tie_mode"] = result.ties.str();
  auto bins = nlohmann::ordered_json::array();
  for (const auto& bin : result.bins) {
    nlohmann::ordered_json counts;
    for (std::size_t t = 0; t < result.tier_names.size(); ++t)
      counts[result.tier_names[t]] = bin.counts[t];
    bins.push_back({{"lo", bin.lo}, {"hi", bin.hi}, {"counts", std::move(counts)}});
  }
  root["bins"] = std::move(bins);
  return root.dump(1) + "\n";
}

std::string rank_result_csv(const RankResult& result) {
  std::string out = "bin_lo,bin_hi";
  for (const auto& name : result.tier_names) out += "," + name;
  out += "\n";
  for (const auto& bin : result.bins) {
    out += format_number(bin.lo) + "," + format_number(bin.hi);
    for (std::size_t c : bin.counts) out += "," + std::to_string(c);
    out += "\n";
  }
  return out;
}

void export_rank_result(const RankResult& result, const std::filesystem::path& stem) {
  auto json_path = stem;
  json_path += ".json";
  auto csv_path = stem;
  csv_path += ".csv";
  write_file(json_path, rank_result_json(result));
  write_file(csv_path, rank_result_csv(result));
}

}  // namespace capscore
