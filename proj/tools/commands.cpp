#include "commands.hpp"

#include <algorithm>
#include <cstdio>
#include <iostream>
#include <memory>
#include <optional>
#include <set>

#include "capscore/corpus.hpp"
#include "capscore/error.hpp"
#include "capscore/fixtures.hpp"
#include "capscore/metric.hpp"
#include "capscore/perturb.hpp"
#include "capscore/rankeval.hpp"
#include "capscore/signature.hpp"
#include "json.hpp"

namespace capscore::cli {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace {

std::string file_safe(std::string_view name) {
  std::string out;
  for (char c : name) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                    c == '-' || c == '_' || c == '.';
    out += ok ? c : '_';
  }
  return out.empty() ? "_" : out;
}

MetricResources load_resources(const std::string& scheme, const fs::path& synonyms,
                               const fs::path& embeddings, double clip_w) {
  MetricResources res;
  res.scheme = parse_scheme(scheme);
  res.clip_w = clip_w;
  if (!synonyms.empty())
    res.synonyms = std::make_shared<const SynonymTable>(load_synonym_table(synonyms));
  if (!embeddings.empty())
    res.embeddings = std::make_shared<const EmbeddingBundle>(load_embeddings(embeddings));
  return res;
}

/// Built-in metrics by name followed by one adapter per external-score file.
std::vector<std::unique_ptr<Metric>> build_metrics(const std::vector<std::string>& names,
                                                   const std::vector<fs::path>& external,
                                                   const MetricResources& res,
                                                   const std::vector<std::string>& caption_ids) {
  std::vector<std::unique_ptr<Metric>> metrics;
  for (const auto& name : names)
    if (!name.empty()) metrics.push_back(make_metric(name, res));
  for (const auto& path : external)
    metrics.push_back(
        std::make_unique<ExternalScoreMetric>(load_external_scores(path, caption_ids)));
  if (metrics.empty()) throw UsageError("no metrics selected");
  std::set<std::string> seen;
  for (const auto& m : metrics)
    if (!seen.insert(m->name()).second) throw UsageError("metric " + m->name() + " listed twice");
  return metrics;
}

std::string pad(std::string s, std::size_t width) {
  if (s.size() < width) s.append(width - s.size(), ' ');
  return s;
}

std::string fixed(double v, int digits = 4) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

}  // namespace

std::vector<std::string> default_ngram_metrics() {
  return {"bleu-1", "bleu-2", "bleu-3", "bleu-4", "sacrebleu", "meteor", "rouge-l", "cider"};
}

// ---------------------------------------------------------------------------
// score

void run_score(const ScoreOptions& opt) {
  auto refsets = load_coco_annotations(opt.annotations);
  if (opt.split) refsets = split_references(refsets).reference_sets;
  const auto candidates = load_candidate_file(opt.candidates, "cand-");
  if (candidates.empty()) throw IntegrityError("candidate file holds no captions");
  const EvalCorpus corpus = make_eval_corpus(candidates, refsets);
  corpus.validate();

  std::vector<std::string> ids;
  for (const auto& c : candidates) ids.push_back(c.id);
  const auto res = load_resources(opt.scheme, opt.synonyms, opt.embeddings, opt.clip_w);
  auto metrics = build_metrics(opt.metrics, opt.external_scores, res, ids);

  std::vector<MetricReport> reports;
  for (auto& metric : metrics) {
    reports.push_back(score_corpus(*metric, corpus, opt.exec));
    const auto& r = reports.back();
    ordered_json doc;
    doc["metric"] = r.metric_name;
    doc["signature"] = r.signature;
    doc["aggregate"] = r.aggregate;
    ordered_json per = ordered_json::object();
    for (const auto& c : candidates) per[c.id] = r.per_caption.at(c.id);
    doc["per_caption"] = std::move(per);
    write_file(opt.out / (file_safe(r.metric_name) + ".json"), doc.dump(1) + "\n");
  }

  std::string csv = "caption_id,image_id";
  for (const auto& r : reports) csv += "," + r.metric_name;
  csv += "\n";
  for (const auto& c : candidates) {
    csv += c.id + "," + c.image_id;
    for (const auto& r : reports) csv += "," + format_number(r.per_caption.at(c.id));
    csv += "\n";
  }
  write_file(opt.out / "scores.csv", csv);

  std::cout << pad("metric", 14) << pad("aggregate", 12) << "signature\n";
  for (const auto& r : reports)
    std::cout << pad(r.metric_name, 14) << pad(fixed(r.aggregate, 6), 12) << r.signature << "\n";
}

// ---------------------------------------------------------------------------
// perturb

namespace {

struct PlannedTier {
  std::string name;
  int expected_rank;
  std::optional<PerturbationSpec> spec;  // none for the pristine tier
};

std::vector<PlannedTier> plan_tiers(const PerturbOptions& opt) {
  std::vector<PlannedTier> plan;
  if (opt.mode == "random") {
    plan.push_back({"Human", 0, std::nullopt});
    plan.push_back({"", 0, PerturbationSpec{PerturbKind::RandomSwap, 0.0, opt.seed}});
  } else if (opt.mode == "replace" || opt.mode == "shuffle") {
    const bool replace = opt.mode == "replace";
    auto fractions = opt.fractions;
    if (fractions.empty())
      fractions = replace ? std::vector<double>{0.25, 0.5} : std::vector<double>{0.25, 0.5, 1.0};
    std::sort(fractions.begin(), fractions.end());
    if (std::adjacent_find(fractions.begin(), fractions.end()) != fractions.end())
      throw UsageError("--fraction values must be distinct");
    plan.push_back({replace ? "Human" : "Original", 0, std::nullopt});
    for (double f : fractions)
      plan.push_back({"", 0,
                      PerturbationSpec{replace ? PerturbKind::Replace : PerturbKind::Shuffle, f,
                                       opt.seed}});
    if (replace)
      plan.push_back({"", 0, PerturbationSpec{PerturbKind::RandomSwap, 0.0, opt.seed}});
  } else {
    throw UsageError("--mode must be replace, shuffle or random");
  }
  // `plan` runs best to worst; expected ranks count from the worst tier.
  const int n = static_cast<int>(plan.size());
  for (int i = 0; i < n; ++i) {
    auto& t = plan[static_cast<std::size_t>(i)];
    t.expected_rank = n - i;
    if (t.spec) {
      t.spec->validate();
      t.name = t.spec->tier_name();
    }
  }
  return plan;
}

}  // namespace

void run_perturb(const PerturbOptions& opt) {
  const Scheme scheme = parse_scheme(opt.scheme);
  const auto plan = plan_tiers(opt);
  const auto refsets = load_coco_annotations(opt.annotations);
  const SplitCorpus split = split_references(refsets);

  std::optional<BagOfWords> bag;
  if (opt.mode == "replace") bag = build_bag(split.reference_sets, scheme, opt.min_count);

  ordered_json manifest;
  manifest["methodology"] = opt.mode;
  manifest["master_seed"] = opt.seed;
  manifest["scheme"] = std::string(scheme_name(scheme));
  manifest["images"] = split.human_candidates.size();
  if (bag) manifest["bag_signature"] = bag->signature();
  ordered_json tiers = ordered_json::array();

  for (auto it = plan.begin(); it != plan.end(); ++it) {
    GeneratedTier tier =
        it->spec ? generate_tier(split.human_candidates, *it->spec, bag ? &*bag : nullptr, scheme,
                                 opt.exec)
                 : normalized_tier(split.human_candidates, it->name, scheme);
    const std::string file = tier.name + ".json";
    write_file(opt.out / file, serialize_candidates(tier.captions));

    ordered_json prov;
    if (it->spec) {
      prov["spec"] = {{"kind", std::string(kind_name(it->spec->kind))},
                      {"fraction", it->spec->fraction},
                      {"tier", tier.name}};
    } else {
      prov["spec"] = {{"kind", "none"}, {"fraction", 0.0}, {"tier", tier.name}};
    }
    prov["master_seed"] = opt.seed;
    prov["bag_signature"] = bag ? ordered_json(bag->signature()) : ordered_json(nullptr);
    prov["scheme"] = std::string(scheme_name(scheme));
    prov["passthrough"] = tier.passthrough;
    write_file(opt.out / (tier.name + ".provenance.json"), prov.dump(1) + "\n");

    tiers.push_back({{"name", tier.name}, {"expected_rank", it->expected_rank}, {"file", file}});
    std::cout << pad(tier.name, 12) << "rank " << it->expected_rank << "  "
              << tier.captions.size() << " captions";
    if (tier.passthrough) std::cout << "  (" << tier.passthrough << " unchanged: k rounded to 0)";
    std::cout << "\n";
  }
  manifest["tiers"] = std::move(tiers);
  write_file(opt.out / "tiers.json", manifest.dump(1) + "\n");
}

// ---------------------------------------------------------------------------
// rank-eval

namespace {

std::vector<Tier> load_tiers(const fs::path& dir) {
  const auto manifest = nlohmann::json::parse(read_file(dir / "tiers.json"), nullptr, false);
  if (manifest.is_discarded() || !manifest.is_object() || !manifest.contains("tiers") ||
      !manifest["tiers"].is_array())
    throw ParseError((dir / "tiers.json").string() + ": not a tier manifest");
  std::vector<Tier> tiers;
  for (const auto& entry : manifest["tiers"]) {
    if (!entry.is_object() || !entry.contains("name") || !entry.contains("expected_rank") ||
        !entry.contains("file") || !entry["name"].is_string() ||
        !entry["expected_rank"].is_number_integer() || !entry["file"].is_string())
      throw ParseError((dir / "tiers.json").string() + ": malformed tier entry");
    Tier t;
    t.name = entry["name"].get<std::string>();
    t.expected_rank = entry["expected_rank"].get<int>();
    t.captions = load_candidate_file(dir / entry["file"].get<std::string>(), t.name + "/");
    tiers.push_back(std::move(t));
  }
  if (tiers.size() < 2)
    throw UsageError("rank-eval needs at least two tiers, " + dir.string() + " has " +
                     std::to_string(tiers.size()));
  return tiers;
}

void write_summary(const fs::path& path, const std::vector<std::string>& header,
                   const std::vector<std::vector<std::string>>& rows) {
  std::string csv;
  for (std::size_t i = 0; i < header.size(); ++i) csv += (i ? "," : "") + header[i];
  csv += "\n";
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) csv += (i ? "," : "") + row[i];
    csv += "\n";
  }
  write_file(path, csv);
}

}  // namespace

void run_rank_eval(const RankEvalOptions& opt) {
  if (opt.tiers.empty() && opt.candidates.empty())
    throw UsageError("rank-eval needs --tiers, --candidates or both");
  ExperimentOptions exp;
  exp.bins = opt.bins;
  exp.ties = TiePolicy::parse(opt.tie_mode);
  exp.exec = opt.exec;
  const auto res = load_resources(opt.scheme, opt.synonyms, opt.embeddings, opt.clip_w);
  const SplitCorpus split = split_references(load_coco_annotations(opt.annotations));

  if (!opt.tiers.empty()) {
    const auto tiers = load_tiers(opt.tiers);
    std::vector<std::string> ids;
    for (const auto& t : tiers)
      for (const auto& c : t.captions) ids.push_back(c.id);
    auto metrics = build_metrics(opt.metrics, opt.external_scores, res, ids);

    std::vector<std::vector<std::string>> rows;
    std::cout << pad("metric", 14) << pad("rho", 10) << "signature\n";
    for (auto& metric : metrics) {
      const RankResult r = run_tier_experiment(tiers, split.reference_sets, *metric, exp);
      export_rank_result(r, opt.out / ("rank_" + file_safe(metric->name())));
      rows.push_back({metric->name(), format_number(r.rho), r.ties.str(), r.metric_signature});
      std::cout << pad(metric->name(), 14) << pad(fixed(r.rho), 10) << r.metric_signature << "\n";
    }
    write_summary(opt.out / "summary.csv", {"metric", "rho", "tie_mode", "signature"}, rows);
  }

  if (!opt.candidates.empty()) {
    std::vector<std::string> header{"model"};
    std::vector<std::vector<std::string>> rows;
    std::set<std::string> models;
    for (const auto& path : opt.candidates) {
      const std::string model = path.stem().string();
      if (!models.insert(model).second) throw UsageError("model name " + model + " repeats");
      const auto captions = load_candidate_file(path, model + "/");
      std::vector<std::string> ids;
      for (const auto& c : captions) ids.push_back(c.id);
      for (const auto& c : split.human_candidates) ids.push_back(c.id);
      auto metrics = build_metrics(opt.metrics, opt.external_scores, res, ids);
      if (header.size() == 1)
        for (const auto& m : metrics) header.push_back(m->name());

      std::vector<std::string> row{model};
      for (auto& metric : metrics) {
        const RankResult r =
            run_model_vs_human(captions, split.human_candidates, split.reference_sets, *metric, exp);
        export_rank_result(r, opt.out / file_safe(model) / ("rank_" + file_safe(metric->name())));
        row.push_back(format_number(r.rho));
      }
      rows.push_back(std::move(row));
    }
    write_summary(opt.out / "models.csv", header, rows);
    for (const auto& h : header) std::cout << pad(h, 12);
    std::cout << "\n";
    for (const auto& row : rows) {
      std::cout << pad(row[0], 12);
      for (std::size_t i = 1; i < row.size(); ++i) std::cout << pad(fixed(std::stod(row[i])), 12);
      std::cout << "\n";
    }
  }
}

// ---------------------------------------------------------------------------
// bow, fixtures

void run_bow(const BowOptions& opt) {
  const Scheme scheme = parse_scheme(opt.scheme);
  auto refsets = load_coco_annotations(opt.annotations);
  if (!opt.all_references) refsets = split_references(refsets).reference_sets;
  const BagOfWords bag = build_bag(refsets, scheme, opt.min_count);
  if (!opt.out.empty()) {
    ordered_json doc;
    doc["signature"] = bag.signature();
    doc["scheme"] = std::string(scheme_name(scheme));
    doc["min_count"] = bag.min_count;
    doc["size"] = bag.words.size();
    doc["words"] = bag.words;
    write_file(opt.out, doc.dump(1) + "\n");
  }
  std::cout << bag.words.size() << " words  " << bag.signature() << "\n";
}

void run_fixtures(const fs::path& out) {
  const ReferenceSet refs = worked_example_references();
  const Caption cand = worked_example_candidate();
  write_file(out / "annotations_544.json", serialize_coco_annotations(std::span(&refs, 1)));
  write_file(out / "candidates_544.json", serialize_candidates(std::span(&cand, 1)));
  std::cout << "wrote " << (out / "annotations_544.json").string() << " and "
            << (out / "candidates_544.json").string() << "\n";
}

}  // namespace capscore::cli
