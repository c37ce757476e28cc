// capscore command-line front end.
//
//   capscore fixtures  --out DIR
//   capscore score     --annotations A --candidates C --out DIR [--metrics m1,m2]
//   capscore perturb   --annotations A --mode replace|shuffle|random --seed S --out DIR
//   capscore rank-eval --annotations A --tiers DIR --out DIR [--tie-mode random(7)]
//   capscore bow       --annotations A [--min-count 4] [--out bow.json]
//
// Every subcommand also reads its options from the [<subcommand>] table of a
// TOML file given with --config; flags on the command line win.

#include <filesystem>
#include <iostream>

#include "CLI11.hpp"
#include "capscore/error.hpp"
#include "capscore/metric.hpp"
#include "capscore/parallel.hpp"
#include "capscore/signature.hpp"
#include "commands.hpp"

namespace cli = capscore::cli;
namespace fs = std::filesystem;

namespace {

// Only the table of the subcommand that ran, in a form --config accepts.
// Unset options are omitted; defaults are written out.
void echo_config(const CLI::App& sub, bool serial, const fs::path& dir) {
  auto quote = [](const std::string& v) {
    std::string out = "\"";
    for (char c : v) {
      if (c == '"' || c == '\\') out += '\\';
      out += c;
    }
    return out + "\"";
  };
  std::string text = "serial = " + std::string(serial ? "true" : "false") + "\n\n[" +
                     sub.get_name() + "]\n";
  for (const CLI::Option* opt : sub.get_options()) {
    if (opt->get_lnames().empty() || opt->get_lnames().front() == "help") continue;
    std::vector<std::string> values = opt->results();
    if (values.empty() && !opt->get_default_str().empty()) {
      std::string d = opt->get_default_str();
      if (d.size() >= 2 && d.front() == '[' && d.back() == ']') d = d.substr(1, d.size() - 2);
      values = CLI::detail::split(d, ',');
    }
    if (values.empty() || (values.size() == 1 && values[0].empty())) continue;
    text += opt->get_lnames().front() + " = ";
    if (opt->get_type_size() == 0) {
      text += values.back() == "1" || values.back() == "true" ? "true" : "false";
    } else if (opt->get_expected_max() > 1) {
      text += "[";
      for (std::size_t i = 0; i < values.size(); ++i) text += (i ? ", " : "") + quote(values[i]);
      text += "]";
    } else {
      text += quote(values.back());
    }
    text += "\n";
  }
  capscore::write_file(dir / "effective_config.toml", text);
}

std::string metric_help() {
  std::string names;
  for (const auto& n : capscore::registered_metric_names()) names += (names.empty() ? "" : ", ") + n;
  return "Comma-separated metric names (" + names + ")";
}

int run(int argc, char** argv) {
  CLI::App app{"Caption metric scoring and perturbation-based meta-evaluation"};
  app.set_version_flag("--version", std::string(capscore::kVersion));
  app.set_config("--config", "", "TOML file with one table per subcommand");
  app.require_subcommand(1);
  bool serial = false;
  app.add_flag("--serial", serial, "Score on one thread through the serial reference path");

  // score
  cli::ScoreOptions score;
  score.metrics = cli::default_ngram_metrics();
  auto* sc = app.add_subcommand("score", "Score candidate captions against references");
  sc->add_option("--annotations", score.annotations, "COCO captions annotation file")->required();
  sc->add_option("--candidates", score.candidates, "Candidate caption file")->required();
  sc->add_option("--metrics", score.metrics, metric_help())->delimiter(',')->capture_default_str();
  sc->add_option("--scheme", score.scheme, "Tokenizer scheme (coco-lite, intl-lite)")
      ->capture_default_str();
  sc->add_option("--embeddings", score.embeddings, "Embedding file for bertscore/clipscore");
  sc->add_option("--synonyms", score.synonyms, "Synonym table for METEOR");
  sc->add_option("--external-scores", score.external_scores, "Per-caption scores from another tool");
  sc->add_flag("--split", score.split, "Score against references 2-5 only");
  sc->add_option("--clip-w", score.clip_w, "CLIPScore scale")->capture_default_str();
  sc->add_option("--out", score.out, "Output directory")->required();

  // perturb
  cli::PerturbOptions perturb;
  auto* pc = app.add_subcommand("perturb", "Generate degraded caption tiers");
  pc->add_option("--annotations", perturb.annotations, "COCO captions annotation file")->required();
  pc->add_option("--mode", perturb.mode, "replace, shuffle or random")
      ->check(CLI::IsMember({"replace", "shuffle", "random"}))->capture_default_str();
  pc->add_option("--fraction", perturb.fractions,
                 "Perturbed fractions (default 0.25,0.5 for replace; 0.25,0.5,1 for shuffle)")
      ->delimiter(',')->check(CLI::Range(0.0, 1.0));
  pc->add_option("--seed", perturb.seed, "Master seed")->capture_default_str();
  pc->add_option("--scheme", perturb.scheme, "Tokenizer scheme")->capture_default_str();
  pc->add_option("--min-count", perturb.min_count, "Bag-of-words threshold")->capture_default_str();
  pc->add_option("--out", perturb.out, "Output directory")->required();

  // rank-eval
  cli::RankEvalOptions rank;
  rank.metrics = cli::default_ngram_metrics();
  std::uint64_t tie_seed = 0;
  auto* rc = app.add_subcommand("rank-eval", "Spearman meta-evaluation over tiers or models");
  rc->add_option("--annotations", rank.annotations, "COCO captions annotation file")->required();
  rc->add_option("--tiers", rank.tiers, "Directory written by `perturb`");
  rc->add_option("--candidates", rank.candidates, "Model caption files, each ranked against human");
  rc->add_option("--metrics", rank.metrics, metric_help())->delimiter(',')->capture_default_str();
  rc->add_option("--scheme", rank.scheme, "Tokenizer scheme")->capture_default_str();
  rc->add_option("--tie-mode", rank.tie_mode, "fractional, random or random(<seed>)")
      ->capture_default_str();
  rc->add_option("--seed", tie_seed, "Seed for --tie-mode random");
  rc->add_option("--bins", rank.bins, "Histogram bins")->check(CLI::PositiveNumber)
      ->capture_default_str();
  rc->add_option("--embeddings", rank.embeddings, "Embedding file");
  rc->add_option("--synonyms", rank.synonyms, "Synonym table for METEOR");
  rc->add_option("--external-scores", rank.external_scores, "Per-caption scores from another tool");
  rc->add_option("--clip-w", rank.clip_w, "CLIPScore scale")->capture_default_str();
  rc->add_option("--out", rank.out, "Output directory")->required();

  // bow
  cli::BowOptions bow;
  auto* bc = app.add_subcommand("bow", "Print the replacement vocabulary");
  bc->add_option("--annotations", bow.annotations, "COCO captions annotation file")->required();
  bc->add_option("--scheme", bow.scheme, "Tokenizer scheme")->capture_default_str();
  bc->add_option("--min-count", bow.min_count, "Minimum occurrences")->capture_default_str();
  bc->add_flag("--all-references", bow.all_references,
               "Count all five captions instead of the four reference ones");
  bc->add_option("--out", bow.out, "Write the bag as JSON to this file");

  // fixtures
  fs::path fixtures_out;
  auto* fc = app.add_subcommand("fixtures", "Write the one-image worked-example corpus");
  fc->add_option("--out", fixtures_out, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  capscore::apply_thread_cap_from_env();
  const auto exec = serial ? capscore::Execution::Serial : capscore::Execution::Parallel;

  if (*sc) {
    score.exec = exec;
    cli::run_score(score);
    echo_config(*sc, serial, score.out);
  } else if (*pc) {
    perturb.exec = exec;
    cli::run_perturb(perturb);
    echo_config(*pc, serial, perturb.out);
  } else if (*rc) {
    rank.exec = exec;
    if (rank.tie_mode == "random") rank.tie_mode = "random(" + std::to_string(tie_seed) + ")";
    cli::run_rank_eval(rank);
    echo_config(*rc, serial, rank.out);
  } else if (*bc) {
    cli::run_bow(bow);
  } else if (*fc) {
    cli::run_fixtures(fixtures_out);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const capscore::Error& e) {
    std::cerr << "capscore: " << e.what() << "\n";
    return e.exit_code();
  } catch (const fs::filesystem_error& e) {
    std::cerr << "capscore: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "capscore: " << e.what() << "\n";
    return 1;
  }
}
