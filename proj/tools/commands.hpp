#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "capscore/parallel.hpp"

namespace capscore::cli {

struct ScoreOptions {
  std::filesystem::path annotations;
  std::filesystem::path candidates;
  std::vector<std::string> metrics;
  std::string scheme = "coco-lite";
  std::filesystem::path embeddings;
  std::filesystem::path synonyms;
  std::vector<std::filesystem::path> external_scores;
  bool split = false;
  double clip_w = 1.0;
  std::filesystem::path out;
  Execution exec = Execution::Parallel;
};

struct PerturbOptions {
  std::filesystem::path annotations;
  std::string mode = "replace";
  std::vector<double> fractions;
  std::uint64_t seed = 0;
  std::string scheme = "coco-lite";
  std::size_t min_count = 4;
  std::filesystem::path out;
  Execution exec = Execution::Parallel;
};

struct RankEvalOptions {
  std::filesystem::path annotations;
  std::filesystem::path tiers;
  std::vector<std::filesystem::path> candidates;
  std::vector<std::string> metrics;
  std::string scheme = "coco-lite";
  std::string tie_mode = "fractional";
  std::size_t bins = 50;
  std::filesystem::path embeddings;
  std::filesystem::path synonyms;
  std::vector<std::filesystem::path> external_scores;
  double clip_w = 1.0;
  std::filesystem::path out;
  Execution exec = Execution::Parallel;
};

struct BowOptions {
  std::filesystem::path annotations;
  std::string scheme = "coco-lite";
  std::size_t min_count = 4;
  bool all_references = false;
  std::filesystem::path out;
};

std::vector<std::string> default_ngram_metrics();

void run_score(const ScoreOptions& opt);
void run_perturb(const PerturbOptions& opt);
void run_rank_eval(const RankEvalOptions& opt);
void run_bow(const BowOptions& opt);
void run_fixtures(const std::filesystem::path& out);

}  // namespace capscore::cli
