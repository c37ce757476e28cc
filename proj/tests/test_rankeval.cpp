#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <numeric>

#include "capscore/error.hpp"
#include "capscore/perturb.hpp"
#include "capscore/rankeval.hpp"
#include "json.hpp"

using namespace capscore;

namespace {

std::vector<Tier> tiers_of(std::size_t count, std::size_t per_tier) {
  std::vector<Tier> tiers;
  for (std::size_t t = 0; t < count; ++t) {
    Tier tier{"T" + std::to_string(t + 1), static_cast<int>(t + 1), {}};
    for (std::size_t i = 0; i < per_tier; ++i)
      tier.captions.push_back({tier.name + "/" + std::to_string(i), std::to_string(i), "x"});
    tiers.push_back(std::move(tier));
  }
  return tiers;
}

std::vector<ReferenceSet> refs_for(std::size_t per_tier) {
  std::vector<ReferenceSet> sets;
  for (std::size_t i = 0; i < per_tier; ++i)
    sets.push_back({std::to_string(i), {{"r" + std::to_string(i), std::to_string(i), "x"}}});
  return sets;
}

int tier_index(const Caption& c) { return std::stoi(c.id.substr(1, c.id.find('/') - 1)); }

}  // namespace

TEST(Spearman, IdentityReversalSwap) {
  const std::vector<double> known{1, 2, 3, 4};
  const std::vector<double> rev{4, 3, 2, 1};
  const std::vector<double> swapped{2, 1, 4, 3};
  for (const TiePolicy& p : {TiePolicy{}, TiePolicy{TieMode::Random, 3}}) {
    EXPECT_NEAR(spearman(known, known, p), 1.0, 1e-15);
    EXPECT_NEAR(spearman(known, rev, p), -1.0, 1e-15);
    EXPECT_NEAR(spearman(known, swapped, p), 0.6, 1e-15);
  }
  EXPECT_NEAR(spearman_from_ranks(known, swapped), 0.6, 1e-15);
}

TEST(Spearman, FractionalTies) {
  const std::vector<double> known{1, 2, 3};
  const std::vector<double> scores{1, 1, 2};
  EXPECT_NEAR(spearman(known, scores), std::sqrt(3.0) / 2.0, 1e-12);
}

TEST(Spearman, ConstantIsZeroInFractionalMode) {
  const std::vector<double> known{1, 2, 3, 4, 5};
  const std::vector<double> flat(5, 0.3);
  EXPECT_EQ(spearman(known, flat), 0.0);
}

TEST(Spearman, Errors) {
  const std::vector<double> a{1, 2, 3}, b{1, 2};
  EXPECT_THROW(spearman(a, b), UsageError);
  EXPECT_THROW(spearman(std::span(a.data(), 1), std::span(a.data(), 1)), UsageError);
}

TEST(Ranks, AscendingAndTies) {
  const std::vector<double> s{0.1, 0.9, 0.5};
  EXPECT_EQ(rank_values(s, {}), (std::vector<double>{1, 3, 2}));
  const std::vector<double> flat(4, 2.0);
  EXPECT_EQ(rank_values(flat, {}), std::vector<double>(4, 2.5));
  const auto r1 = rank_values(flat, {TieMode::Random, 5});
  EXPECT_EQ(r1, rank_values(flat, {TieMode::Random, 5}));
  auto sorted = r1;
  std::sort(sorted.begin(), sorted.end());
  EXPECT_EQ(sorted, (std::vector<double>{1, 2, 3, 4}));
  const std::vector<double> bad{1.0, NAN};
  EXPECT_THROW(rank_values(bad, {}), IntegrityError);
}

TEST(Ranks, ScoredCaptions) {
  const std::vector<ScoredCaption> s{{"a", 3.0}, {"b", -1.0}};
  EXPECT_EQ(rank_captions(s, {}), (std::vector<double>{2, 1}));
}

TEST(TiePolicy, ParseAndPrint) {
  EXPECT_EQ(TiePolicy::parse("fractional").str(), "fractional");
  EXPECT_EQ(TiePolicy::parse("random(17)").str(), "random(17)");
  EXPECT_EQ(TiePolicy::parse("random").str(), "random(0)");
  EXPECT_THROW(TiePolicy::parse("random(x)"), UsageError);
  EXPECT_THROW(TiePolicy::parse("average"), UsageError);
}

// Oracle metric = expected rank of the tier. With random ties inside blocks
// of equal size m over T tiers, E[sum d^2] = T * m (m^2 - 1) / 6, so
// rho -> 1 - 1/T^2 = 0.9375 for T = 4.
TEST(TierExperiment, OracleMetricBlockSeparation) {
  const auto tiers = tiers_of(4, 250);
  const auto refs = refs_for(250);
  FunctionMetric oracle("oracle", [](const Caption& c, const ReferenceSet&) { return tier_index(c); });
  ExperimentOptions random;
  random.ties = {TieMode::Random, 11};
  const auto r = run_tier_experiment(tiers, refs, oracle, random);
  EXPECT_GT(r.rho, 0.93);
  EXPECT_NEAR(r.rho, 0.9375, 0.01);
  const auto f = run_tier_experiment(tiers, refs, oracle, {});
  EXPECT_GT(f.rho, 0.95);
}

TEST(TierExperiment, ConstantMetricFractionalIsZero) {
  const auto tiers = tiers_of(4, 50);
  const auto refs = refs_for(50);
  FunctionMetric constant("constant", [](const Caption&, const ReferenceSet&) { return 0.5; });
  EXPECT_EQ(run_tier_experiment(tiers, refs, constant, {}).rho, 0.0);
}

TEST(TierExperiment, HistogramMassAndShape) {
  const auto tiers = tiers_of(4, 100);
  const auto refs = refs_for(100);
  FunctionMetric oracle("oracle", [](const Caption& c, const ReferenceSet&) { return tier_index(c); });
  ExperimentOptions opt;
  opt.bins = 50;
  opt.ties = {TieMode::Random, 1};
  const auto r = run_tier_experiment(tiers, refs, oracle, opt);
  ASSERT_EQ(r.bins.size(), 50u);
  EXPECT_EQ(r.tier_names, (std::vector<std::string>{"T1", "T2", "T3", "T4"}));
  EXPECT_DOUBLE_EQ(r.bins.front().lo, 1.0);
  EXPECT_DOUBLE_EQ(r.bins.back().hi, 401.0);
  std::vector<std::size_t> sums(4, 0);
  for (const auto& b : r.bins)
    for (std::size_t t = 0; t < 4; ++t) sums[t] += b.counts[t];
  EXPECT_EQ(sums, std::vector<std::size_t>(4, 100));
  // perfectly separated: tier 1 only in the first quarter of bins
  for (std::size_t b = 0; b < 12; ++b) EXPECT_EQ(r.bins[b].counts[0], 8u);
}

TEST(TierExperiment, TiersSortedByExpectedRank) {
  auto tiers = tiers_of(3, 10);
  std::reverse(tiers.begin(), tiers.end());
  FunctionMetric oracle("oracle", [](const Caption& c, const ReferenceSet&) { return tier_index(c); });
  const auto r = run_tier_experiment(tiers, refs_for(10), oracle, {});
  EXPECT_EQ(r.tier_names.front(), "T1");
  EXPECT_GT(r.rho, 0.9);
}

TEST(TierExperiment, Errors) {
  const auto refs = refs_for(10);
  FunctionMetric m("m", [](const Caption&, const ReferenceSet&) { return 1.0; });
  auto one = tiers_of(1, 10);
  EXPECT_THROW(run_tier_experiment(one, refs, m), UsageError);
  auto misaligned = tiers_of(2, 10);
  std::swap(misaligned[1].captions[0], misaligned[1].captions[1]);
  EXPECT_THROW(run_tier_experiment(misaligned, refs, m), IntegrityError);
  auto uneven = tiers_of(2, 10);
  uneven[1].captions.pop_back();
  EXPECT_THROW(run_tier_experiment(uneven, refs, m), IntegrityError);
  auto dup_rank = tiers_of(2, 10);
  dup_rank[1].expected_rank = 1;
  EXPECT_THROW(run_tier_experiment(dup_rank, refs, m), UsageError);
  auto no_refs = tiers_of(2, 11);
  EXPECT_THROW(run_tier_experiment(no_refs, refs, m), IntegrityError);
  FunctionMetric nan_metric("nan", [](const Caption&, const ReferenceSet&) { return NAN; });
  auto ok = tiers_of(2, 10);
  EXPECT_THROW(run_tier_experiment(ok, refs, nan_metric), IntegrityError);
}

TEST(ModelVsHuman, IdenticalCaptionsNearZero) {
  std::vector<Caption> human, model;
  for (int i = 0; i < 200; ++i) {
    human.push_back({"h" + std::to_string(i), std::to_string(i), "x"});
    model.push_back({"m" + std::to_string(i), std::to_string(i), "x"});
  }
  std::reverse(model.begin(), model.end());  // reordered to human order internally
  // a score that depends on the image only, unrelated to image order
  FunctionMetric by_image("img", [](const Caption& c, const ReferenceSet&) {
    return static_cast<double>(fnv1a64(c.image_id) % 1000);
  });
  const auto r = run_model_vs_human(model, human, refs_for(200), by_image, {});
  EXPECT_NEAR(r.rho, 0.0, 0.1);
  EXPECT_EQ(r.tier_names, (std::vector<std::string>{"Model", "Human"}));
  model.pop_back();
  EXPECT_THROW(run_model_vs_human(model, human, refs_for(200), by_image, {}), IntegrityError);
}

TEST(Export, JsonShapeAndCsvTwin) {
  const auto tiers = tiers_of(4, 25);
  FunctionMetric oracle("oracle", [](const Caption& c, const ReferenceSet&) { return tier_index(c); });
  ExperimentOptions opt;
  opt.bins = 10;
  const auto r = run_tier_experiment(tiers, refs_for(25), oracle, opt);
  const auto doc = nlohmann::ordered_json::parse(rank_result_json(r));
  std::vector<std::string> keys;
  for (auto it = doc.begin(); it != doc.end(); ++it) keys.push_back(it.key());
  EXPECT_EQ(keys, (std::vector<std::string>{"metric_signature", "rho", "tie_mode", "bins"}));
  EXPECT_EQ(doc["tie_mode"], "fractional");
  ASSERT_EQ(doc["bins"].size(), 10u);
  // Fractional ties put all of T1 on rank 13, inside the second bin.
  EXPECT_EQ(doc["bins"][0]["counts"]["T1"], 0);
  EXPECT_EQ(doc["bins"][1]["counts"]["T1"], 25);
  const auto csv = rank_result_csv(r);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "bin_lo,bin_hi,T1,T2,T3,T4");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 11);

  const auto dir = std::filesystem::temp_directory_path() / "capscore_export_test";
  std::filesystem::remove_all(dir);
  export_rank_result(r, dir / "rank_oracle");
  const auto first = read_file(dir / "rank_oracle.json");
  export_rank_result(r, dir / "rank_oracle");
  EXPECT_EQ(read_file(dir / "rank_oracle.json"), first);
  EXPECT_EQ(read_file(dir / "rank_oracle.csv"), csv);
  std::filesystem::remove_all(dir);
}
