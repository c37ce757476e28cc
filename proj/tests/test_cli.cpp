// Drives the capscore executable end to end through the shell.

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>

#include "capscore/corpus.hpp"
#include "json.hpp"
#include "synthetic.hpp"

namespace fs = std::filesystem;
using capscore::read_file;
using capscore::write_file;

namespace {

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("capscore_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  int run(const std::string& args, const std::string& env = "") {
    const std::string cmd = env + " " + CAPSCORE_CLI + " " + args + " > " + (dir_ / "stdout.txt").string() +
                            " 2> " + (dir_ / "stderr.txt").string();
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }
  std::string out() const { return read_file(dir_ / "stdout.txt"); }
  std::string err() const { return read_file(dir_ / "stderr.txt"); }

  fs::path synthetic_annotations(std::size_t images) {
    const auto sets = capscore::synth::synthetic_corpus(images, 5);
    const auto path = dir_ / "annotations.json";
    write_file(path, capscore::serialize_coco_annotations(sets));
    return path;
  }

  fs::path dir_;
};

}  // namespace

TEST_F(Cli, FixturesThenScoreReproducesWorkedExample) {
  ASSERT_EQ(run("fixtures --out " + (dir_ / "fx").string()), 0) << err();
  const auto first = read_file(dir_ / "fx" / "annotations_544.json");
  ASSERT_EQ(run("fixtures --out " + (dir_ / "fx").string()), 0);
  EXPECT_EQ(read_file(dir_ / "fx" / "annotations_544.json"), first);

  ASSERT_EQ(run("score --annotations " + (dir_ / "fx/annotations_544.json").string() + " --candidates " +
                (dir_ / "fx/candidates_544.json").string() + " --out " + (dir_ / "s").string()),
            0)
      << err();
  const auto bleu1 = nlohmann::json::parse(read_file(dir_ / "s" / "bleu-1.json"));
  EXPECT_NEAR(bleu1["aggregate"].get<double>(), 0.7273, 0.01);
  EXPECT_EQ(bleu1["signature"], "BLEU-1|tok:coco-lite|eps:1e-15|n:1|reflen:closest|w:uniform|v:0.1.0");
  const auto sacre = nlohmann::json::parse(read_file(dir_ / "s" / "sacrebleu.json"));
  EXPECT_NEAR(sacre["aggregate"].get<double>(), 0.1659, 0.02);
  const auto csv = read_file(dir_ / "s" / "scores.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')),
            "caption_id,image_id,bleu-1,bleu-2,bleu-3,bleu-4,sacrebleu,meteor,rouge-l,cider");
  EXPECT_TRUE(fs::exists(dir_ / "s" / "effective_config.toml"));
}

TEST_F(Cli, ScoreMergesExternalScores) {
  ASSERT_EQ(run("fixtures --out " + dir_.string()), 0);
  write_file(dir_ / "spice.json", R"({"metric":"spice","scores":{"cand-544":0.222222}})");
  ASSERT_EQ(run("score --annotations " + (dir_ / "annotations_544.json").string() + " --candidates " +
                (dir_ / "candidates_544.json").string() + " --metrics rouge-l --external-scores " +
                (dir_ / "spice.json").string() + " --out " + (dir_ / "s").string()),
            0)
      << err();
  const auto csv = read_file(dir_ / "s" / "scores.csv");
  EXPECT_NE(csv.find("caption_id,image_id,rouge-l,spice"), std::string::npos);
  EXPECT_NE(csv.find(",0.222222"), std::string::npos);
}

TEST_F(Cli, ExitCodes) {
  ASSERT_EQ(run("fixtures --out " + dir_.string()), 0);
  const std::string ann = (dir_ / "annotations_544.json").string();
  const std::string cand = (dir_ / "candidates_544.json").string();
  const std::string out = " --out " + (dir_ / "o").string();
  // usage
  EXPECT_EQ(run(""), 1);
  EXPECT_EQ(run("score --annotations " + ann + " --candidates " + cand + " --metrics nope" + out), 1);
  EXPECT_EQ(run("score --annotations " + ann + " --candidates " + cand + " --metrics bertscore" + out), 1);
  EXPECT_EQ(run("score --annotations " + ann + " --candidates " + cand + out, "CAPSCORE_THREADS=0"), 1);
  // data integrity
  write_file(dir_ / "empty.json", "[]");
  EXPECT_EQ(run("score --annotations " + ann + " --candidates " + (dir_ / "empty.json").string() + out), 2);
  EXPECT_NE(err().find("no captions"), std::string::npos);
  write_file(dir_ / "broken.json", "[{\"image_id\": 544,");
  EXPECT_EQ(run("score --annotations " + ann + " --candidates " + (dir_ / "broken.json").string() + out), 2);
  // I/O
  EXPECT_EQ(run("score --annotations /nonexistent.json --candidates " + cand + out), 3);
  write_file(dir_ / "file", "x");
  EXPECT_EQ(run("score --annotations " + ann + " --candidates " + cand + " --out " + (dir_ / "file/sub").string()), 3);
  EXPECT_EQ(run("--help"), 0);
}

TEST_F(Cli, PerturbIsReproducibleAndRankEvalRuns) {
  const auto ann = synthetic_annotations(120).string();
  const auto a = (dir_ / "a").string(), b = (dir_ / "b").string();
  ASSERT_EQ(run("perturb --annotations " + ann + " --mode replace --seed 7 --out " + a), 0) << err();
  ASSERT_EQ(run("perturb --annotations " + ann + " --mode replace --seed 7 --out " + b, "CAPSCORE_THREADS=1"), 0);
  for (const char* f : {"Human.json", "Replace25.json", "Replace50.json", "Random.json", "tiers.json",
                        "Replace25.provenance.json"})
    EXPECT_EQ(read_file(fs::path(a) / f), read_file(fs::path(b) / f)) << f;
  const auto prov = nlohmann::json::parse(read_file(fs::path(a) / "Replace50.provenance.json"));
  EXPECT_EQ(prov["master_seed"], 7);
  EXPECT_EQ(prov["spec"]["kind"], "replace");
  EXPECT_NE(prov["bag_signature"].get<std::string>().find("BOW|"), std::string::npos);
  const auto manifest = nlohmann::json::parse(read_file(fs::path(a) / "tiers.json"));
  ASSERT_EQ(manifest["tiers"].size(), 4u);
  EXPECT_EQ(manifest["tiers"][0]["name"], "Human");
  EXPECT_EQ(manifest["tiers"][0]["expected_rank"], 4);
  EXPECT_EQ(manifest["tiers"][3]["name"], "Random");
  EXPECT_EQ(manifest["tiers"][3]["expected_rank"], 1);

  const auto r = (dir_ / "r").string();
  ASSERT_EQ(run("rank-eval --annotations " + ann + " --tiers " + a + " --metrics bleu-1,cider --bins 10 --out " + r),
            0)
      << err();
  const auto rank = nlohmann::json::parse(read_file(fs::path(r) / "rank_cider.json"));
  EXPECT_GT(rank["rho"].get<double>(), 0.3);
  EXPECT_EQ(rank["bins"].size(), 10u);
  const auto summary = read_file(fs::path(r) / "summary.csv");
  EXPECT_EQ(summary.substr(0, summary.find('\n')), "metric,rho,tie_mode,signature");
  EXPECT_NE(summary.find("\nbleu-1,"), std::string::npos);
  EXPECT_NE(summary.find("\ncider,"), std::string::npos);

  // rerun is byte-identical, also under the serial path
  const auto r2 = (dir_ / "r2").string();
  ASSERT_EQ(run("--serial rank-eval --annotations " + ann + " --tiers " + a +
                " --metrics bleu-1,cider --bins 10 --out " + r2),
            0);
  EXPECT_EQ(read_file(fs::path(r) / "rank_cider.json"), read_file(fs::path(r2) / "rank_cider.json"));
  EXPECT_EQ(read_file(fs::path(r) / "rank_bleu-1.csv"), read_file(fs::path(r2) / "rank_bleu-1.csv"));
}

TEST_F(Cli, ShuffleTiersAndRandomTies) {
  const auto ann = synthetic_annotations(60).string();
  const auto t = (dir_ / "t").string();
  ASSERT_EQ(run("perturb --annotations " + ann + " --mode shuffle --seed 1 --out " + t), 0) << err();
  for (const char* f : {"Original.json", "Shuffle25.json", "Shuffle50.json", "ShuffleAll.json"})
    EXPECT_TRUE(fs::exists(fs::path(t) / f)) << f;
  const auto r = (dir_ / "r").string();
  ASSERT_EQ(run("rank-eval --annotations " + ann + " --tiers " + t +
                " --metrics bleu-4 --tie-mode random --seed 5 --out " + r),
            0)
      << err();
  const auto rank = nlohmann::json::parse(read_file(fs::path(r) / "rank_bleu-4.json"));
  EXPECT_EQ(rank["tie_mode"], "random(5)");
}

TEST_F(Cli, RankEvalRejectsSingleTier) {
  const auto ann = synthetic_annotations(20).string();
  const auto t = dir_ / "t";
  ASSERT_EQ(run("perturb --annotations " + ann + " --mode random --seed 1 --out " + t.string()), 0);
  write_file(t / "tiers.json", R"({"tiers":[{"name":"Human","expected_rank":1,"file":"Human.json"}]})");
  EXPECT_EQ(run("rank-eval --annotations " + ann + " --tiers " + t.string() + " --out " + (dir_ / "r").string()), 1);
  EXPECT_NE(err().find("two tiers"), std::string::npos);
}

TEST_F(Cli, RankEvalExternalOnlyAndModels) {
  const auto ann = synthetic_annotations(30).string();
  const auto t = dir_ / "t";
  ASSERT_EQ(run("perturb --annotations " + ann + " --mode random --seed 2 --out " + t.string()), 0);
  // an external metric that scores Human above Random
  nlohmann::json scores = nlohmann::json::object();
  for (const char* tier : {"Human", "Random"}) {
    const auto caps = capscore::load_candidate_file(t / (std::string(tier) + ".json"), std::string(tier) + "/");
    for (const auto& c : caps) scores[c.id] = std::string(tier) == "Human" ? 1.0 : 0.0;
  }
  write_file(dir_ / "ext.json", nlohmann::json{{"metric", "spice"}, {"scores", scores}}.dump());
  const auto r = dir_ / "r";
  ASSERT_EQ(run("rank-eval --annotations " + ann + " --tiers " + t.string() + " --metrics '' --external-scores " +
                (dir_ / "ext.json").string() + " --out " + r.string()),
            0)
      << err();
  const auto summary = read_file(r / "summary.csv");
  EXPECT_EQ(std::count(summary.begin(), summary.end(), '\n'), 2);
  EXPECT_NE(summary.find("\nspice,"), std::string::npos);

  // model-vs-human table, one row per model file
  const auto m = dir_ / "m";
  ASSERT_EQ(run("rank-eval --annotations " + ann + " --candidates " + (t / "Random.json").string() + " --candidates " +
                (t / "Human.json").string() + " --metrics bleu-1,cider --out " + m.string()),
            0)
      << err();
  const auto models = read_file(m / "models.csv");
  EXPECT_EQ(models.substr(0, models.find('\n')), "model,bleu-1,cider");
  EXPECT_NE(models.find("\nRandom,"), std::string::npos);
  EXPECT_TRUE(fs::exists(m / "Random" / "rank_cider.json"));
}

TEST_F(Cli, BowAndConfig) {
  const auto ann = synthetic_annotations(40).string();
  ASSERT_EQ(run("bow --annotations " + ann + " --min-count 4 --out " + (dir_ / "bow.json").string()), 0) << err();
  const auto bow = nlohmann::json::parse(read_file(dir_ / "bow.json"));
  EXPECT_EQ(bow["size"].get<std::size_t>(), bow["words"].size());
  EXPECT_NE(out().find(" words  BOW|"), std::string::npos);

  write_file(dir_ / "run.toml", "[perturb]\nannotations = \"" + ann + "\"\nmode = \"shuffle\"\nseed = 3\nout = \"" +
                                    (dir_ / "p").string() + "\"\n");
  ASSERT_EQ(run("--config " + (dir_ / "run.toml").string() + " perturb"), 0) << err();
  EXPECT_TRUE(fs::exists(dir_ / "p" / "ShuffleAll.json"));
  const auto echoed = read_file(dir_ / "p" / "effective_config.toml");
  EXPECT_NE(echoed.find("mode = \"shuffle\""), std::string::npos);
  // the echoed config reproduces the run
  ASSERT_EQ(run("--config " + (dir_ / "p" / "effective_config.toml").string() + " perturb --out " +
                (dir_ / "p2").string()),
            0)
      << err();
  EXPECT_EQ(read_file(dir_ / "p" / "Shuffle50.json"), read_file(dir_ / "p2" / "Shuffle50.json"));
}
