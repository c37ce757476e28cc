#include <gtest/gtest.h>

#include <cmath>

#include "capscore/embedding.hpp"
#include "capscore/error.hpp"

using namespace capscore;

namespace {

CaptionEmbedding emb(std::vector<Vector> tokens, Vector sentence = {}) {
  CaptionEmbedding e;
  for (std::size_t i = 0; i < tokens.size(); ++i) e.tokens.push_back("t" + std::to_string(i));
  e.token_vectors = std::move(tokens);
  e.sentence_vector = std::move(sentence);
  return e;
}

std::string header(int dim) { return "{\"dim\": " + std::to_string(dim) + "}\n"; }

}  // namespace

TEST(Cosine, Basics) {
  const Vector v{0.3, -2.0, 5.0};
  EXPECT_NEAR(cosine(v, v), 1.0, 1e-15);
  EXPECT_EQ(cosine(Vector{1, 0}, Vector{0, 1}), 0.0);
  EXPECT_NEAR(cosine(Vector{1, 2, 3}, Vector{4, 5, 6}), 32.0 / (std::sqrt(14.0) * std::sqrt(77.0)), 1e-15);
  EXPECT_NEAR(cosine(Vector{1, 2, 3}, Vector{4, 5, 6}), 0.974631, 1e-6);
  EXPECT_EQ(cosine(Vector{0, 0}, Vector{1, 1}), 0.0);
  EXPECT_THROW(cosine(Vector{1}, Vector{1, 2}), UsageError);
}

TEST(SimilarityMatrix, IdentityPattern) {
  LabeledVectors basis{{"x", "y", "z"}, {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}};
  const auto m = similarity_matrix(basis, basis);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) EXPECT_EQ(m.at(i, j), i == j ? 1.0 : 0.0);
  EXPECT_EQ(m.rows, basis.labels);
}

TEST(BertScore, HandComputedGreedyMatch) {
  const auto s = greedy_match(emb({{1, 0}, {0, 1}}), emb({{1, 0}, {1, 0}}));
  EXPECT_NEAR(s.precision, 0.5, 1e-15);
  EXPECT_NEAR(s.recall, 1.0, 1e-15);
  EXPECT_NEAR(s.f1, 2.0 / 3.0, 1e-15);
}

TEST(BertScore, IdentityIsOne) {
  const auto e = emb({{0.2, 0.4, 0.1}, {-1, 2, 0.5}});
  const auto s = greedy_match(e, e);
  EXPECT_NEAR(s.f1, 1.0, 1e-15);
}

TEST(BertScore, WeightsReweightMeans) {
  const auto c = emb({{1, 0}, {0, 1}});
  const TokenWeights w{{"t0", 3.0}};
  const auto s = greedy_match(c, emb({{1, 0}}), &w);
  EXPECT_NEAR(s.precision, 3.0 / 4.0, 1e-15);
}

TEST(BertScore, BestReferenceByF1) {
  EmbeddingBundle b;
  b.dim = 2;
  b.captions["c"] = emb({{1, 0}, {0, 1}});
  b.captions["r1"] = emb({{1, 0}});
  b.captions["r2"] = emb({{1, 0}, {0, 1}});
  const std::vector<std::string> refs{"r1", "r2"};
  EXPECT_NEAR(bertscore("c", refs, b).f1, 1.0, 1e-15);
  const std::vector<std::string> missing{"nope"};
  EXPECT_THROW(bertscore("c", missing, b), IntegrityError);
}

TEST(ClipScore, ParallelAntiParallel) {
  EmbeddingBundle b;
  b.dim = 2;
  b.images["i"] = {1, 1};
  b.captions["same"] = emb({{1, 0}}, {2, 2});
  b.captions["anti"] = emb({{1, 0}}, {-1, -1});
  EXPECT_NEAR(clipscore("i", "same", b), 1.0, 1e-15);
  EXPECT_EQ(clipscore("i", "anti", b), 0.0);
  EXPECT_NEAR(clipscore("i", "same", b, 2.5), 2.5, 1e-15);
  const std::vector<std::string> refs{"same"};
  EXPECT_NEAR(clipscore_ref("i", "same", refs, b), 1.0, 1e-15);
  EXPECT_EQ(clipscore_ref("i", "anti", refs, b), 0.0);
  EXPECT_THROW(clipscore("missing", "same", b), IntegrityError);
}

TEST(HarmonicMean, Bounds) {
  EXPECT_EQ(harmonic_mean(0.0, 0.9), 0.0);
  EXPECT_NEAR(harmonic_mean(0.4, 0.4), 0.4, 1e-15);
  EXPECT_LE(harmonic_mean(0.2, 0.9), 2 * 0.2);
}

TEST(EmbeddingFile, Fixture) {
  const auto b = load_embeddings(std::string(CAPSCORE_TEST_DATA) + "/embeddings_small.jsonl");
  EXPECT_EQ(b.dim, 3u);
  EXPECT_EQ(b.captions.size(), 2u);
  EXPECT_EQ(b.caption("r1").token_vectors.size(), 3u);
  EXPECT_EQ(b.caption("c1").tokens[1], "dog");
  EXPECT_NEAR(clipscore("7", "c1", b), 0.8, 1e-12);
}

TEST(EmbeddingFile, WrongLengthNamesRecord) {
  const std::string doc = header(2) +
                          R"({"kind":"caption","id":"bad-one","tokens":["a"],"token_vectors":[[1,2,3]],"sentence_vector":[1,2]})"
                          "\n";
  try {
    parse_embeddings(doc);
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("bad-one"), std::string::npos) << e.what();
  }
}

TEST(EmbeddingFile, Rejections) {
  // token count mismatch
  EXPECT_THROW(parse_embeddings(header(1) + R"({"kind":"caption","id":"a","tokens":["a","b"],"token_vectors":[[1]],"sentence_vector":[1]})" "\n"),
               Error);
  // truncated last record
  EXPECT_THROW(parse_embeddings(header(1) + R"({"kind":"image","id":"1","vector":[1)"), ParseError);
  // duplicate id
  EXPECT_THROW(parse_embeddings(header(1) + R"({"kind":"image","id":"1","vector":[1]})" "\n" +
                                R"({"kind":"image","id":"1","vector":[2]})" "\n"),
               IntegrityError);
  // unknown kind, missing header
  EXPECT_THROW(parse_embeddings(header(1) + R"({"kind":"audio","id":"1","vector":[1]})" "\n"), ParseError);
  EXPECT_THROW(parse_embeddings(R"({"kind":"image","id":"1","vector":[1]})" "\n"), ParseError);
  // non-finite values cannot be written as JSON numbers; huge exponents overflow
  EXPECT_THROW(parse_embeddings(header(1) + R"({"kind":"image","id":"1","vector":[1e999]})" "\n"), Error);
}
