#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "capscore/text.hpp"

using namespace capscore;

TEST(Porter, SpecExamples) {
  EXPECT_EQ(porter_stem("swinging"), "swing");
  EXPECT_EQ(porter_stem("dogs"), "dog");
  EXPECT_EQ(porter_stem("a"), "a");
}

TEST(Porter, ShortWordsUnchanged) {
  for (const char* w : {"is", "as", "us", "be", "go"}) EXPECT_EQ(porter_stem(w), w);
}

TEST(Porter, NonAsciiAndUppercasePassThrough) {
  EXPECT_EQ(porter_stem("cafés"), "cafés");
  EXPECT_EQ(porter_stem("Running"), "Running");
}

// Vectors frozen from an independent implementation of the original
// algorithm (tests/data/porter_vectors.tsv, words longer than two letters).
TEST(Porter, FrozenVectors) {
  std::ifstream in(std::string(CAPSCORE_TEST_DATA) + "/porter_vectors.tsv");
  ASSERT_TRUE(in) << "missing porter_vectors.tsv";
  std::string line;
  int checked = 0;
  std::vector<std::string> mismatches;
  while (std::getline(in, line)) {
    const auto tab = line.find('\t');
    ASSERT_NE(tab, std::string::npos);
    const std::string word = line.substr(0, tab), stem = line.substr(tab + 1);
    if (porter_stem(word) != stem) mismatches.push_back(word + " -> " + porter_stem(word) + " (want " + stem + ")");
    ++checked;
  }
  EXPECT_GT(checked, 1000);
  std::ostringstream msg;
  for (const auto& m : mismatches) msg << m << "\n";
  EXPECT_TRUE(mismatches.empty()) << msg.str();
}
