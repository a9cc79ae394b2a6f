#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "kgfuse/error.hpp"
#include "kgfuse/random.hpp"
#include "kgfuse/stemmer.hpp"
#include "test_util.hpp"

namespace kgfuse {
namespace {

std::vector<std::pair<std::string, std::string>> reference_pairs() {
  std::ifstream in(testing::data_dir() / "porter_reference.tsv");
  std::vector<std::pair<std::string, std::string>> out;
  std::string word, expected;
  while (in >> word >> expected) out.emplace_back(word, expected);
  return out;
}

TEST(Stem, SpecExamples) {
  EXPECT_EQ(stem("caresses"), "caress");
  EXPECT_EQ(stem("sky"), "sky");
  EXPECT_EQ(stem("a"), "a");
  EXPECT_EQ(stem("train"), "train");
}

TEST(Stem, ClassicRuleExamples) {
  EXPECT_EQ(stem("ponies"), "poni");
  EXPECT_EQ(stem("caress"), "caress");
  EXPECT_EQ(stem("cats"), "cat");
  EXPECT_EQ(stem("feed"), "feed");
  EXPECT_EQ(stem("agreed"), "agre");
  EXPECT_EQ(stem("plastered"), "plaster");
  EXPECT_EQ(stem("motoring"), "motor");
  EXPECT_EQ(stem("sing"), "sing");
  EXPECT_EQ(stem("conflated"), "conflat");
  EXPECT_EQ(stem("hopping"), "hop");
  EXPECT_EQ(stem("filing"), "file");
  EXPECT_EQ(stem("happy"), "happi");
  EXPECT_EQ(stem("relational"), "relat");
  EXPECT_EQ(stem("generalization"), "gener");
  EXPECT_EQ(stem("electrical"), "electr");
  EXPECT_EQ(stem("revival"), "reviv");
  EXPECT_EQ(stem("probate"), "probat");
  EXPECT_EQ(stem("controll"), "control");
  EXPECT_EQ(stem("roll"), "roll");
}

TEST(Stem, ShortWordsUnchanged) {
  EXPECT_EQ(stem("as"), "as");
  EXPECT_EQ(stem("is"), "is");
  EXPECT_EQ(stem("ed"), "ed");
}

TEST(Stem, AgreesWithReferenceVocabulary) {
  const auto pairs = reference_pairs();
  ASSERT_GE(pairs.size(), 100u);
  std::size_t mismatches = 0;
  for (const auto& [word, expected] : pairs) {
    if (stem(word) != expected) {
      ++mismatches;
      ADD_FAILURE() << word << " -> " << stem(word) << ", expected " << expected;
    }
  }
  EXPECT_EQ(mismatches, 0u);
}

TEST(Stem, RejectsNonAlphabetic) {
  EXPECT_THROW(stem(""), DataError);
  EXPECT_THROW(stem("Cats"), DataError);
  EXPECT_THROW(stem("co-op"), DataError);
  EXPECT_THROW(stem("r2d2"), DataError);
}

TEST(Stem, NeverLengthensAndIsDeterministic) {
  Rng rng(5);
  for (int trial = 0; trial < 20000; ++trial) {
    std::string w;
    const auto len = 1 + rng.uniform_int(14);
    for (std::uint64_t i = 0; i < len; ++i) w.push_back(static_cast<char>('a' + rng.uniform_int(26)));
    const auto s = stem(w);
    ASSERT_LE(s.size(), w.size()) << w;
    ASSERT_EQ(s, stem(w)) << w;
  }
}

TEST(StemTokens, ElementWise) {
  const std::vector<std::string> words = {"buying", "tickets"};
  // Step 1c turns the y of "buy" into i, as the reference implementation does.
  EXPECT_EQ(stem_tokens(words), (std::vector<std::string>{"bui", "ticket"}));
  EXPECT_TRUE(stem_tokens(std::vector<std::string>{}).empty());
  EXPECT_EQ(stem_tokens(std::vector<std::string>{"train"}), (std::vector<std::string>{"train"}));
}

TEST(StemTokens, ErrorNamesIndex) {
  const std::vector<std::string> words = {"fine", "also", "bad1"};
  try {
    stem_tokens(words);
    FAIL() << "expected DataError";
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("2"), std::string::npos) << e.what();
  }
}

TEST(StemKey, LiteralForNonAlphabetic) {
  EXPECT_EQ(stem_key("tickets"), "ticket");
  EXPECT_EQ(stem_key("101"), "101");
  EXPECT_EQ(stem_key("4x4"), "4x4");
}

}  // namespace
}  // namespace kgfuse
