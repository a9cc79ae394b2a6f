#include <gtest/gtest.h>

#include "generators.hpp"
#include "kgfuse/lm_prep.hpp"
#include "kgfuse/realign.hpp"

namespace kgfuse {
namespace {

using Map = std::map<std::size_t, std::vector<std::size_t>>;
using Words = std::vector<std::string>;

TEST(NormalizeToken, StripsMarkerAndLowercases) {
  EXPECT_EQ(normalize_token("##VE"), "ve");
  EXPECT_EQ(normalize_token("Drove"), "drove");
  EXPECT_EQ(normalize_token("#x"), "#x");
}

TEST(TokenRealignment, SplitWord) {
  const Words coarse = {"I", "drove", "home"};
  const Words fine = {"i", "dro", "##ve", "home"};
  const auto a = token_realignment(coarse, fine);
  EXPECT_EQ(a.map, (Map{{0, {0}}, {1, {1, 2}}, {2, {3}}}));
  EXPECT_FALSE(a.partial());
}

TEST(TokenRealignment, Identity) {
  const Words w = {"a", "b", "c"};
  EXPECT_EQ(token_realignment(w, w).map, (Map{{0, {0}}, {1, {1}}, {2, {2}}}));
}

TEST(TokenRealignment, FinePieceSpanningWords) {
  const Words coarse = {"ab", "c"};
  const Words fine = {"abc"};
  EXPECT_EQ(token_realignment(coarse, fine).map, (Map{{0, {0}}, {1, {0}}}));
}

TEST(TokenRealignment, UnknownPieceConsumesWord) {
  const Words coarse = {"qzxv", "home"};
  const Words fine = {"[UNK]", "home"};
  EXPECT_EQ(token_realignment(coarse, fine).map, (Map{{0, {0}}, {1, {1}}}));
}

TEST(TokenRealignment, StallReportsPositions) {
  const Words coarse = {"cat"};
  const Words fine = {"dog"};
  try {
    token_realignment(coarse, fine);
    FAIL() << "expected a stall";
  } catch (const RealignmentStall& e) {
    EXPECT_EQ(e.coarse_pos(), 0u);
    EXPECT_EQ(e.fine_pos(), 0u);
  }
}

TEST(TokenRealignment, PartialWhenOneSideLonger) {
  const Words coarse = {"a", "b"};
  const Words fine = {"a"};
  const auto a = token_realignment(coarse, fine);
  EXPECT_TRUE(a.partial());
  EXPECT_EQ(a.coarse_consumed, 1u);
  EXPECT_EQ(a.map, (Map{{0, {0}}}));
  EXPECT_TRUE(token_realignment(Words{}, fine).map.empty());
}

TEST(TokenRealignment, WordIndexCrossCheck) {
  const Words coarse = {"I", "drove"};
  const Words fine = {"i", "dro", "##ve"};
  const std::vector<int> good = {0, 1, 1};
  const std::vector<int> bad = {0, 0, 1};
  EXPECT_NO_THROW(token_realignment(coarse, fine, good));
  EXPECT_THROW(token_realignment(coarse, fine, bad), DataError);
  EXPECT_THROW(token_realignment(coarse, fine, std::vector<int>{0}), DataError);
}

TEST(ProjectMatches, MovesToFirstPiece) {
  const Words coarse = {"I", "drove", "home"};
  const Words fine = {"i", "dro", "##ve", "home"};
  const auto a = token_realignment(coarse, fine);
  const Match m1{KnowledgeBase::kConceptNet, 0, 0};
  const Match m2{KnowledgeBase::kAtomic, 1, 3};
  const MatchIndex coarse_matches = {{1, {m2, m1}}, {2, {m1}}};
  const auto out = project_matches(coarse_matches, a);
  EXPECT_EQ(out, (MatchIndex{{1, {m1, m2}}, {3, {m1}}}));
  EXPECT_THROW(project_matches(MatchIndex{{7, {m1}}}, a), DataError);
}

// Tokenize random words, realign, and rebuild each word from its pieces.
TEST(TokenRealignment, RoundTripProperty) {
  Rng rng(5);
  const auto corpus = gen::random_words(rng, 300);
  Prompt p;
  for (const auto& w : corpus) p.passage += w + " ";
  const std::vector<Prompt> prompts = {p};
  const auto vocab = SubwordVocab::build_from_corpus(prompts, 40);
  for (int trial = 0; trial < 200; ++trial) {
    const auto words = gen::random_words(rng, 1 + rng.uniform_int(30));
    const auto pieces = subword_tokenize(words, vocab);
    Words fine;
    for (int id : pieces.ids) fine.push_back(vocab.token(id));
    const auto a = token_realignment(words, fine, pieces.word_index);
    ASSERT_FALSE(a.partial());
    ASSERT_EQ(a.map.size(), words.size());
    for (const auto& [c, list] : a.map) {
      std::string rebuilt;
      bool unk = false;
      for (auto f : list) {
        unk = unk || pieces.ids[f] == SubwordVocab::kUnk;
        rebuilt += normalize_token(fine[f]);
      }
      if (!unk) {
        EXPECT_EQ(rebuilt, words[c]);
      }
    }
  }
}

}  // namespace
}  // namespace kgfuse
