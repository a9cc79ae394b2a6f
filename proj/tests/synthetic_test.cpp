#include <gtest/gtest.h>

#include <set>

#include "kgfuse/kb.hpp"
#include "kgfuse/synthetic.hpp"
#include "test_util.hpp"

namespace kgfuse {
namespace {

SyntheticSet make(std::uint64_t seed = 0) {
  SyntheticSpec spec;
  spec.n_train = 24;
  spec.n_dev = 12;
  spec.seed = seed;
  return generate_synthetic(spec);
}

TEST(Synthetic, DeterministicInSeed) {
  EXPECT_EQ(serialize_dataset(make(1).planted_train), serialize_dataset(make(1).planted_train));
  EXPECT_NE(serialize_dataset(make(1).planted_train), serialize_dataset(make(2).planted_train));
}

TEST(Synthetic, BalancedLabelsAndAllTypes) {
  const auto s = make();
  for (const auto* split : {&s.plain_train, &s.plain_dev, &s.planted_train, &s.planted_dev}) {
    std::size_t zeros = 0;
    std::set<QuestionType> types;
    for (const auto& p : *split) {
      zeros += *p.gold == 0;
      types.insert(p.qtype);
    }
    EXPECT_EQ(zeros * 2, split->size());
    EXPECT_EQ(types.size(), 6u);
  }
  EXPECT_EQ(s.planted_train.size(), 24u);
  EXPECT_EQ(s.planted_dev.size(), 12u);
}

// Independent re-check of the planting contract with the index builder:
// every planted triple fires on its correct view and no retained triple
// fires on any distractor view.
TEST(Synthetic, PlantedFactsOnlyFireOnCorrectView) {
  const auto s = make(3);
  std::vector<Prompt> all = s.planted_train;
  all.insert(all.end(), s.planted_dev.begin(), s.planted_dev.end());
  const auto triples = s.kb.triples();
  const auto index = build_vocab_index(triples, all);
  ASSERT_FALSE(index.triples().empty());
  for (const auto& p : all) {
    const int gold = *p.gold;
    const auto right = match_prompt(prompt_view_tokens(p, gold), index);
    const auto wrong = match_prompt(prompt_view_tokens(p, 1 - gold), index);
    EXPECT_FALSE(right.empty()) << p.id;
    EXPECT_TRUE(wrong.empty()) << p.id;
  }
  EXPECT_EQ(s.facts.size(), all.size());
  std::set<KnowledgeBase> kbs;
  for (const auto& f : s.facts) kbs.insert(f.kb);
  EXPECT_EQ(kbs.size(), kNumKnowledgeBases);
}

TEST(Synthetic, GeneratesAcrossManySeeds) {
  SyntheticSpec spec;
  spec.n_train = 64;
  spec.n_dev = 16;
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    spec.seed = seed;
    EXPECT_NO_THROW(generate_synthetic(spec)) << seed;
  }
}

TEST(Synthetic, WrittenFilesParseBack) {
  testing::TempDir dir;
  const auto s = make(4);
  write_synthetic(s, dir.path());
  EXPECT_EQ(load_dataset(dir / "planted_dev.json").size(), 12u);
  auto parsed = parse_conceptnet(dir / "conceptnet.tsv");
  const auto web = parse_webchild(dir / "webchild");
  const auto atomic = parse_atomic(dir / "atomic.tsv");
  parsed.insert(parsed.end(), web.begin(), web.end());
  parsed.insert(parsed.end(), atomic.begin(), atomic.end());
  auto keys = [](const std::vector<KnowledgeTriple>& ts) {
    std::multiset<std::string> out;
    for (const auto& t : ts) {
      std::string k = std::string(to_string(t.kb)) + "|" + t.edge;
      for (const auto& st : t.start.stems) k += "|" + st;
      k += "|>";
      for (const auto& st : t.end.stems) k += "|" + st;
      out.insert(k);
    }
    return out;
  };
  EXPECT_EQ(keys(parsed), keys(s.kb.triples()));
}

TEST(Synthetic, PlainAnswersAppearInPassage) {
  const auto s = make(5);
  for (const auto& p : s.plain_train) {
    const auto& answer = p.answers[static_cast<std::size_t>(*p.gold)];
    const auto key = answer.substr(answer.rfind(' ') + 1);
    EXPECT_NE(p.passage.find(key), std::string::npos) << p.id;
  }
}

}  // namespace
}  // namespace kgfuse
