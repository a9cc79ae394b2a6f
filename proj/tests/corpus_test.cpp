#include <gtest/gtest.h>

#include "kgfuse/corpus.hpp"
#include "kgfuse/error.hpp"
#include "kgfuse/random.hpp"
#include "kgfuse/text.hpp"
#include "test_util.hpp"

namespace kgfuse {
namespace {

using testing::TempDir;
using testing::write_file;

TEST(CategorizeQuestion, FirstTokenDecides) {
  EXPECT_EQ(categorize_question("When did they wait for their train?"), QuestionType::kWhen);
  EXPECT_EQ(categorize_question("WHAT did he buy?"), QuestionType::kWhat);
  EXPECT_EQ(categorize_question("Did he buy a ticket?"), QuestionType::kOther);
  EXPECT_EQ(categorize_question("  where   is it"), QuestionType::kWhere);
  EXPECT_EQ(categorize_question("Who?"), QuestionType::kWho);
  EXPECT_EQ(categorize_question("How, exactly, did it go?"), QuestionType::kHow);
  EXPECT_EQ(categorize_question("Whose bag was it?"), QuestionType::kOther);
  EXPECT_EQ(categorize_question(""), QuestionType::kOther);
}

TEST(CategorizeQuestion, CaseInsensitiveOnRandomText) {
  Rng rng(11);
  const std::string alphabet = "wWhHaAtTeEnNrRoO ?!.,x";
  for (int trial = 0; trial < 2000; ++trial) {
    std::string q;
    const auto len = rng.uniform_int(12);
    for (std::uint64_t i = 0; i < len; ++i) q.push_back(alphabet[rng.uniform_int(alphabet.size())]);
    EXPECT_EQ(categorize_question(q), categorize_question(to_lower(q))) << q;
  }
}

TEST(SplitSentences, TwoPlainSentences) {
  const auto list = split_sentences("I sat down. I slept.");
  ASSERT_EQ(list.size(), 2u);
  EXPECT_EQ(list.sentences[0].text, "I sat down.");
  EXPECT_EQ(list.sentences[1].text, "I slept.");
  EXPECT_EQ(list.sentences[1].offset, 12u);
}

TEST(SplitSentences, EmptyPassage) { EXPECT_TRUE(split_sentences("").empty()); }

TEST(SplitSentences, TicketPassageHasEightSentences) {
  const auto list = split_sentences(testing::kTicketPassage);
  EXPECT_EQ(list.size(), 8u);
  EXPECT_EQ(list.sentences.back().text,
            "After a couple hours we finally reach the destination and I get off the train, excited to see my "
            "friend.");
}

TEST(SplitSentences, DoesNotSplitInsideTokens) {
  const auto list = split_sentences("It cost 3.50 dollars at e.g.the shop. Really?! Yes.");
  ASSERT_EQ(list.size(), 3u);
  EXPECT_EQ(list.sentences[0].text, "It cost 3.50 dollars at e.g.the shop.");
  EXPECT_EQ(list.sentences[1].text, "Really?!");
}

TEST(SplitSentences, RoundTripsArbitraryText) {
  Rng rng(3);
  const std::string alphabet = "ab .!?\n\t";
  for (int trial = 0; trial < 3000; ++trial) {
    std::string text;
    const auto len = rng.uniform_int(40);
    for (std::uint64_t i = 0; i < len; ++i) text.push_back(alphabet[rng.uniform_int(alphabet.size())]);
    const auto list = split_sentences(text);
    ASSERT_EQ(list.join(), text);
    for (const auto& s : list.sentences) {
      EXPECT_EQ(text.substr(s.offset, s.text.size()), s.text);
      EXPECT_FALSE(s.text.empty());
    }
  }
}

constexpr const char* kTicketRecord = R"([
  {"id": "t1", "passage": "I drive to the station.",
   "question": "When did they wait for their train?",
   "answers": ["before buying the ticket", "after buying a ticket"], "gold": 1}
])";

TEST(LoadDataset, ParsesRecord) {
  TempDir dir;
  write_file(dir / "d.json", kTicketRecord);
  const auto prompts = load_dataset(dir / "d.json");
  ASSERT_EQ(prompts.size(), 1u);
  EXPECT_EQ(prompts[0].qtype, QuestionType::kWhen);
  EXPECT_EQ(prompts[0].gold, 1);
  EXPECT_EQ(prompts[0].answers[1], "after buying a ticket");
}

TEST(LoadDataset, EmptyFileIsEmptyList) {
  TempDir dir;
  write_file(dir / "empty.json", "");
  EXPECT_TRUE(load_dataset(dir / "empty.json").empty());
}

TEST(LoadDataset, GoldIsOptional) {
  const auto prompts = parse_dataset(R"([{"id":"a","passage":"p","question":"q","answers":["x","y"]}])");
  ASSERT_EQ(prompts.size(), 1u);
  EXPECT_FALSE(prompts[0].gold.has_value());
}

TEST(LoadDataset, RejectsMalformedRecords) {
  EXPECT_THROW(parse_dataset(R"([{"id":"a","passage":"p","question":"q","answers":["x","y","z"]}])"), DataError);
  EXPECT_THROW(parse_dataset(R"([{"id":"a","passage":"p","question":"q","answers":["x","y"],"gold":2}])"), DataError);
  EXPECT_THROW(parse_dataset(R"([{"id":"a","passage":"p","question":"q","answers":["x","y"],"extra":1}])"), DataError);
  EXPECT_THROW(parse_dataset(R"([{"id":"a","passage":"p","question":"q","answers":["x","y"]},
                                 {"id":"a","passage":"p","question":"q","answers":["x","y"]}])"),
               DataError);
  EXPECT_THROW(parse_dataset(R"({"id":"a"})"), DataError);
}

TEST(LoadDataset, ParseErrorNamesLine) {
  try {
    parse_dataset("[\n{\"id\": \"a\",\n  oops }\n]");
    FAIL() << "expected DataError";
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
  }
}

TEST(LoadDataset, SerializeIsIdempotent) {
  const auto first = parse_dataset(kTicketRecord);
  const auto text = serialize_dataset(first);
  const auto second = parse_dataset(text);
  EXPECT_EQ(serialize_dataset(second), text);
  ASSERT_EQ(second.size(), 1u);
  EXPECT_EQ(second[0].passage, first[0].passage);
  EXPECT_EQ(second[0].gold, first[0].gold);
}

TEST(WordTokenize, SplitsOnNonAlphanumerics) {
  EXPECT_EQ(word_tokenize("Don't over-think it, OK?"),
            (std::vector<std::string>{"don", "t", "over", "think", "it", "ok"}));
  EXPECT_EQ(word_tokenize("room 101b"), (std::vector<std::string>{"room", "101b"}));
  EXPECT_TRUE(word_tokenize(" ... ").empty());
}

}  // namespace
}  // namespace kgfuse
