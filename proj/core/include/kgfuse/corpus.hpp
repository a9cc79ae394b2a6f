#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace kgfuse {

enum class QuestionType { kWhat, kWhen, kWhere, kWho, kHow, kOther };

inline constexpr std::array<QuestionType, 6> kAllQuestionTypes = {
    QuestionType::kWhat, QuestionType::kWhen, QuestionType::kWhere,
    QuestionType::kWho,  QuestionType::kHow,  QuestionType::kOther};

std::string_view to_string(QuestionType t);

// Category of the first whitespace-delimited token, case-insensitive.
// Trailing punctuation on that token is ignored ("Who?" is Who).
QuestionType categorize_question(std::string_view question);

// One multiple-choice item: passage, question and exactly two answers.
struct Prompt {
  std::string id;
  std::string passage;
  std::string question;
  std::array<std::string, 2> answers;
  std::optional<int> gold;
  QuestionType qtype = QuestionType::kOther;
};

struct Sentence {
  std::string text;
  std::size_t offset = 0;
  // Whitespace that followed the sentence in the passage.
  std::string separator;
};

struct SentenceList {
  // Whitespace preceding the first sentence.
  std::string leading;
  std::vector<Sentence> sentences;

  std::size_t size() const { return sentences.size(); }
  bool empty() const { return sentences.empty(); }
  // leading + each sentence followed by its separator.
  std::string join() const;
};

// Splits after '.', '!' or '?' when followed by whitespace.
SentenceList split_sentences(std::string_view passage);

// Parses the JSON dataset format. Throws DataError with record context.
std::vector<Prompt> parse_dataset(std::string_view json_text);
std::vector<Prompt> load_dataset(const std::filesystem::path& path);

std::string serialize_dataset(const std::vector<Prompt>& prompts);
void save_dataset(const std::filesystem::path& path, const std::vector<Prompt>& prompts);

}  // namespace kgfuse
