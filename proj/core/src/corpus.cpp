#include "kgfuse/corpus.hpp"

#include <cctype>
#include <fstream>
#include <nlohmann/json.hpp>
#include <set>
#include <sstream>

#include "kgfuse/error.hpp"
#include "kgfuse/text.hpp"

namespace kgfuse {

namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

bool is_sentence_end(char c) { return c == '.' || c == '!' || c == '?'; }

std::size_t line_of_offset(std::string_view text, std::size_t offset) {
  std::size_t line = 1;
  for (std::size_t i = 0; i < offset && i < text.size(); ++i) {
    if (text[i] == '\n') ++line;
  }
  return line;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

std::string_view to_string(QuestionType t) {
  switch (t) {
    case QuestionType::kWhat: return "What";
    case QuestionType::kWhen: return "When";
    case QuestionType::kWhere: return "Where";
    case QuestionType::kWho: return "Who";
    case QuestionType::kHow: return "How";
    case QuestionType::kOther: return "Other";
  }
  return "Other";
}

QuestionType categorize_question(std::string_view question) {
  std::size_t i = 0;
  while (i < question.size() && is_space(question[i])) ++i;
  std::string first;
  while (i < question.size() && !is_space(question[i])) {
    first.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(question[i]))));
    ++i;
  }
  while (!first.empty() && std::ispunct(static_cast<unsigned char>(first.back()))) first.pop_back();
  if (first == "what") return QuestionType::kWhat;
  if (first == "when") return QuestionType::kWhen;
  if (first == "where") return QuestionType::kWhere;
  if (first == "who") return QuestionType::kWho;
  if (first == "how") return QuestionType::kHow;
  return QuestionType::kOther;
}

std::string SentenceList::join() const {
  std::string out = leading;
  for (const auto& s : sentences) {
    out += s.text;
    out += s.separator;
  }
  return out;
}

SentenceList split_sentences(std::string_view passage) {
  SentenceList list;
  std::size_t i = 0;
  while (i < passage.size() && is_space(passage[i])) ++i;
  list.leading = std::string(passage.substr(0, i));

  std::size_t start = i;
  while (start < passage.size()) {
    std::size_t end = start;
    // A boundary is sentence-final punctuation followed by whitespace or EOF.
    while (end < passage.size()) {
      if (is_sentence_end(passage[end]) &&
          (end + 1 == passage.size() || is_space(passage[end + 1]))) {
        ++end;
        break;
      }
      ++end;
    }
    std::size_t next = end;
    while (next < passage.size() && is_space(passage[next])) ++next;
    Sentence s;
    s.offset = start;
    s.text = std::string(passage.substr(start, end - start));
    s.separator = std::string(passage.substr(end, next - end));
    list.sentences.push_back(std::move(s));
    start = next;
  }
  return list;
}

std::vector<Prompt> parse_dataset(std::string_view json_text) {
  std::vector<Prompt> prompts;
  bool blank = true;
  for (char c : json_text) {
    if (!is_space(c)) {
      blank = false;
      break;
    }
  }
  if (blank) return prompts;

  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError("dataset parse error at line " +
                    std::to_string(line_of_offset(json_text, e.byte)) + ": " + e.what());
  }
  if (!doc.is_array()) throw DataError("dataset must be a top-level JSON array");

  static const std::set<std::string> kKnownKeys = {"id", "passage", "question", "answers", "gold"};
  std::set<std::string> seen_ids;
  for (std::size_t r = 0; r < doc.size(); ++r) {
    const auto& rec = doc[r];
    const std::string where = "record " + std::to_string(r);
    if (!rec.is_object()) throw DataError(where + ": expected an object");
    for (const auto& [key, _] : rec.items()) {
      if (!kKnownKeys.contains(key)) throw DataError(where + ": unknown key '" + key + "'");
    }
    auto require_string = [&](const char* key) -> std::string {
      if (!rec.contains(key) || !rec[key].is_string()) {
        throw DataError(where + ": missing or non-string '" + key + "'");
      }
      return rec[key].get<std::string>();
    };
    Prompt p;
    p.id = require_string("id");
    p.passage = require_string("passage");
    p.question = require_string("question");
    if (!rec.contains("answers") || !rec["answers"].is_array()) {
      throw DataError(where + " (id " + p.id + "): missing 'answers' array");
    }
    const auto& answers = rec["answers"];
    if (answers.size() != 2) {
      throw DataError(where + " (id " + p.id + "): expected 2 answers, got " +
                      std::to_string(answers.size()));
    }
    for (std::size_t a = 0; a < 2; ++a) {
      if (!answers[a].is_string()) throw DataError(where + ": answers must be strings");
      p.answers[a] = answers[a].get<std::string>();
    }
    if (rec.contains("gold")) {
      const auto& g = rec["gold"];
      if (!g.is_number_integer() || (g.get<long>() != 0 && g.get<long>() != 1)) {
        throw DataError(where + " (id " + p.id + "): gold must be 0 or 1");
      }
      p.gold = g.get<int>();
    }
    if (!seen_ids.insert(p.id).second) throw DataError(where + ": duplicate id '" + p.id + "'");
    p.qtype = categorize_question(p.question);
    prompts.push_back(std::move(p));
  }
  return prompts;
}

std::vector<Prompt> load_dataset(const std::filesystem::path& path) {
  try {
    return parse_dataset(read_file(path));
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

std::string serialize_dataset(const std::vector<Prompt>& prompts) {
  nlohmann::ordered_json doc = nlohmann::ordered_json::array();
  for (const auto& p : prompts) {
    nlohmann::ordered_json rec;
    rec["id"] = p.id;
    rec["passage"] = p.passage;
    rec["question"] = p.question;
    rec["answers"] = {p.answers[0], p.answers[1]};
    if (p.gold) rec["gold"] = *p.gold;
    doc.push_back(std::move(rec));
  }
  return doc.dump(2) + "\n";
}

void save_dataset(const std::filesystem::path& path, const std::vector<Prompt>& prompts) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << serialize_dataset(prompts);
}

}  // namespace kgfuse
