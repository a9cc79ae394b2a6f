#pragma once

// Seeded random instances shared by unit, property and acceptance tests.

#include <string>
#include <vector>

#include "kgfuse/corpus.hpp"
#include "kgfuse/kb.hpp"
#include "kgfuse/random.hpp"

namespace kgfuse::gen {

// Small vocabulary with inflected forms so stemming matters.
inline const std::vector<std::string>& words() {
  static const std::vector<std::string> kWords = {
      "train",  "trains",  "ticket", "tickets", "buy",    "buying",  "bought", "station", "stations", "wait",
      "waited", "waiting", "seat",   "seats",   "window", "sleep",   "slept",  "friend",  "friends",  "ride",
      "riding", "rides",   "line",   "lines",   "cheap",  "cheaper", "drive",  "driving", "home",     "house",
      "door",   "doors",   "walk",   "walked",  "run",    "running", "the",    "a",       "to",       "42"};
  return kWords;
}

inline std::string phrase(Rng& rng, std::size_t min_len, std::size_t max_len) {
  const auto len = min_len + rng.uniform_int(max_len - min_len + 1);
  std::string out;
  for (std::size_t i = 0; i < len; ++i) {
    if (i) out += rng.uniform() < 0.1 ? "-" : " ";
    out += words()[rng.uniform_int(words().size())];
  }
  return out;
}

inline std::vector<KnowledgeTriple> triples(Rng& rng, std::size_t n) {
  static const char* kEdges[] = {"RelatedTo", "UsedFor", "AtLocation", "xWant", "oReact", "property/hasColor"};
  std::vector<KnowledgeTriple> out;
  for (std::size_t i = 0; i < n; ++i) {
    KnowledgeTriple t;
    t.kb = static_cast<KnowledgeBase>(rng.uniform_int(kNumKnowledgeBases));
    t.start = Phrase::from_text(phrase(rng, 1, 5));
    t.end = Phrase::from_text(phrase(rng, 1, 5));
    t.edge = kEdges[rng.uniform_int(6)];
    out.push_back(std::move(t));
  }
  return out;
}

inline std::vector<Prompt> prompts(Rng& rng, std::size_t n) {
  std::vector<Prompt> out;
  for (std::size_t i = 0; i < n; ++i) {
    Prompt p;
    p.id = "p" + std::to_string(i);
    const auto sentences = 2 + rng.uniform_int(4);
    for (std::size_t s = 0; s < sentences; ++s) {
      if (s) p.passage += ' ';
      p.passage += phrase(rng, 3, 9) + ".";
    }
    p.question = "What " + phrase(rng, 1, 4) + "?";
    p.answers = {phrase(rng, 1, 3), phrase(rng, 1, 3)};
    p.gold = static_cast<int>(rng.uniform_int(2));
    p.qtype = QuestionType::kWhat;
    out.push_back(std::move(p));
  }
  return out;
}

// Lowercase letter strings, some long enough to split into several pieces.
inline std::vector<std::string> random_words(Rng& rng, std::size_t n) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) {
    std::string w;
    const auto len = 1 + rng.uniform_int(12);
    for (std::size_t k = 0; k < len; ++k) w.push_back(static_cast<char>('a' + rng.uniform_int(8)));
    if (rng.uniform() < 0.05) w += "9";
    out.push_back(std::move(w));
  }
  return out;
}

}  // namespace kgfuse::gen
