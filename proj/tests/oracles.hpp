#pragma once

// Slow, obviously-correct reference implementations used as test oracles.

#include <Eigen/Dense>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "kgfuse/kb.hpp"
#include "kgfuse/stemmer.hpp"
#include "kgfuse/text.hpp"

namespace kgfuse::oracle {

inline std::vector<std::string> stems_of(const std::vector<std::string>& words) {
  std::vector<std::string> out;
  for (const auto& w : words) out.push_back(stem_key(w));
  return out;
}

inline bool equal_at(const std::vector<std::string>& text, std::size_t at, const std::vector<std::string>& phrase,
                     std::size_t from, std::size_t len) {
  if (at + len > text.size()) return false;
  for (std::size_t k = 0; k < len; ++k) {
    if (text[at + k] != phrase[from + k]) return false;
  }
  return true;
}

// Earliest text position where the phrase occurs: whole when it has at most
// three stems, otherwise through any of its trigrams.
inline std::optional<std::size_t> earliest(const std::vector<std::string>& text,
                                           const std::vector<std::string>& phrase) {
  if (phrase.empty()) return std::nullopt;
  for (std::size_t at = 0; at < text.size(); ++at) {
    if (phrase.size() <= 3) {
      if (equal_at(text, at, phrase, 0, phrase.size())) return at;
      continue;
    }
    for (std::size_t from = 0; from + 3 <= phrase.size(); ++from) {
      if (equal_at(text, at, phrase, from, 3)) return at;
    }
  }
  return std::nullopt;
}

inline std::vector<std::string> view(const Prompt& p, int answer) {
  auto words = word_tokenize(p.passage);
  for (const auto& w : word_tokenize(p.question)) words.push_back(w);
  for (const auto& w : word_tokenize(p.answers[static_cast<std::size_t>(answer)])) words.push_back(w);
  return stems_of(words);
}

// Nested scan over every triple, prompt and answer view.
inline std::vector<std::size_t> retained(std::span<const KnowledgeTriple> triples, std::span<const Prompt> prompts) {
  std::vector<std::vector<std::string>> views;
  for (const auto& p : prompts) {
    views.push_back(view(p, 0));
    views.push_back(view(p, 1));
  }
  std::vector<std::size_t> out;
  for (std::size_t t = 0; t < triples.size(); ++t) {
    for (const auto& v : views) {
      if (earliest(v, triples[t].start.stems) && earliest(v, triples[t].end.stems)) {
        out.push_back(t);
        break;
      }
    }
  }
  return out;
}

// Row-major flattened outer product followed by the context.
inline Eigen::VectorXd dyadic(const Eigen::VectorXd& context, const Eigen::VectorXd& graph) {
  Eigen::VectorXd out(context.size() * graph.size() + context.size());
  Eigen::Index k = 0;
  for (Eigen::Index i = 0; i < context.size(); ++i) {
    for (Eigen::Index j = 0; j < graph.size(); ++j) out(k++) = context(i) * graph(j);
  }
  for (Eigen::Index i = 0; i < context.size(); ++i) out(k++) = context(i);
  return out;
}

}  // namespace kgfuse::oracle
