#include "kgfuse/realign.hpp"

#include <algorithm>

#include "kgfuse/lm_prep.hpp"
#include "kgfuse/text.hpp"

namespace kgfuse {

std::string normalize_token(std::string_view tok) {
  if (tok.starts_with(kContinuationMarker)) tok.remove_prefix(kContinuationMarker.size());
  return to_lower(tok);
}

RealignmentStall::RealignmentStall(std::size_t coarse_pos, std::size_t fine_pos, std::string coarse_tok,
                                   std::string fine_tok)
    : DataError("token realignment stalled at coarse " + std::to_string(coarse_pos) + " ('" + coarse_tok +
                "') / fine " + std::to_string(fine_pos) + " ('" + fine_tok + "')"),
      coarse_pos_(coarse_pos),
      fine_pos_(fine_pos) {}

TokenAlignment token_realignment(std::span<const std::string> coarse, std::span<const std::string> fine) {
  TokenAlignment out;
  out.coarse_size = coarse.size();
  out.fine_size = fine.size();
  if (coarse.empty() || fine.empty()) return out;

  static const std::string kUnk = SubwordVocab::special_tokens()[SubwordVocab::kUnk];
  std::size_t i = 0;
  std::size_t j = 0;
  std::string rc = normalize_token(coarse[0]);
  std::string rf = normalize_token(fine[0]);
  auto record = [&out](std::size_t c, std::size_t f) {
    auto& list = out.map[c];
    if (list.empty() || list.back() != f) list.push_back(f);
  };
  auto next_coarse = [&] {
    ++i;
    if (i < coarse.size()) rc = normalize_token(coarse[i]);
  };
  auto next_fine = [&] {
    ++j;
    if (j < fine.size()) rf = normalize_token(fine[j]);
  };

  while (i < coarse.size() && j < fine.size()) {
    if (rc == rf || fine[j] == kUnk) {
      record(i, j);
      next_coarse();
      next_fine();
    } else if (rf.starts_with(rc)) {
      record(i, j);
      rf.erase(0, rc.size());
      next_coarse();
    } else if (rc.starts_with(rf)) {
      record(i, j);
      rc.erase(0, rf.size());
      next_fine();
    } else {
      throw RealignmentStall(i, j, std::string(coarse[i]), std::string(fine[j]));
    }
  }
  out.coarse_consumed = i;
  out.fine_consumed = j;
  return out;
}

TokenAlignment token_realignment(std::span<const std::string> coarse, std::span<const std::string> fine,
                                 std::span<const int> fine_word_index) {
  if (fine_word_index.size() != fine.size()) throw DataError("word index length differs from fine sequence");
  auto out = token_realignment(coarse, fine);
  for (const auto& [c, list] : out.map) {
    for (std::size_t f : list) {
      if (fine_word_index[f] != static_cast<int>(c)) {
        throw DataError("alignment maps fine token " + std::to_string(f) + " to word " + std::to_string(c) +
                        " but the tokenizer produced it from word " + std::to_string(fine_word_index[f]));
      }
    }
  }
  return out;
}

MatchIndex project_matches(const MatchIndex& coarse_matches, const TokenAlignment& alignment) {
  MatchIndex out;
  for (const auto& [pos, matches] : coarse_matches) {
    auto it = alignment.map.find(pos);
    if (it == alignment.map.end() || it->second.empty()) {
      throw DataError("coarse position " + std::to_string(pos) + " has no alignment");
    }
    auto& dst = out[it->second.front()];
    dst.insert(dst.end(), matches.begin(), matches.end());
    std::sort(dst.begin(), dst.end());
  }
  return out;
}

}  // namespace kgfuse
