#pragma once

#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "kgfuse/error.hpp"
#include "kgfuse/kb.hpp"

namespace kgfuse {

// Lowercases and drops a leading continuation marker.
std::string normalize_token(std::string_view tok);

struct TokenAlignment {
  // coarse index -> fine indices, ascending.
  std::map<std::size_t, std::vector<std::size_t>> map;
  std::size_t coarse_size = 0;
  std::size_t fine_size = 0;
  // Tokens fully consumed when the loop ended.
  std::size_t coarse_consumed = 0;
  std::size_t fine_consumed = 0;

  // True when either side has trailing unconsumed tokens.
  bool partial() const { return coarse_consumed < coarse_size || fine_consumed < fine_size; }
};

class RealignmentStall : public DataError {
 public:
  RealignmentStall(std::size_t coarse_pos, std::size_t fine_pos, std::string coarse_tok, std::string fine_tok);
  std::size_t coarse_pos() const { return coarse_pos_; }
  std::size_t fine_pos() const { return fine_pos_; }

 private:
  std::size_t coarse_pos_;
  std::size_t fine_pos_;
};

// Dual-cursor alignment of word-level (coarse) tokens onto subword (fine)
// tokens. One branch fires per iteration:
//   1. remainders equal           -> record, advance both
//   2. coarse remainder prefixes the fine remainder -> record, advance coarse
//   3. fine remainder prefixes the coarse remainder -> record, advance fine
// Remainders are the unconsumed suffixes of the current normalized tokens.
// A fine "[UNK]" stands for the whole current coarse token. Throws
// RealignmentStall when no branch applies.
TokenAlignment token_realignment(std::span<const std::string> coarse, std::span<const std::string> fine);

// Same, then verifies every recorded pair against the tokenizer's per-piece
// word index. A disagreement throws DataError.
TokenAlignment token_realignment(std::span<const std::string> coarse, std::span<const std::string> fine,
                                 std::span<const int> fine_word_index);

// Moves every coarse-position match onto the first fine index of that
// coarse token.
MatchIndex project_matches(const MatchIndex& coarse_matches, const TokenAlignment& alignment);

}  // namespace kgfuse
