#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace kgfuse {

// Porter (1980) suffix-stripping stemmer. Input must be lowercase ASCII
// letters; anything else throws DataError. Words of one or two letters are
// returned unchanged.
std::string stem(std::string_view word);

// Element-wise stem. Errors name the offending token index.
std::vector<std::string> stem_tokens(std::span<const std::string> tokens);

// Match key for a word-level token: its stem when alphabetic, otherwise the
// token itself (digits and mixed tokens are matched literally).
std::string stem_key(std::string_view token);

}  // namespace kgfuse
