#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace kgfuse {

std::string to_lower(std::string_view s);

// Word-level tokenization shared by KB phrases, prompts, and the subword
// tokenizer: lowercase, then maximal runs of ASCII letters/digits. Hyphens,
// apostrophes and punctuation separate words.
std::vector<std::string> word_tokenize(std::string_view text);

bool is_alpha_word(std::string_view s);

std::vector<std::string> split(std::string_view s, char sep);

}  // namespace kgfuse
