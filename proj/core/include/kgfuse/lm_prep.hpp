#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "kgfuse/corpus.hpp"
#include "kgfuse/random.hpp"

namespace kgfuse {

inline constexpr std::string_view kContinuationMarker = "##";
inline constexpr std::size_t kDefaultMaxSequenceLength = 450;
inline constexpr double kMaskProbability = 0.15;

// Ordered subword inventory. Ids 0..4 are the reserved markers in the order
// PAD, UNK, CLS, SEP, MASK.
class SubwordVocab {
 public:
  static constexpr int kPad = 0;
  static constexpr int kUnk = 1;
  static constexpr int kCls = 2;
  static constexpr int kSep = 3;
  static constexpr int kMask = 4;
  static constexpr int kNumSpecial = 5;

  static const std::vector<std::string>& special_tokens();

  SubwordVocab() = default;
  // Validates reserved markers and uniqueness.
  static SubwordVocab from_tokens(std::vector<std::string> tokens);
  static SubwordVocab load(const std::filesystem::path& path);
  void save(const std::filesystem::path& path) const;

  // Whole words and every continuation suffix of the `top_words` most
  // frequent corpus words, plus single characters seen in the corpus.
  static SubwordVocab build_from_corpus(std::span<const Prompt> prompts, std::size_t top_words = 1000);

  std::size_t size() const { return tokens_.size(); }
  const std::string& token(int id) const { return tokens_.at(static_cast<std::size_t>(id)); }
  std::optional<int> find(std::string_view token) const;
  bool is_special(int id) const { return id >= 0 && id < kNumSpecial; }
  const std::vector<std::string>& tokens() const { return tokens_; }

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, int> ids_;
};

struct SubwordPieces {
  std::vector<int> ids;
  // Index of the source word for each piece.
  std::vector<int> word_index;
};

// Greedy longest-match-first WordPiece split. A word with any unmatched
// residue becomes a single UNK.
SubwordPieces subword_tokenize(std::span<const std::string> words, const SubwordVocab& vocab);

struct TokenSequence {
  std::vector<int> ids;
  // Source word per token; -1 for CLS/SEP.
  std::vector<int> word_index;
  // 0 up to and including the first SEP, 1 after.
  std::vector<int> segments;

  std::size_t size() const { return ids.size(); }
};

struct AssembledSequence {
  TokenSequence seq;
  // Word-level tokens the word indices refer to (before truncation).
  std::vector<std::string> words;
};

// [CLS] first [SEP] second [SEP]. `first_truncatable` is cut from its end
// when the sequence exceeds max_len; `first_fixed` and `second` are kept.
AssembledSequence assemble_segments(std::span<const std::string> first_truncatable,
                                    std::span<const std::string> first_fixed,
                                    std::span<const std::string> second, const SubwordVocab& vocab,
                                    std::size_t max_len);

// [CLS] passage question [SEP] answer [SEP]
AssembledSequence assemble_sequence(std::string_view passage, std::string_view question,
                                    std::string_view answer, const SubwordVocab& vocab,
                                    std::size_t max_len = kDefaultMaxSequenceLength);

enum class MaskAction : std::uint8_t { kMask, kRandom, kKeep };
enum class NspLabel : std::uint8_t { kIsNext, kNotNext };

std::string_view to_string(NspLabel label);

struct MaskedExample {
  TokenSequence seq;  // ids after masking
  std::vector<int> mask_positions;
  std::vector<int> original_ids;
  std::vector<MaskAction> actions;
  std::optional<NspLabel> nsp;
};

// Each non-special token is selected with probability `mask_prob`; selected
// tokens become MASK (80%), a random non-special token (10%) or stay (10%).
MaskedExample apply_masking(const TokenSequence& seq, const SubwordVocab& vocab, Rng& rng,
                            double mask_prob = kMaskProbability);

struct NspPair {
  std::string first;
  std::string second;
  NspLabel label;
  // Index of the anchor sentence within the passage.
  std::size_t anchor = 0;
};

enum class NspBranch { kRandom, kForceIsNext, kForceNotNext };

// Anchor drawn from `passage` among sentences with a successor; the negative
// is any corpus sentence whose text differs from the true successor.
NspPair make_nsp_pair(const SentenceList& passage, std::span<const std::string> corpus, Rng& rng,
                      NspBranch branch = NspBranch::kRandom);

enum class LmOrder { kPairThenMask, kMaskThenPair };

struct LmPrepOptions {
  std::size_t max_len = kDefaultMaxSequenceLength;
  double mask_prob = kMaskProbability;
  LmOrder order = LmOrder::kPairThenMask;
};

// Fresh masking and NSP pairing for one epoch; a pure function of
// (prompts, vocab, epoch, base_seed, options). Prompts whose passage has
// fewer than two sentences contribute a masked prompt sequence without an
// NSP label.
std::vector<MaskedExample> regenerate_epoch(std::span<const Prompt> prompts, const SubwordVocab& vocab,
                                            std::uint64_t epoch, std::uint64_t base_seed,
                                            const LmPrepOptions& options = {});

// One line of the `preprocess` output.
std::string masked_example_to_json(const MaskedExample& ex, const SubwordVocab& vocab);

}  // namespace kgfuse
