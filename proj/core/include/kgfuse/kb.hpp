#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "kgfuse/corpus.hpp"

namespace kgfuse {

enum class KnowledgeBase : std::uint8_t { kConceptNet = 0, kWebChild = 1, kAtomic = 2 };

inline constexpr std::size_t kNumKnowledgeBases = 3;
inline constexpr std::array<KnowledgeBase, kNumKnowledgeBases> kAllKnowledgeBases = {
    KnowledgeBase::kConceptNet, KnowledgeBase::kWebChild, KnowledgeBase::kAtomic};

std::string_view to_string(KnowledgeBase kb);
KnowledgeBase knowledge_base_from_string(std::string_view name);

inline constexpr std::array<std::string_view, 5> kWebChildCategories = {
    "part-whole", "comparative", "property", "activity", "spatial"};

inline constexpr std::array<std::string_view, 9> kAtomicRelations = {
    "oEffect", "oReact", "oWant", "xAttr", "xEffect", "xIntent", "xNeed", "xReact", "xWant"};

// Phrases of more than this many stemmed tokens match through any of their
// trigrams; shorter ones must appear whole.
inline constexpr std::size_t kFullPhraseMaxTokens = 3;

struct Phrase {
  std::vector<std::string> tokens;
  std::vector<std::string> stems;

  static Phrase from_text(std::string_view text);
  bool empty() const { return tokens.empty(); }
  bool uses_trigrams() const { return stems.size() > kFullPhraseMaxTokens; }
};

struct KnowledgeTriple {
  KnowledgeBase kb = KnowledgeBase::kConceptNet;
  Phrase start;
  Phrase end;
  std::string edge;
};

struct ParseStats {
  std::size_t rows = 0;
  std::size_t skipped_empty = 0;
};

// `edge \t start \t end`, no header.
std::vector<KnowledgeTriple> parse_conceptnet(const std::filesystem::path& path,
                                              ParseStats* stats = nullptr);

// Drops everything from the first '#': "bike#n#1" -> "bike".
std::string strip_sense_tag(std::string_view subject);

// One category file, `subject \t object \t sub-relation`. The category is
// taken from the file stem and must be one of kWebChildCategories.
std::vector<KnowledgeTriple> parse_webchild_file(const std::filesystem::path& path,
                                                 ParseStats* stats = nullptr);
// Every `{category}.tsv` present in `dir`; missing categories are skipped.
std::vector<KnowledgeTriple> parse_webchild(const std::filesystem::path& dir,
                                            ParseStats* stats = nullptr);

// `head_event \t relation \t tail_event`, relation in kAtomicRelations.
std::vector<KnowledgeTriple> parse_atomic(const std::filesystem::path& path,
                                          ParseStats* stats = nullptr);

// Per-KB edge label <-> contiguous id. Ids are assigned in sorted label order.
class RelationIndex {
 public:
  int add(KnowledgeBase kb, const std::string& label);
  std::optional<int> find(KnowledgeBase kb, std::string_view label) const;
  const std::string& label(KnowledgeBase kb, int id) const;
  std::size_t size(KnowledgeBase kb) const { return labels_[index(kb)].size(); }
  const std::vector<std::string>& labels(KnowledgeBase kb) const { return labels_[index(kb)]; }

  // Re-numbers every KB's labels in sorted order.
  void finalize();

 private:
  static std::size_t index(KnowledgeBase kb) { return static_cast<std::size_t>(kb); }

  std::array<std::vector<std::string>, kNumKnowledgeBases> labels_;
  std::array<std::map<std::string, int, std::less<>>, kNumKnowledgeBases> ids_;
};

struct PhraseRef {
  std::uint32_t triple;
  bool is_start;
};

struct Match {
  KnowledgeBase kb;
  int relation;
  int triple;

  friend auto operator<=>(const Match&, const Match&) = default;
};

// token position -> matches recorded at that position, sorted.
using MatchIndex = std::map<std::size_t, std::vector<Match>>;

class VocabIndex {
 public:
  VocabIndex() = default;
  // Takes retained triples as-is and derives relation ids and lookups.
  VocabIndex(std::vector<KnowledgeTriple> triples, std::vector<std::size_t> source_ids);

  const std::vector<KnowledgeTriple>& triples() const { return triples_; }
  // Position of each retained triple in the list given to build_vocab_index.
  const std::vector<std::size_t>& source_ids() const { return source_ids_; }
  const RelationIndex& relations() const { return relations_; }
  int relation_of(std::size_t triple) const { return relation_ids_[triple]; }

  // Keyed by the first stem of each phrase of <= 3 tokens.
  const std::unordered_map<std::string, std::vector<PhraseRef>>& unigram_lookup() const {
    return unigrams_;
  }
  // Keyed by every stemmed trigram of each longer phrase ("a b c").
  const std::unordered_map<std::string, std::vector<PhraseRef>>& trigram_lookup() const {
    return trigrams_;
  }

  std::string to_json() const;
  static VocabIndex from_json(std::string_view text);
  void save(const std::filesystem::path& path) const;
  static VocabIndex load(const std::filesystem::path& path);

 private:
  std::vector<KnowledgeTriple> triples_;
  std::vector<std::size_t> source_ids_;
  std::vector<int> relation_ids_;
  RelationIndex relations_;
  std::unordered_map<std::string, std::vector<PhraseRef>> unigrams_;
  std::unordered_map<std::string, std::vector<PhraseRef>> trigrams_;
};

inline constexpr int kIndexSnapshotVersion = 1;

// Word tokens of one assembled view of a prompt: passage, question, answer.
std::vector<std::string> prompt_view_tokens(const Prompt& prompt, int answer);

// Keeps the triples whose start and end both match within one assembled view
// (passage + question + one answer) of some prompt.
VocabIndex build_vocab_index(std::span<const KnowledgeTriple> triples,
                             std::span<const Prompt> prompts);

// Matches of every indexed triple against one word-level token sequence.
// Entries sit on the first word of the earliest start match.
MatchIndex match_prompt(std::span<const std::string> tokens, const VocabIndex& index);

// Earliest position where `phrase_stems` matches in `text_stems` under the
// full-phrase / trigram rule, if any.
std::optional<std::size_t> find_phrase(std::span<const std::string> text_stems,
                                       std::span<const std::string> phrase_stems);

}  // namespace kgfuse
