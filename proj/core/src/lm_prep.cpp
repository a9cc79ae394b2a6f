#include "kgfuse/lm_prep.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <nlohmann/json.hpp>
#include <set>

#include "kgfuse/error.hpp"
#include "kgfuse/text.hpp"

namespace kgfuse {

namespace {

constexpr std::size_t kMaxWordChars = 100;
constexpr int kNegativeDrawAttempts = 64;

// Joins two unmasked-or-masked fragments (no specials) into
// [CLS] a [SEP] b [SEP], cutting `a` from its end to fit.
MaskedExample join_fragments(const MaskedExample& a, std::size_t a_fixed_tail, const MaskedExample& b,
                             std::size_t max_len) {
  const std::size_t fixed = 3 + a_fixed_tail + b.seq.size();
  if (fixed > max_len) {
    throw DataError("sequence does not fit: " + std::to_string(fixed) + " protected tokens exceed max_len " +
                    std::to_string(max_len));
  }
  const std::size_t a_trunc = a.seq.size() - a_fixed_tail;
  const std::size_t keep_trunc = std::min(a_trunc, max_len - fixed);

  MaskedExample out;
  auto& s = out.seq;
  auto push = [&s](int id, int word, int segment) {
    s.ids.push_back(id);
    s.word_index.push_back(word);
    s.segments.push_back(segment);
  };
  std::vector<int> a_to_out(a.seq.size(), -1);
  std::vector<int> b_to_out(b.seq.size(), -1);

  push(SubwordVocab::kCls, -1, 0);
  for (std::size_t i = 0; i < a.seq.size(); ++i) {
    if (i >= keep_trunc && i < a_trunc) continue;
    a_to_out[i] = static_cast<int>(s.size());
    push(a.seq.ids[i], a.seq.word_index[i], 0);
  }
  push(SubwordVocab::kSep, -1, 0);
  for (std::size_t i = 0; i < b.seq.size(); ++i) {
    b_to_out[i] = static_cast<int>(s.size());
    push(b.seq.ids[i], b.seq.word_index[i], 1);
  }
  push(SubwordVocab::kSep, -1, 1);

  auto carry = [&out](const MaskedExample& src, const std::vector<int>& map) {
    for (std::size_t m = 0; m < src.mask_positions.size(); ++m) {
      const int pos = map[static_cast<std::size_t>(src.mask_positions[m])];
      if (pos < 0) continue;
      out.mask_positions.push_back(pos);
      out.original_ids.push_back(src.original_ids[m]);
      out.actions.push_back(src.actions[m]);
    }
  };
  carry(a, a_to_out);
  carry(b, b_to_out);
  return out;
}

MaskedExample fragment(std::span<const std::string> words, const SubwordVocab& vocab, int word_offset) {
  auto pieces = subword_tokenize(words, vocab);
  MaskedExample f;
  f.seq.ids = std::move(pieces.ids);
  f.seq.word_index = std::move(pieces.word_index);
  for (int& w : f.seq.word_index) w += word_offset;
  f.seq.segments.assign(f.seq.ids.size(), 0);
  return f;
}

MaskedExample concat_fragments(MaskedExample a, const MaskedExample& b) {
  const int offset = static_cast<int>(a.seq.size());
  a.seq.ids.insert(a.seq.ids.end(), b.seq.ids.begin(), b.seq.ids.end());
  a.seq.word_index.insert(a.seq.word_index.end(), b.seq.word_index.begin(), b.seq.word_index.end());
  a.seq.segments.insert(a.seq.segments.end(), b.seq.segments.begin(), b.seq.segments.end());
  for (std::size_t m = 0; m < b.mask_positions.size(); ++m) {
    a.mask_positions.push_back(b.mask_positions[m] + offset);
    a.original_ids.push_back(b.original_ids[m]);
    a.actions.push_back(b.actions[m]);
  }
  return a;
}

void check_max_len(std::size_t max_len) {
  if (max_len < 8) throw ConfigError("max_len must be at least 8");
}

}  // namespace

const std::vector<std::string>& SubwordVocab::special_tokens() {
  static const std::vector<std::string> kSpecials = {"[PAD]", "[UNK]", "[CLS]", "[SEP]", "[MASK]"};
  return kSpecials;
}

SubwordVocab SubwordVocab::from_tokens(std::vector<std::string> tokens) {
  const auto& specials = special_tokens();
  if (tokens.size() < specials.size() || !std::equal(specials.begin(), specials.end(), tokens.begin())) {
    throw DataError("vocab must start with [PAD], [UNK], [CLS], [SEP], [MASK] in that order");
  }
  SubwordVocab v;
  v.tokens_ = std::move(tokens);
  v.ids_.reserve(v.tokens_.size());
  for (std::size_t i = 0; i < v.tokens_.size(); ++i) {
    if (v.tokens_[i].empty()) throw DataError("vocab line " + std::to_string(i + 1) + " is empty");
    if (!v.ids_.emplace(v.tokens_[i], static_cast<int>(i)).second) {
      throw DataError("duplicate vocab entry '" + v.tokens_[i] + "' at line " + std::to_string(i + 1));
    }
  }
  return v;
}

SubwordVocab SubwordVocab::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::vector<std::string> tokens;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    tokens.push_back(line);
  }
  while (!tokens.empty() && tokens.back().empty()) tokens.pop_back();
  return from_tokens(std::move(tokens));
}

void SubwordVocab::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  for (const auto& t : tokens_) out << t << '\n';
}

SubwordVocab SubwordVocab::build_from_corpus(std::span<const Prompt> prompts, std::size_t top_words) {
  std::map<std::string, std::size_t> counts;
  auto count = [&counts](std::string_view text) {
    for (auto& w : word_tokenize(text)) ++counts[w];
  };
  for (const auto& p : prompts) {
    count(p.passage);
    count(p.question);
    count(p.answers[0]);
    count(p.answers[1]);
  }
  std::vector<std::pair<std::string, std::size_t>> ranked(counts.begin(), counts.end());
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  if (ranked.size() > top_words) ranked.resize(top_words);

  std::set<std::string> units;
  for (const auto& [word, _] : ranked) {
    units.insert(word);
    for (std::size_t k = 1; k < word.size(); ++k) units.insert(std::string(kContinuationMarker) + word.substr(k));
  }
  for (const auto& [word, _] : counts) {
    for (char c : word) {
      units.insert(std::string(1, c));
      units.insert(std::string(kContinuationMarker) + c);
    }
  }
  std::vector<std::string> tokens = special_tokens();
  tokens.insert(tokens.end(), units.begin(), units.end());
  return from_tokens(std::move(tokens));
}

std::optional<int> SubwordVocab::find(std::string_view token) const {
  auto it = ids_.find(std::string(token));
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

SubwordPieces subword_tokenize(std::span<const std::string> words, const SubwordVocab& vocab) {
  if (vocab.size() <= static_cast<std::size_t>(SubwordVocab::kNumSpecial)) {
    throw DataError("subword vocabulary is empty");
  }
  SubwordPieces out;
  std::vector<int> pieces;
  for (std::size_t w = 0; w < words.size(); ++w) {
    const std::string& word = words[w];
    pieces.clear();
    bool bad = word.size() > kMaxWordChars || word.empty();
    std::size_t start = 0;
    std::string candidate;
    while (!bad && start < word.size()) {
      std::size_t end = word.size();
      std::optional<int> hit;
      while (start < end) {
        candidate.clear();
        if (start > 0) candidate = kContinuationMarker;
        candidate.append(word, start, end - start);
        if ((hit = vocab.find(candidate))) break;
        --end;
      }
      if (!hit) {
        bad = true;
        break;
      }
      pieces.push_back(*hit);
      start = end;
    }
    if (bad) {
      out.ids.push_back(SubwordVocab::kUnk);
      out.word_index.push_back(static_cast<int>(w));
    } else {
      for (int id : pieces) {
        out.ids.push_back(id);
        out.word_index.push_back(static_cast<int>(w));
      }
    }
  }
  return out;
}

AssembledSequence assemble_segments(std::span<const std::string> first_truncatable,
                                    std::span<const std::string> first_fixed,
                                    std::span<const std::string> second, const SubwordVocab& vocab,
                                    std::size_t max_len) {
  check_max_len(max_len);
  if (second.empty()) throw DataError("second segment (answer) is empty");
  const int n_trunc = static_cast<int>(first_truncatable.size());
  const int n_fixed = static_cast<int>(first_fixed.size());
  auto a = fragment(first_truncatable, vocab, 0);
  auto a_fixed = fragment(first_fixed, vocab, n_trunc);
  const std::size_t fixed_tail = a_fixed.seq.size();
  auto b = fragment(second, vocab, n_trunc + n_fixed);
  auto joined = join_fragments(concat_fragments(std::move(a), a_fixed), fixed_tail, b, max_len);

  AssembledSequence out;
  out.seq = std::move(joined.seq);
  out.words.assign(first_truncatable.begin(), first_truncatable.end());
  out.words.insert(out.words.end(), first_fixed.begin(), first_fixed.end());
  out.words.insert(out.words.end(), second.begin(), second.end());
  return out;
}

AssembledSequence assemble_sequence(std::string_view passage, std::string_view question,
                                    std::string_view answer, const SubwordVocab& vocab, std::size_t max_len) {
  const auto p = word_tokenize(passage);
  const auto q = word_tokenize(question);
  const auto a = word_tokenize(answer);
  return assemble_segments(p, q, a, vocab, max_len);
}

std::string_view to_string(NspLabel label) {
  return label == NspLabel::kIsNext ? "IsNext" : "NotNext";
}

MaskedExample apply_masking(const TokenSequence& seq, const SubwordVocab& vocab, Rng& rng, double mask_prob) {
  MaskedExample ex;
  ex.seq = seq;
  const auto n_regular = static_cast<std::uint64_t>(vocab.size() - SubwordVocab::kNumSpecial);
  for (std::size_t i = 0; i < seq.size(); ++i) {
    const int id = seq.ids[i];
    const bool from_word = i >= seq.word_index.size() || seq.word_index[i] >= 0;
    if (!from_word || (vocab.is_special(id) && id != SubwordVocab::kUnk)) continue;
    if (rng.uniform() >= mask_prob) continue;
    ex.mask_positions.push_back(static_cast<int>(i));
    ex.original_ids.push_back(id);
    const double r = rng.uniform();
    if (r < 0.8) {
      ex.seq.ids[i] = SubwordVocab::kMask;
      ex.actions.push_back(MaskAction::kMask);
    } else if (r < 0.9 && n_regular > 0) {
      ex.seq.ids[i] = SubwordVocab::kNumSpecial + static_cast<int>(rng.uniform_int(n_regular));
      ex.actions.push_back(MaskAction::kRandom);
    } else {
      ex.actions.push_back(MaskAction::kKeep);
    }
  }
  return ex;
}

NspPair make_nsp_pair(const SentenceList& passage, std::span<const std::string> corpus, Rng& rng,
                      NspBranch branch) {
  if (corpus.size() < 3) throw DataError("NSP needs at least 3 sentences in the corpus");
  if (passage.size() < 2) throw DataError("NSP anchor passage needs at least 2 sentences");
  const std::size_t anchor = rng.uniform_int(passage.size() - 1);
  const std::string& successor = passage.sentences[anchor + 1].text;
  bool is_next = branch == NspBranch::kForceIsNext;
  if (branch == NspBranch::kRandom) is_next = rng.uniform() < 0.5;
  if (is_next) return {passage.sentences[anchor].text, successor, NspLabel::kIsNext, anchor};

  for (int attempt = 0; attempt < kNegativeDrawAttempts; ++attempt) {
    const auto& candidate = corpus[rng.uniform_int(corpus.size())];
    if (candidate != successor) return {passage.sentences[anchor].text, candidate, NspLabel::kNotNext, anchor};
  }
  std::vector<std::size_t> allowed;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    if (corpus[i] != successor) allowed.push_back(i);
  }
  if (allowed.empty()) throw DataError("NSP: every corpus sentence equals the true successor");
  return {passage.sentences[anchor].text, corpus[allowed[rng.uniform_int(allowed.size())]], NspLabel::kNotNext,
          anchor};
}

std::vector<MaskedExample> regenerate_epoch(std::span<const Prompt> prompts, const SubwordVocab& vocab,
                                            std::uint64_t epoch, std::uint64_t base_seed,
                                            const LmPrepOptions& options) {
  check_max_len(options.max_len);
  // Sentences without any word carry nothing to predict.
  std::vector<SentenceList> passages;
  std::vector<std::string> corpus;
  passages.reserve(prompts.size());
  for (const auto& p : prompts) {
    auto list = split_sentences(p.passage);
    std::erase_if(list.sentences, [](const Sentence& s) { return word_tokenize(s.text).empty(); });
    for (const auto& s : list.sentences) corpus.push_back(s.text);
    passages.push_back(std::move(list));
  }

  Rng rng(derive_seed(base_seed, epoch));
  std::vector<MaskedExample> out;
  out.reserve(prompts.size());
  for (std::size_t i = 0; i < prompts.size(); ++i) {
    const auto& p = prompts[i];
    if (passages[i].size() < 2 || corpus.size() < 3) {
      const int answer = p.gold.value_or(0);
      auto assembled = assemble_sequence(p.passage, p.question, p.answers[static_cast<std::size_t>(answer)],
                                         vocab, options.max_len);
      out.push_back(apply_masking(assembled.seq, vocab, rng, options.mask_prob));
      continue;
    }

    if (options.order == LmOrder::kPairThenMask) {
      const auto pair = make_nsp_pair(passages[i], corpus, rng);
      const auto a = word_tokenize(pair.first);
      const auto b = word_tokenize(pair.second);
      auto assembled = assemble_segments(a, {}, b, vocab, options.max_len);
      auto ex = apply_masking(assembled.seq, vocab, rng, options.mask_prob);
      ex.nsp = pair.label;
      out.push_back(std::move(ex));
      continue;
    }

    // Mask-then-pair: every sentence of the passage is masked before the pair
    // is drawn; an out-of-passage negative is masked when it is drawn.
    std::vector<MaskedExample> masked_sentences;
    std::vector<std::size_t> word_counts;
    for (const auto& s : passages[i].sentences) {
      const auto words = word_tokenize(s.text);
      word_counts.push_back(words.size());
      auto frag = fragment(words, vocab, 0);
      auto masked = apply_masking(frag.seq, vocab, rng, options.mask_prob);
      masked_sentences.push_back(std::move(masked));
    }
    const auto pair = make_nsp_pair(passages[i], corpus, rng);
    const std::size_t anchor = pair.anchor;
    MaskedExample second;
    if (pair.label == NspLabel::kIsNext) {
      second = masked_sentences[anchor + 1];
    } else {
      const auto words = word_tokenize(pair.second);
      auto frag = fragment(words, vocab, 0);
      second = apply_masking(frag.seq, vocab, rng, options.mask_prob);
    }
    const int offset = static_cast<int>(word_counts[anchor]);
    for (int& w : second.seq.word_index) w += offset;
    auto ex = join_fragments(masked_sentences[anchor], 0, second, options.max_len);
    ex.nsp = pair.label;
    out.push_back(std::move(ex));
  }
  return out;
}

std::string masked_example_to_json(const MaskedExample& ex, const SubwordVocab& vocab) {
  nlohmann::ordered_json j;
  std::vector<std::string> tokens;
  tokens.reserve(ex.seq.size());
  for (int id : ex.seq.ids) tokens.push_back(vocab.token(id));
  std::vector<std::string> originals;
  for (int id : ex.original_ids) originals.push_back(vocab.token(id));
  std::vector<std::string> actions;
  for (auto a : ex.actions) {
    actions.emplace_back(a == MaskAction::kMask ? "mask" : a == MaskAction::kRandom ? "random" : "keep");
  }
  j["tokens"] = tokens;
  j["input_ids"] = ex.seq.ids;
  j["segment_ids"] = ex.seq.segments;
  j["word_index"] = ex.seq.word_index;
  j["mask_positions"] = ex.mask_positions;
  j["original_ids"] = ex.original_ids;
  j["original_tokens"] = originals;
  j["actions"] = actions;
  if (ex.nsp) {
    j["nsp_label"] = std::string(to_string(*ex.nsp));
  } else {
    j["nsp_label"] = nullptr;
  }
  return j.dump();
}

}  // namespace kgfuse
