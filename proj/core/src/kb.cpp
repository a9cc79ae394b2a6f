#include "kgfuse/kb.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "kgfuse/error.hpp"
#include "kgfuse/stemmer.hpp"
#include "kgfuse/text.hpp"

namespace kgfuse {

namespace {

constexpr std::size_t kNpos = static_cast<std::size_t>(-1);

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::string join_key(std::span<const std::string> stems) {
  std::string key;
  for (std::size_t i = 0; i < stems.size(); ++i) {
    if (i) key.push_back(' ');
    key += stems[i];
  }
  return key;
}

// Reads a 3-column TSV and calls `row(line_no, a, b, c)` for each non-blank line.
template <typename RowFn>
void read_tsv3(const std::filesystem::path& path, ParseStats* stats, RowFn&& row) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    auto fields = split(line, '\t');
    if (fields.size() != 3) {
      throw DataError(path.string() + ": row " + std::to_string(line_no) + ": expected 3 fields, got " +
                      std::to_string(fields.size()));
    }
    if (stats) ++stats->rows;
    row(line_no, trim(fields[0]), trim(fields[1]), trim(fields[2]));
  }
}

bool add_triple(std::vector<KnowledgeTriple>& out, ParseStats* stats, KnowledgeBase kb,
                std::string_view start, std::string_view end, std::string edge) {
  KnowledgeTriple t;
  t.kb = kb;
  t.start = Phrase::from_text(start);
  t.end = Phrase::from_text(end);
  t.edge = std::move(edge);
  if (t.start.empty() || t.end.empty() || t.edge.empty()) {
    if (stats) ++stats->skipped_empty;
    return false;
  }
  out.push_back(std::move(t));
  return true;
}

std::vector<std::string> view_stems(const Prompt& p, int answer) {
  auto tokens = prompt_view_tokens(p, answer);
  std::vector<std::string> stems;
  stems.reserve(tokens.size());
  for (const auto& t : tokens) stems.push_back(stem_key(t));
  return stems;
}

bool sorted_intersect(const std::vector<std::uint32_t>& a, const std::vector<std::uint32_t>& b) {
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] == b[j]) return true;
    if (a[i] < b[j]) {
      ++i;
    } else {
      ++j;
    }
  }
  return false;
}

}  // namespace

std::string_view to_string(KnowledgeBase kb) {
  switch (kb) {
    case KnowledgeBase::kConceptNet: return "ConceptNet";
    case KnowledgeBase::kWebChild: return "WebChild";
    case KnowledgeBase::kAtomic: return "ATOMIC";
  }
  return "?";
}

KnowledgeBase knowledge_base_from_string(std::string_view name) {
  const std::string lower = to_lower(name);
  if (lower == "conceptnet") return KnowledgeBase::kConceptNet;
  if (lower == "webchild") return KnowledgeBase::kWebChild;
  if (lower == "atomic") return KnowledgeBase::kAtomic;
  throw DataError("unknown knowledge base '" + std::string(name) + "'");
}

Phrase Phrase::from_text(std::string_view text) {
  Phrase p;
  p.tokens = word_tokenize(text);
  p.stems.reserve(p.tokens.size());
  for (const auto& t : p.tokens) p.stems.push_back(stem_key(t));
  return p;
}

std::vector<KnowledgeTriple> parse_conceptnet(const std::filesystem::path& path, ParseStats* stats) {
  std::vector<KnowledgeTriple> out;
  read_tsv3(path, stats, [&](std::size_t, const std::string& edge, const std::string& start,
                             const std::string& end) {
    add_triple(out, stats, KnowledgeBase::kConceptNet, start, end, edge);
  });
  return out;
}

std::string strip_sense_tag(std::string_view subject) {
  const auto hash = subject.find('#');
  return std::string(hash == std::string_view::npos ? subject : subject.substr(0, hash));
}

std::vector<KnowledgeTriple> parse_webchild_file(const std::filesystem::path& path, ParseStats* stats) {
  const std::string category = path.stem().string();
  if (std::find(kWebChildCategories.begin(), kWebChildCategories.end(), category) ==
      kWebChildCategories.end()) {
    throw DataError(path.string() + ": unknown WebChild category '" + category + "'");
  }
  std::vector<KnowledgeTriple> out;
  read_tsv3(path, stats, [&](std::size_t, const std::string& subject, const std::string& object,
                             const std::string& sub_relation) {
    if (sub_relation.empty()) {
      if (stats) ++stats->skipped_empty;
      return;
    }
    add_triple(out, stats, KnowledgeBase::kWebChild, strip_sense_tag(subject),
               strip_sense_tag(object), category + "/" + sub_relation);
  });
  return out;
}

std::vector<KnowledgeTriple> parse_webchild(const std::filesystem::path& dir, ParseStats* stats) {
  if (!std::filesystem::is_directory(dir)) throw DataError(dir.string() + ": not a directory");
  std::vector<KnowledgeTriple> out;
  for (auto category : kWebChildCategories) {
    const auto file = dir / (std::string(category) + ".tsv");
    if (!std::filesystem::exists(file)) continue;
    auto part = parse_webchild_file(file, stats);
    out.insert(out.end(), std::make_move_iterator(part.begin()), std::make_move_iterator(part.end()));
  }
  return out;
}

std::vector<KnowledgeTriple> parse_atomic(const std::filesystem::path& path, ParseStats* stats) {
  std::vector<KnowledgeTriple> out;
  read_tsv3(path, stats, [&](std::size_t line_no, const std::string& head, const std::string& relation,
                             const std::string& tail) {
    if (std::find(kAtomicRelations.begin(), kAtomicRelations.end(), relation) == kAtomicRelations.end()) {
      throw DataError(path.string() + ": row " + std::to_string(line_no) + ": unknown ATOMIC relation '" +
                      relation + "'");
    }
    add_triple(out, stats, KnowledgeBase::kAtomic, head, tail, relation);
  });
  return out;
}

int RelationIndex::add(KnowledgeBase kb, const std::string& label) {
  auto& ids = ids_[index(kb)];
  auto it = ids.find(label);
  if (it != ids.end()) return it->second;
  const int id = static_cast<int>(labels_[index(kb)].size());
  ids.emplace(label, id);
  labels_[index(kb)].push_back(label);
  return id;
}

std::optional<int> RelationIndex::find(KnowledgeBase kb, std::string_view label) const {
  const auto& ids = ids_[index(kb)];
  auto it = ids.find(label);
  if (it == ids.end()) return std::nullopt;
  return it->second;
}

const std::string& RelationIndex::label(KnowledgeBase kb, int id) const {
  const auto& labels = labels_[index(kb)];
  if (id < 0 || static_cast<std::size_t>(id) >= labels.size()) {
    throw DataError("relation id " + std::to_string(id) + " out of range for " + std::string(to_string(kb)));
  }
  return labels[static_cast<std::size_t>(id)];
}

void RelationIndex::finalize() {
  for (std::size_t k = 0; k < kNumKnowledgeBases; ++k) {
    std::sort(labels_[k].begin(), labels_[k].end());
    ids_[k].clear();
    for (std::size_t i = 0; i < labels_[k].size(); ++i) ids_[k].emplace(labels_[k][i], static_cast<int>(i));
  }
}

VocabIndex::VocabIndex(std::vector<KnowledgeTriple> triples, std::vector<std::size_t> source_ids)
    : triples_(std::move(triples)), source_ids_(std::move(source_ids)) {
  if (source_ids_.size() != triples_.size()) throw DataError("VocabIndex: source id count mismatch");
  for (const auto& t : triples_) relations_.add(t.kb, t.edge);
  relations_.finalize();
  relation_ids_.reserve(triples_.size());
  for (std::uint32_t i = 0; i < triples_.size(); ++i) {
    const auto& t = triples_[i];
    relation_ids_.push_back(*relations_.find(t.kb, t.edge));
    for (bool is_start : {true, false}) {
      const Phrase& ph = is_start ? t.start : t.end;
      if (!ph.uses_trigrams()) {
        unigrams_[ph.stems.front()].push_back({i, is_start});
        continue;
      }
      for (std::size_t p = 0; p + 3 <= ph.stems.size(); ++p) {
        auto& refs = trigrams_[join_key(std::span(ph.stems).subspan(p, 3))];
        const PhraseRef ref{i, is_start};
        if (refs.empty() || refs.back().triple != i || refs.back().is_start != is_start) refs.push_back(ref);
      }
    }
  }
}

std::vector<std::string> prompt_view_tokens(const Prompt& prompt, int answer) {
  auto tokens = word_tokenize(prompt.passage);
  auto q = word_tokenize(prompt.question);
  auto a = word_tokenize(prompt.answers.at(static_cast<std::size_t>(answer)));
  tokens.insert(tokens.end(), q.begin(), q.end());
  tokens.insert(tokens.end(), a.begin(), a.end());
  return tokens;
}

VocabIndex build_vocab_index(std::span<const KnowledgeTriple> triples, std::span<const Prompt> prompts) {
  // n-gram (n <= 3) -> ids of the views containing it, ascending.
  std::unordered_map<std::string, std::vector<std::uint32_t>> views_by_ngram;
  std::uint32_t view = 0;
  for (const auto& prompt : prompts) {
    for (int a = 0; a < 2; ++a, ++view) {
      const auto stems = view_stems(prompt, a);
      for (std::size_t n = 1; n <= kFullPhraseMaxTokens; ++n) {
        for (std::size_t p = 0; p + n <= stems.size(); ++p) {
          auto& ids = views_by_ngram[join_key(std::span(stems).subspan(p, n))];
          if (ids.empty() || ids.back() != view) ids.push_back(view);
        }
      }
    }
  }

  auto views_of = [&](const Phrase& ph) {
    std::vector<std::uint32_t> ids;
    if (!ph.uses_trigrams()) {
      auto it = views_by_ngram.find(join_key(ph.stems));
      if (it != views_by_ngram.end()) ids = it->second;
      return ids;
    }
    for (std::size_t p = 0; p + 3 <= ph.stems.size(); ++p) {
      auto it = views_by_ngram.find(join_key(std::span(ph.stems).subspan(p, 3)));
      if (it != views_by_ngram.end()) ids.insert(ids.end(), it->second.begin(), it->second.end());
    }
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    return ids;
  };

  std::vector<KnowledgeTriple> kept;
  std::vector<std::size_t> source;
  for (std::size_t i = 0; i < triples.size(); ++i) {
    const auto start_views = views_of(triples[i].start);
    if (start_views.empty()) continue;
    if (sorted_intersect(start_views, views_of(triples[i].end))) {
      kept.push_back(triples[i]);
      source.push_back(i);
    }
  }
  return VocabIndex(std::move(kept), std::move(source));
}

MatchIndex match_prompt(std::span<const std::string> tokens, const VocabIndex& index) {
  std::vector<std::string> stems;
  stems.reserve(tokens.size());
  for (const auto& t : tokens) stems.push_back(stem_key(t));

  const auto& triples = index.triples();
  std::vector<std::size_t> start_pos(triples.size(), kNpos);
  std::vector<char> end_found(triples.size(), 0);

  auto note = [&](const PhraseRef& ref, std::size_t p) {
    if (ref.is_start) {
      if (start_pos[ref.triple] == kNpos) start_pos[ref.triple] = p;
    } else {
      end_found[ref.triple] = 1;
    }
  };

  for (std::size_t p = 0; p < stems.size(); ++p) {
    if (auto it = index.unigram_lookup().find(stems[p]); it != index.unigram_lookup().end()) {
      for (const auto& ref : it->second) {
        const auto& ph = ref.is_start ? triples[ref.triple].start : triples[ref.triple].end;
        if (p + ph.stems.size() > stems.size()) continue;
        if (std::equal(ph.stems.begin(), ph.stems.end(), stems.begin() + static_cast<std::ptrdiff_t>(p))) {
          note(ref, p);
        }
      }
    }
    if (p + 3 <= stems.size()) {
      const auto key = join_key(std::span(stems).subspan(p, 3));
      if (auto it = index.trigram_lookup().find(key); it != index.trigram_lookup().end()) {
        for (const auto& ref : it->second) note(ref, p);
      }
    }
  }

  MatchIndex out;
  for (std::size_t i = 0; i < triples.size(); ++i) {
    if (start_pos[i] == kNpos || !end_found[i]) continue;
    out[start_pos[i]].push_back({triples[i].kb, index.relation_of(i), static_cast<int>(i)});
  }
  for (auto& [_, v] : out) std::sort(v.begin(), v.end());
  return out;
}

std::optional<std::size_t> find_phrase(std::span<const std::string> text_stems,
                                       std::span<const std::string> phrase_stems) {
  if (phrase_stems.empty()) return std::nullopt;
  const std::size_t n = phrase_stems.size() > kFullPhraseMaxTokens ? 3 : phrase_stems.size();
  for (std::size_t p = 0; p + n <= text_stems.size(); ++p) {
    for (std::size_t q = 0; q + n <= phrase_stems.size(); ++q) {
      if (std::equal(phrase_stems.begin() + static_cast<std::ptrdiff_t>(q),
                     phrase_stems.begin() + static_cast<std::ptrdiff_t>(q + n),
                     text_stems.begin() + static_cast<std::ptrdiff_t>(p))) {
        return p;
      }
      if (n == phrase_stems.size()) break;
    }
  }
  return std::nullopt;
}

std::string VocabIndex::to_json() const {
  nlohmann::ordered_json doc;
  doc["version"] = kIndexSnapshotVersion;
  nlohmann::ordered_json rel = nlohmann::ordered_json::object();
  for (auto kb : kAllKnowledgeBases) {
    nlohmann::ordered_json m = nlohmann::ordered_json::object();
    const auto& labels = relations_.labels(kb);
    for (std::size_t i = 0; i < labels.size(); ++i) m[labels[i]] = i;
    rel[std::string(to_string(kb))] = std::move(m);
  }
  doc["relations"] = std::move(rel);
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < triples_.size(); ++i) {
    const auto& t = triples_[i];
    nlohmann::ordered_json j;
    j["kb"] = std::string(to_string(t.kb));
    j["edge"] = t.edge;
    j["relation"] = relation_ids_[i];
    j["start"] = t.start.tokens;
    j["start_stems"] = t.start.stems;
    j["end"] = t.end.tokens;
    j["end_stems"] = t.end.stems;
    j["source"] = source_ids_[i];
    arr.push_back(std::move(j));
  }
  doc["triples"] = std::move(arr);
  return doc.dump(1) + "\n";
}

VocabIndex VocabIndex::from_json(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("index snapshot: ") + e.what());
  }
  try {
    if (doc.at("version").get<int>() != kIndexSnapshotVersion) {
      throw DataError("index snapshot: unsupported version");
    }
    std::vector<KnowledgeTriple> triples;
    std::vector<std::size_t> source;
    for (const auto& j : doc.at("triples")) {
      KnowledgeTriple t;
      t.kb = knowledge_base_from_string(j.at("kb").get<std::string>());
      t.edge = j.at("edge").get<std::string>();
      t.start.tokens = j.at("start").get<std::vector<std::string>>();
      t.start.stems = j.at("start_stems").get<std::vector<std::string>>();
      t.end.tokens = j.at("end").get<std::vector<std::string>>();
      t.end.stems = j.at("end_stems").get<std::vector<std::string>>();
      if (t.start.empty() || t.end.empty() || t.start.tokens.size() != t.start.stems.size() ||
          t.end.tokens.size() != t.end.stems.size()) {
        throw DataError("index snapshot: malformed phrase");
      }
      source.push_back(j.at("source").get<std::size_t>());
      triples.push_back(std::move(t));
    }
    VocabIndex index(std::move(triples), std::move(source));
    for (auto kb : kAllKnowledgeBases) {
      const auto& stored = doc.at("relations").at(std::string(to_string(kb)));
      if (stored.size() != index.relations().size(kb)) throw DataError("index snapshot: relation table mismatch");
      for (const auto& [label, id] : stored.items()) {
        if (index.relations().find(kb, label) != id.get<int>()) {
          throw DataError("index snapshot: relation id mismatch for '" + label + "'");
        }
      }
    }
    return index;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("index snapshot: ") + e.what());
  }
}

void VocabIndex::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << to_json();
}

VocabIndex VocabIndex::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_json(buf.str());
}

}  // namespace kgfuse
