#include "kgfuse/synthetic.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <unordered_set>

#include "kgfuse/error.hpp"
#include "kgfuse/random.hpp"
#include "kgfuse/stemmer.hpp"
#include "kgfuse/text.hpp"

namespace kgfuse {

namespace {

constexpr std::array<std::string_view, 12> kFiller = {
    "The family went to the park on a warm day.",
    "They packed a basket with bread and fruit.",
    "Everyone sat down on the soft grass.",
    "A small dog ran across the open field.",
    "The children laughed and played all afternoon.",
    "Later they walked back home together.",
    "She opened the door and looked outside.",
    "He made a cup of tea in the kitchen.",
    "The bus arrived a little late that morning.",
    "It started to rain just after lunch.",
    "Their neighbor waved from across the street.",
    "The shop on the corner was busy again.",
};

constexpr std::array<std::string_view, 4> kCueTemplates = {
    "She noticed a {} by the old tree.",
    "He picked up the {} from the table.",
    "They talked about the {} for a while.",
    "Someone left a {} near the gate.",
};

constexpr std::string_view kAtomicCueTemplate = "She wanted to {} that day.";

struct QuestionTemplate {
  QuestionType type;
  std::string_view text;
};

constexpr std::array<QuestionTemplate, 6> kQuestions = {{
    {QuestionType::kWhat, "What did they find?"},
    {QuestionType::kWhen, "When did they find it?"},
    {QuestionType::kWhere, "Where was it found?"},
    {QuestionType::kWho, "Who found it?"},
    {QuestionType::kHow, "How did they find it?"},
    {QuestionType::kOther, "Which one did they find?"},
}};

constexpr std::array<std::string_view, 6> kConceptNetEdges = {"RelatedTo", "UsedFor", "AtLocation",
                                                             "CapableOf", "HasA",    "PartOf"};
constexpr std::array<std::string_view, 2> kWebChildSubRelations = {"hasPart", "similarTo"};

std::string fill(std::string_view tmpl, std::string_view word) {
  std::string out(tmpl);
  out.replace(out.find("{}"), 2, word);
  return out;
}

template <typename C>
const auto& pick(const C& items, Rng& rng) {
  return items[rng.uniform_int(items.size())];
}

// Consonant-vowel pseudo-words with pairwise distinct stems that share no
// stem with the template vocabulary.
std::vector<std::string> pseudo_words(std::size_t count, Rng& rng) {
  static constexpr std::string_view kConsonants = "bdfgkmnprstvz";
  static constexpr std::string_view kVowels = "aeiou";
  std::unordered_set<std::string> reserved;
  auto reserve_text = [&reserved](std::string_view text) {
    for (const auto& w : word_tokenize(text)) reserved.insert(stem_key(w));
  };
  for (auto s : kFiller) reserve_text(s);
  for (auto s : kCueTemplates) reserve_text(fill(s, ""));
  reserve_text(fill(kAtomicCueTemplate, ""));
  for (const auto& q : kQuestions) reserve_text(q.text);
  reserve_text("the personx");

  std::vector<std::string> out;
  std::unordered_set<std::string> stems;
  while (out.size() < count) {
    std::string w;
    for (int i = 0; i < 5; ++i) w.push_back(i % 2 == 0 ? pick(kConsonants, rng) : pick(kVowels, rng));
    const auto s = stem(w);
    if (reserved.contains(s) || !stems.insert(s).second) continue;
    out.push_back(std::move(w));
  }
  return out;
}

std::vector<std::string> view_stems(const Prompt& p, int answer) {
  std::vector<std::string> out;
  for (const auto& t : prompt_view_tokens(p, answer)) out.push_back(stem_key(t));
  return out;
}

bool fires(const KnowledgeTriple& t, std::span<const std::string> stems) {
  return find_phrase(stems, t.start.stems).has_value() && find_phrase(stems, t.end.stems).has_value();
}

bool any_fires(std::span<const KnowledgeTriple> triples, std::span<const std::string> stems) {
  return std::any_of(triples.begin(), triples.end(), [&](const auto& t) { return fires(t, stems); });
}

KnowledgeTriple make_triple(KnowledgeBase kb, std::string_view start, std::string_view end, std::string edge) {
  return {kb, Phrase::from_text(start), Phrase::from_text(end), std::move(edge)};
}

struct Draft {
  Prompt prompt;
  std::string key;
  // Index into the planted triple list (planted drafts only).
  std::size_t fact = 0;
};

std::string passage_with(std::string cue_sentence, Rng& rng) {
  std::vector<std::string_view> filler(kFiller.begin(), kFiller.end());
  std::vector<std::string> sentences;
  for (int i = 0; i < 3; ++i) {
    const std::size_t at = rng.uniform_int(filler.size());
    sentences.emplace_back(filler[at]);
    filler.erase(filler.begin() + static_cast<std::ptrdiff_t>(at));
  }
  const std::size_t slot = rng.uniform_int(sentences.size() + 1);
  sentences.insert(sentences.begin() + static_cast<std::ptrdiff_t>(slot), std::move(cue_sentence));
  std::string out;
  for (const auto& s : sentences) {
    if (!out.empty()) out += ' ';
    out += s;
  }
  return out;
}

void set_answers(Prompt& p, const std::string& correct, const std::string& distractor) {
  const int gold = *p.gold;
  p.answers[static_cast<std::size_t>(gold)] = "the " + correct;
  p.answers[static_cast<std::size_t>(1 - gold)] = "the " + distractor;
}

}  // namespace

std::vector<KnowledgeTriple> SyntheticKb::triples() const {
  std::vector<KnowledgeTriple> out;
  for (const auto& [edge, start, end] : conceptnet) out.push_back(make_triple(KnowledgeBase::kConceptNet, start, end, edge));
  for (const auto& [category, rows] : webchild) {
    for (const auto& [subject, object, sub] : rows) {
      out.push_back(make_triple(KnowledgeBase::kWebChild, strip_sense_tag(subject), strip_sense_tag(object),
                                category + "/" + sub));
    }
  }
  for (const auto& [head, rel, tail] : atomic) out.push_back(make_triple(KnowledgeBase::kAtomic, head, tail, rel));
  return out;
}

SyntheticSet generate_synthetic(const SyntheticSpec& spec) {
  Rng rng(spec.seed);
  const std::size_t total = spec.n_train + spec.n_dev;
  const auto pool = pseudo_words(std::max<std::size_t>(200, 6 * total), rng);
  auto word = [&]() -> const std::string& { return pick(pool, rng); };
  // Words of planted facts are never shared between prompts, so no planted
  // triple can fire on another prompt's passage by itself.
  std::vector<std::string> unused = pool;
  for (std::size_t i = unused.size(); i > 1; --i) std::swap(unused[i - 1], unused[rng.uniform_int(i)]);
  auto fresh = [&] {
    if (unused.empty()) throw DataError("synthetic generator ran out of pseudo-words");
    std::string w = std::move(unused.back());
    unused.pop_back();
    return w;
  };
  auto other_than = [&](std::initializer_list<std::string_view> taken) {
    while (true) {
      const auto& w = word();
      if (std::find(taken.begin(), taken.end(), w) == taken.end()) return w;
    }
  };

  SyntheticSet out;
  std::vector<KnowledgeTriple> planted;
  std::vector<Draft> planted_drafts;
  std::vector<Draft> plain_drafts;
  for (std::size_t i = 0; i < total; ++i) {
    const bool dev = i >= spec.n_train;
    const std::size_t local = dev ? i - spec.n_train : i;
    const auto& q = kQuestions[local % kQuestions.size()];
    const std::string split = dev ? "dev" : "train";
    const int gold = static_cast<int>(local % 2);

    Draft d;
    d.prompt.id = "planted-" + split + "-" + std::to_string(local);
    d.prompt.question = std::string(q.text);
    d.prompt.qtype = q.type;
    d.prompt.gold = gold;
    const std::string cue = fresh();
    d.key = fresh();
    PlantedFact fact{d.prompt.id, static_cast<KnowledgeBase>(rng.uniform_int(kNumKnowledgeBases)), cue, d.key, ""};
    switch (fact.kb) {
      case KnowledgeBase::kConceptNet:
        fact.edge = std::string(pick(kConceptNetEdges, rng));
        out.kb.conceptnet.push_back({fact.edge, cue, d.key});
        d.prompt.passage = passage_with(fill(pick(kCueTemplates, rng), cue), rng);
        break;
      case KnowledgeBase::kWebChild: {
        const std::string category(pick(kWebChildCategories, rng));
        const std::string sub(pick(kWebChildSubRelations, rng));
        fact.edge = category + "/" + sub;
        out.kb.webchild[category].push_back({cue + "#n#1", d.key + "#n#2", sub});
        d.prompt.passage = passage_with(fill(pick(kCueTemplates, rng), cue), rng);
        break;
      }
      case KnowledgeBase::kAtomic: {
        const std::string verb = fresh();
        const std::string noun = fresh();
        fact.start = "PersonX " + verb + " " + cue + " " + noun;
        fact.edge = std::string(pick(kAtomicRelations, rng));
        out.kb.atomic.push_back({fact.start, fact.edge, d.key});
        d.prompt.passage = passage_with(fill(kAtomicCueTemplate, verb + " " + cue + " " + noun), rng);
        break;
      }
    }
    d.fact = planted.size();
    planted.push_back(make_triple(fact.kb, fact.start, fact.end, fact.edge));
    out.facts.push_back(std::move(fact));
    planted_drafts.push_back(std::move(d));

    Draft p;
    p.prompt.id = "plain-" + split + "-" + std::to_string(local);
    p.prompt.question = std::string(q.text);
    p.prompt.qtype = q.type;
    p.prompt.gold = gold;
    p.key = word();
    p.prompt.passage = passage_with(fill(pick(kCueTemplates, rng), p.key), rng);
    plain_drafts.push_back(std::move(p));
  }

  // Distractors are resampled until no planted triple fires on their view.
  constexpr int kMaxDraws = 1000;
  for (auto& d : planted_drafts) {
    int draws = 0;
    while (true) {
      if (++draws > kMaxDraws) throw DataError("synthetic generator found no clean distractor for " + d.prompt.id);
      set_answers(d.prompt, d.key, other_than({d.key}));
      if (!any_fires(planted, view_stems(d.prompt, 1 - *d.prompt.gold))) break;
    }
  }
  for (auto& p : plain_drafts) {
    const auto passage_words = word_tokenize(p.prompt.passage);
    while (true) {
      const auto& distractor = other_than({p.key});
      if (std::find(passage_words.begin(), passage_words.end(), distractor) != passage_words.end()) continue;
      set_answers(p.prompt, p.key, distractor);
      break;
    }
  }

  std::vector<std::vector<std::string>> all_views;
  for (const auto& d : planted_drafts) {
    all_views.push_back(view_stems(d.prompt, 0));
    all_views.push_back(view_stems(d.prompt, 1));
  }
  for (std::size_t k = 0; k < spec.noise_triples; ++k) {
    const auto kb = static_cast<KnowledgeBase>(rng.uniform_int(kNumKnowledgeBases));
    const std::string a = word();
    const std::string b = other_than({a});
    KnowledgeTriple t;
    std::array<std::string, 3> row;
    std::string category;
    switch (kb) {
      case KnowledgeBase::kConceptNet:
        row = {std::string(pick(kConceptNetEdges, rng)), a, b};
        t = make_triple(kb, a, b, row[0]);
        break;
      case KnowledgeBase::kWebChild:
        category = std::string(pick(kWebChildCategories, rng));
        row = {a + "#n#1", b + "#n#1", std::string(pick(kWebChildSubRelations, rng))};
        t = make_triple(kb, a, b, category + "/" + row[2]);
        break;
      case KnowledgeBase::kAtomic:
        row = {"PersonX " + a + " " + b, std::string(pick(kAtomicRelations, rng)), other_than({a, b})};
        t = make_triple(kb, row[0], row[2], row[1]);
        break;
    }
    if (std::any_of(all_views.begin(), all_views.end(), [&](const auto& v) { return fires(t, v); })) continue;
    switch (kb) {
      case KnowledgeBase::kConceptNet: out.kb.conceptnet.push_back(row); break;
      case KnowledgeBase::kWebChild: out.kb.webchild[category].push_back(row); break;
      case KnowledgeBase::kAtomic: out.kb.atomic.push_back(row); break;
    }
  }

  const auto all_triples = out.kb.triples();
  for (const auto& d : planted_drafts) {
    const int gold = *d.prompt.gold;
    if (!fires(planted[d.fact], view_stems(d.prompt, gold))) {
      throw DataError("synthetic self-check: planted triple does not fire on " + d.prompt.id);
    }
    if (any_fires(all_triples, view_stems(d.prompt, 1 - gold))) {
      throw DataError("synthetic self-check: a triple fires on the distractor of " + d.prompt.id);
    }
  }

  for (std::size_t i = 0; i < total; ++i) {
    const bool dev = i >= spec.n_train;
    (dev ? out.planted_dev : out.planted_train).push_back(std::move(planted_drafts[i].prompt));
    (dev ? out.plain_dev : out.plain_train).push_back(std::move(plain_drafts[i].prompt));
  }
  return out;
}

void write_synthetic(const SyntheticSet& set, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir / "webchild");
  save_dataset(dir / "plain_train.json", set.plain_train);
  save_dataset(dir / "plain_dev.json", set.plain_dev);
  save_dataset(dir / "planted_train.json", set.planted_train);
  save_dataset(dir / "planted_dev.json", set.planted_dev);
  auto write_rows = [](const std::filesystem::path& path, const std::vector<std::array<std::string, 3>>& rows) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write " + path.string());
    for (const auto& r : rows) out << r[0] << '\t' << r[1] << '\t' << r[2] << '\n';
  };
  write_rows(dir / "conceptnet.tsv", set.kb.conceptnet);
  write_rows(dir / "atomic.tsv", set.kb.atomic);
  for (const auto& [category, rows] : set.kb.webchild) write_rows(dir / "webchild" / (category + ".tsv"), rows);
}

}  // namespace kgfuse
