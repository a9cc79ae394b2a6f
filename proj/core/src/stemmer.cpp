#include "kgfuse/stemmer.hpp"

#include "kgfuse/error.hpp"
#include "kgfuse/text.hpp"

namespace kgfuse {

namespace {

// Working buffer for one word. `end_` marks the end of the current word and
// `stem_end_` the end of the stem once a suffix has matched.
class PorterWord {
 public:
  explicit PorterWord(std::string_view w) : b_(w) {}

  std::string run() {
    if (b_.size() <= 2) return b_;
    step1ab();
    step1c();
    step2();
    step3();
    step4();
    step5();
    return b_;
  }

 private:
  bool cons(std::size_t i) const {
    switch (b_[i]) {
      case 'a': case 'e': case 'i': case 'o': case 'u': return false;
      case 'y': return i == 0 ? true : !cons(i - 1);
      default: return true;
    }
  }

  // Number of VC sequences in b_[0, stem_end_).
  int measure() const {
    int n = 0;
    std::size_t i = 0;
    const std::size_t j = stem_end_;
    while (true) {
      if (i >= j) return n;
      if (!cons(i)) break;
      ++i;
    }
    ++i;
    while (true) {
      while (true) {
        if (i >= j) return n;
        if (cons(i)) break;
        ++i;
      }
      ++i;
      ++n;
      while (true) {
        if (i >= j) return n;
        if (!cons(i)) break;
        ++i;
      }
      ++i;
    }
  }

  bool vowel_in_stem() const {
    for (std::size_t i = 0; i < stem_end_; ++i) {
      if (!cons(i)) return true;
    }
    return false;
  }

  // Double consonant ending at index j.
  bool double_cons(std::size_t j) const {
    if (j < 1) return false;
    if (b_[j] != b_[j - 1]) return false;
    return cons(j);
  }

  // consonant-vowel-consonant ending at i, last consonant not w, x or y.
  bool cvc(std::size_t i) const {
    if (i < 2 || !cons(i) || cons(i - 1) || !cons(i - 2)) return false;
    const char c = b_[i];
    return c != 'w' && c != 'x' && c != 'y';
  }

  bool ends(std::string_view suffix) {
    if (suffix.size() > b_.size()) return false;
    if (b_.compare(b_.size() - suffix.size(), suffix.size(), suffix) != 0) return false;
    stem_end_ = b_.size() - suffix.size();
    return true;
  }

  void set_to(std::string_view replacement) {
    b_.resize(stem_end_);
    b_.append(replacement);
  }

  void replace_if_measure(std::string_view replacement) {
    if (measure() > 0) set_to(replacement);
  }

  void step1ab() {
    if (b_.back() == 's') {
      if (ends("sses")) {
        set_to("ss");
      } else if (ends("ies")) {
        set_to("i");
      } else if (!ends("ss")) {
        b_.pop_back();
      }
    }
    if (ends("eed")) {
      if (measure() > 0) b_.pop_back();
    } else if ((ends("ed") || ends("ing")) && vowel_in_stem()) {
      b_.resize(stem_end_);
      if (ends("at")) {
        set_to("ate");
      } else if (ends("bl")) {
        set_to("ble");
      } else if (ends("iz")) {
        set_to("ize");
      } else if (double_cons(b_.size() - 1)) {
        const char c = b_.back();
        if (c != 'l' && c != 's' && c != 'z') b_.pop_back();
      } else {
        stem_end_ = b_.size();
        if (measure() == 1 && cvc(b_.size() - 1)) b_.push_back('e');
      }
    }
  }

  void step1c() {
    if (ends("y") && vowel_in_stem()) b_.back() = 'i';
  }

  // Longest matching suffix wins; its condition is the only one tested.
  void step2() {
    static constexpr std::pair<std::string_view, std::string_view> kRules[] = {
        {"ational", "ate"}, {"tional", "tion"}, {"enci", "ence"},   {"anci", "ance"},
        {"izer", "ize"},    {"abli", "able"},   {"alli", "al"},     {"entli", "ent"},
        {"eli", "e"},       {"ousli", "ous"},   {"ization", "ize"}, {"ation", "ate"},
        {"ator", "ate"},    {"alism", "al"},    {"iveness", "ive"}, {"fulness", "ful"},
        {"ousness", "ous"}, {"aliti", "al"},    {"iviti", "ive"},   {"biliti", "ble"},
    };
    apply_longest(kRules);
  }

  void step3() {
    static constexpr std::pair<std::string_view, std::string_view> kRules[] = {
        {"icate", "ic"}, {"ative", ""}, {"alize", "al"}, {"iciti", "ic"},
        {"ical", "ic"},  {"ful", ""},   {"ness", ""},
    };
    apply_longest(kRules);
  }

  void step4() {
    static constexpr std::string_view kSuffixes[] = {
        "al",   "ance", "ence", "er",  "ic",  "able", "ible", "ant", "ement", "ment",
        "ent",  "ion",  "ou",   "ism", "ate", "iti",  "ous",  "ive", "ize",
    };
    std::string_view best;
    for (auto s : kSuffixes) {
      if (s.size() > best.size() && b_.size() >= s.size() &&
          b_.compare(b_.size() - s.size(), s.size(), s) == 0) {
        best = s;
      }
    }
    if (best.empty()) return;
    ends(best);
    if (best == "ion") {
      // (*S or *T)ION
      if (stem_end_ == 0 || (b_[stem_end_ - 1] != 's' && b_[stem_end_ - 1] != 't')) return;
    }
    if (measure() > 1) b_.resize(stem_end_);
  }

  void step5() {
    stem_end_ = b_.size();
    if (b_.back() == 'e') {
      stem_end_ = b_.size() - 1;
      const int m = measure();
      if (m > 1 || (m == 1 && !cvc(b_.size() - 2))) b_.pop_back();
    }
    stem_end_ = b_.size();
    if (b_.back() == 'l' && double_cons(b_.size() - 1) && measure() > 1) b_.pop_back();
  }

  template <std::size_t N>
  void apply_longest(const std::pair<std::string_view, std::string_view> (&rules)[N]) {
    const std::pair<std::string_view, std::string_view>* best = nullptr;
    for (const auto& r : rules) {
      if (b_.size() >= r.first.size() &&
          b_.compare(b_.size() - r.first.size(), r.first.size(), r.first) == 0 &&
          (best == nullptr || r.first.size() > best->first.size())) {
        best = &r;
      }
    }
    if (best == nullptr) return;
    ends(best->first);
    replace_if_measure(best->second);
  }

  std::string b_;
  std::size_t stem_end_ = 0;
};

}  // namespace

std::string stem(std::string_view word) {
  for (char c : word) {
    if (c < 'a' || c > 'z') {
      throw DataError("stem: non-lowercase-alphabetic input '" + std::string(word) + "'");
    }
  }
  if (word.empty()) throw DataError("stem: empty word");
  return PorterWord(word).run();
}

std::vector<std::string> stem_tokens(std::span<const std::string> tokens) {
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    try {
      out.push_back(stem(tokens[i]));
    } catch (const DataError& e) {
      throw DataError("token " + std::to_string(i) + ": " + e.what());
    }
  }
  return out;
}

std::string stem_key(std::string_view token) {
  if (is_alpha_word(token)) {
    bool lower = true;
    for (char c : token) lower = lower && c >= 'a' && c <= 'z';
    if (lower) return stem(token);
  }
  return std::string(token);
}

}  // namespace kgfuse
