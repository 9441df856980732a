#pragma once

#include <algorithm>
#include <functional>
#include <memory>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "sumbench/bundled_resources.hpp"
#include "sumbench/span.hpp"
#include "sumbench/unicode.hpp"

namespace sumbench {

enum class TokenKind { content, stopword, punctuation };

inline std::string_view to_string(TokenKind k) {
  switch (k) {
    case TokenKind::content: return "content";
    case TokenKind::stopword: return "stopword";
    case TokenKind::punctuation: return "punctuation";
  }
  return "content";
}

struct Token {
  std::string surface;
  std::string lemma;
  Span span;
  TokenKind kind = TokenKind::content;

  bool is_content() const { return kind == TokenKind::content; }
  friend bool operator==(const Token&, const Token&) = default;
};

struct Sentence {
  std::size_t index = 0;
  Span span;
  std::vector<Token> tokens;

  friend bool operator==(const Sentence&, const Sentence&) = default;
};

// Immutable analysis of a text. Spans index into `codepoints`.
class Document {
 public:
  Document() = default;
  Document(std::string id, std::string text, std::u32string codepoints,
           std::vector<Sentence> sentences)
      : id_(std::move(id)),
        text_(std::move(text)),
        codepoints_(std::move(codepoints)),
        sentences_(std::move(sentences)) {}

  const std::string& id() const { return id_; }
  const std::string& text() const { return text_; }
  const std::u32string& codepoints() const { return codepoints_; }
  std::size_t length() const { return codepoints_.size(); }
  const std::vector<Sentence>& sentences() const { return sentences_; }
  bool empty() const { return sentences_.empty(); }

  std::string slice(const Span& s) const {
    return unicode::encode(std::u32string_view(codepoints_).substr(s.start, s.length()));
  }

  std::size_t token_count() const {
    std::size_t n = 0;
    for (const auto& s : sentences_) n += s.tokens.size();
    return n;
  }

  friend bool operator==(const Document&, const Document&) = default;

 private:
  std::string id_;
  std::string text_;
  std::u32string codepoints_;
  std::vector<Sentence> sentences_;
};

// Lemmatizer contract: maps a lowercased word surface to its lemma. The
// result must be non-empty and whitespace-free.
using Lemmatizer = std::function<std::string(std::string_view lowered)>;

// Word lists shipped in data/. Parsed once from the generated header.
class LinguisticResources {
 public:
  LinguisticResources(std::string_view stopwords, std::string_view abbreviations,
                      std::string_view irregular_lemmas) {
    for (auto line : lines(stopwords)) stopwords_.emplace(line);
    for (auto line : lines(abbreviations)) abbreviations_.push_back(unicode::decode(line));
    // Longest first, so "u.s.a." wins over "u.s.".
    std::stable_sort(abbreviations_.begin(), abbreviations_.end(),
                     [](const auto& a, const auto& b) { return a.size() > b.size(); });
    for (auto line : lines(irregular_lemmas)) {
      auto sep = line.find_first_of(" \t");
      if (sep == std::string_view::npos) continue;
      auto form = line.substr(0, sep);
      auto rest = line.substr(sep);
      auto b = rest.find_first_not_of(" \t");
      if (b == std::string_view::npos) continue;
      irregular_.emplace(std::string(form), std::string(rest.substr(b)));
    }
  }

  static const LinguisticResources& bundled() {
    static const LinguisticResources instance(bundled::kStopwords, bundled::kAbbreviations,
                                              bundled::kIrregularLemmas);
    return instance;
  }

  bool is_stopword(std::string_view lemma) const {
    return stopwords_.find(std::string(lemma)) != stopwords_.end();
  }
  const std::vector<std::u32string>& abbreviations() const { return abbreviations_; }
  const std::unordered_map<std::string, std::string>& irregular() const { return irregular_; }
  std::size_t stopword_count() const { return stopwords_.size(); }

 private:
  static std::vector<std::string_view> lines(std::string_view data) {
    std::vector<std::string_view> out;
    while (!data.empty()) {
      auto nl = data.find('\n');
      auto line = data.substr(0, nl);
      while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.remove_suffix(1);
      while (!line.empty() && line.front() == ' ') line.remove_prefix(1);
      if (!line.empty() && line.front() != '#') out.push_back(line);
      if (nl == std::string_view::npos) break;
      data.remove_prefix(nl + 1);
    }
    return out;
  }

  std::unordered_set<std::string> stopwords_;
  std::vector<std::u32string> abbreviations_;
  std::unordered_map<std::string, std::string> irregular_;
};

namespace detail {

inline bool is_vowel(char c) {
  return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u';
}

inline bool is_consonant_at(std::string_view w, std::size_t i) {
  char c = w[i];
  if (is_vowel(c)) return false;
  if (c == 'y') return i == 0 || !is_consonant_at(w, i - 1);
  return true;
}

inline bool has_vowel(std::string_view w) {
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (!is_consonant_at(w, i)) return true;
  }
  return false;
}

// Restores the stem of an -ed / -ing form.
inline std::string repair_stem(std::string stem) {
  const auto n = stem.size();
  if (n >= 2 && (stem.ends_with("at") || stem.ends_with("bl") || stem.ends_with("iz"))) {
    return stem + "e";
  }
  if (n >= 2 && stem[n - 1] == stem[n - 2] && is_consonant_at(stem, n - 1) &&
      stem[n - 1] != 'l' && stem[n - 1] != 's' && stem[n - 1] != 'z' && stem[n - 1] != 'f') {
    stem.pop_back();
    return stem;
  }
  if (n >= 2 && (stem.back() == 'v' || (stem.back() == 'c' && !stem.ends_with("ic")))) {
    return stem + "e";
  }
  // Short consonant-vowel-consonant stems: hop(ed) -> hope.
  if (n == 3 && is_consonant_at(stem, 0) && !is_consonant_at(stem, 1) && is_consonant_at(stem, 2) &&
      stem[2] != 'w' && stem[2] != 'x' && stem[2] != 'y') {
    return stem + "e";
  }
  return stem;
}

}  // namespace detail

// Bundled English lemmatizer: exception table first, then inflectional
// suffix rules. Only ASCII-letter words are subject to suffix rules.
class RuleLemmatizer {
 public:
  explicit RuleLemmatizer(const LinguisticResources& res = LinguisticResources::bundled())
      : res_(&res) {}

  std::string operator()(std::string_view lowered) const {
    std::string w(lowered);
    if (auto it = res_->irregular().find(w); it != res_->irregular().end()) return it->second;
    if (w.size() > 2 && (w.ends_with("'s"))) {
      w.resize(w.size() - 2);
      if (auto it = res_->irregular().find(w); it != res_->irregular().end()) return it->second;
      return w;
    }
    for (char c : w) {
      if (c < 'a' || c > 'z') return w;
    }
    if (w.size() <= 3) return w;

    if (w.ends_with("ies") && w.size() > 4) return w.substr(0, w.size() - 3) + "y";
    if (w.ends_with("ied") && w.size() > 4) return w.substr(0, w.size() - 3) + "y";
    if (w.ends_with("sses")) return w.substr(0, w.size() - 2);
    if (w.ends_with("shes") || w.ends_with("ches") || w.ends_with("xes") ||
        w.ends_with("zzes")) {
      return w.substr(0, w.size() - 2);
    }
    if (w.back() == 's') {
      if (w.ends_with("ss") || w.ends_with("us") || w.ends_with("is")) return w;
      return w.substr(0, w.size() - 1);
    }
    if (w.ends_with("eed")) {
      return detail::has_vowel(std::string_view(w).substr(0, w.size() - 3)) ? w.substr(0, w.size() - 1) : w;
    }
    if (w.ends_with("ed") && w.size() >= 5) {
      auto stem = w.substr(0, w.size() - 2);
      if (detail::has_vowel(stem)) return detail::repair_stem(std::move(stem));
      return w;
    }
    if (w.ends_with("ing") && w.size() >= 6) {
      auto stem = w.substr(0, w.size() - 3);
      if (detail::has_vowel(stem)) return detail::repair_stem(std::move(stem));
      return w;
    }
    return w;
  }

 private:
  const LinguisticResources* res_;
};

struct LemmaEntry {
  std::string_view lemma;
  TokenKind kind;
  std::size_t token_index;

  friend bool operator==(const LemmaEntry&, const LemmaEntry&) = default;
};

// Full lemma sequence of a sentence: every token, stopwords and punctuation
// included, in document order.
inline std::vector<LemmaEntry> lemma_sequence(const Sentence& sentence) {
  std::vector<LemmaEntry> out;
  out.reserve(sentence.tokens.size());
  for (std::size_t i = 0; i < sentence.tokens.size(); ++i) {
    const auto& t = sentence.tokens[i];
    out.push_back({t.lemma, t.kind, i});
  }
  return out;
}

class TextAnalyzer {
 public:
  explicit TextAnalyzer(const LinguisticResources& res = LinguisticResources::bundled())
      : res_(&res), lemmatize_(RuleLemmatizer(res)) {}

  TextAnalyzer(const LinguisticResources& res, Lemmatizer lemmatizer)
      : res_(&res), lemmatize_(std::move(lemmatizer)) {}

  Document analyze(std::string_view text, std::string id) const {
    std::u32string cps = unicode::decode(text);
    std::vector<Token> tokens = tokenize(cps);
    std::vector<Sentence> sentences = segment(cps, std::move(tokens));
    // Re-encode so text() and codepoints() agree even for malformed input.
    std::string utf8 = unicode::encode(cps);
    return Document(std::move(id), std::move(utf8), std::move(cps), std::move(sentences));
  }

  const LinguisticResources& resources() const { return *res_; }

 private:
  std::size_t match_abbreviation(const std::u32string& cps, std::size_t pos) const {
    for (const auto& abbr : res_->abbreviations()) {
      if (pos + abbr.size() > cps.size()) continue;
      bool ok = true;
      for (std::size_t k = 0; k < abbr.size(); ++k) {
        if (unicode::to_lower(cps[pos + k]) != abbr[k]) {
          ok = false;
          break;
        }
      }
      if (!ok) continue;
      std::size_t after = pos + abbr.size();
      if (after < cps.size() && unicode::is_word(cps[after])) continue;
      return abbr.size();
    }
    return 0;
  }

  std::size_t scan_word(const std::u32string& cps, std::size_t pos) const {
    using namespace unicode;
    std::size_t i = pos;
    const std::size_t n = cps.size();
    while (i < n) {
      char32_t c = cps[i];
      if (is_word(c)) {
        ++i;
        continue;
      }
      if (i + 1 < n && i > pos) {
        char32_t next = cps[i + 1];
        char32_t prev = cps[i - 1];
        bool joiner = (c == U'\'' || c == 0x2019 || c == U'-') && is_word(next);
        bool numeric = (c == U'.' || c == U',') && is_digit(prev) && is_digit(next);
        if (joiner || numeric) {
          i += 2;
          continue;
        }
      }
      break;
    }
    return i - pos;
  }

  std::vector<Token> tokenize(const std::u32string& cps) const {
    std::vector<Token> out;
    std::size_t i = 0;
    const std::size_t n = cps.size();
    while (i < n) {
      char32_t c = cps[i];
      if (unicode::is_space(c) || c < 0x20) {
        ++i;
        continue;
      }
      std::size_t len = 0;
      bool punct = false;
      if (unicode::is_word(c)) {
        len = match_abbreviation(cps, i);
        if (len == 0) len = scan_word(cps, i);
      } else {
        len = 1;
        punct = true;
      }
      Token t;
      t.span = {i, i + len};
      std::u32string_view view(cps.data() + i, len);
      t.surface = unicode::encode(view);
      if (punct) {
        t.lemma = t.surface;
        t.kind = TokenKind::punctuation;
      } else {
        t.lemma = lemmatize_(unicode::encode(unicode::to_lower(view)));
        if (t.lemma.empty()) t.lemma = unicode::to_lower_utf8(t.surface);
        t.kind = res_->is_stopword(t.lemma) ? TokenKind::stopword : TokenKind::content;
      }
      out.push_back(std::move(t));
      i += len;
    }
    return out;
  }

  static bool is_terminator(const Token& t) {
    return t.kind == TokenKind::punctuation &&
           (t.surface == "." || t.surface == "!" || t.surface == "?");
  }

  // Sentence boundaries fall after . ! ? (plus any directly attached closing
  // quotes or brackets) when followed by whitespace and an uppercase letter or
  // opening quote, and at blank lines.
  static std::vector<Sentence> segment(const std::u32string& cps, std::vector<Token> tokens) {
    std::vector<Sentence> out;
    if (tokens.empty()) return out;
    auto gap_has_blank_line = [&](std::size_t from, std::size_t to) {
      int newlines = 0;
      for (std::size_t k = from; k < to; ++k) {
        if (cps[k] == U'\n') ++newlines;
      }
      return newlines >= 2;
    };

    std::vector<Token> current;
    auto flush = [&]() {
      if (current.empty()) return;
      Sentence s;
      s.index = out.size();
      s.span = {current.front().span.start, current.back().span.end};
      s.tokens = std::move(current);
      current.clear();
      out.push_back(std::move(s));
    };

    for (std::size_t i = 0; i < tokens.size(); ++i) {
      current.push_back(std::move(tokens[i]));
      if (i + 1 == tokens.size()) break;
      const Token& last = current.back();
      const Token& next = tokens[i + 1];
      bool has_gap = next.span.start > last.span.end;
      if (has_gap && gap_has_blank_line(last.span.end, next.span.start)) {
        flush();
        continue;
      }
      // Find the terminator, looking back over attached closing punctuation.
      bool terminated = false;
      for (std::size_t k = current.size(); k-- > 0;) {
        const Token& t = current[k];
        if (is_terminator(t)) {
          terminated = true;
          break;
        }
        bool closing = t.kind == TokenKind::punctuation &&
                       unicode::is_closing_punct(cps[t.span.start]);
        bool attached = k > 0 && current[k - 1].span.end == t.span.start;
        if (!closing || !attached) break;
      }
      if (!terminated || !has_gap) continue;
      char32_t first = cps[next.span.start];
      if (unicode::is_upper(first) || unicode::is_opening_quote(first)) flush();
    }
    flush();
    return out;
  }

  const LinguisticResources* res_;
  Lemmatizer lemmatize_;
};

inline const TextAnalyzer& default_analyzer() {
  static const TextAnalyzer instance;
  return instance;
}

inline Document analyze(std::string_view text, std::string id = {}) {
  return default_analyzer().analyze(text, std::move(id));
}

}  // namespace sumbench
