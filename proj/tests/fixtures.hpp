#pragma once

#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "sumbench.hpp"

#ifndef SUMBENCH_TEST_DATA_DIR
#error "SUMBENCH_TEST_DATA_DIR must be defined"
#endif

namespace fixtures {

inline std::string data_path(const std::string& name) {
  return std::string(SUMBENCH_TEST_DATA_DIR) + "/" + name;
}

inline std::string read_file(const std::string& name) {
  std::ifstream in(data_path(name), std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline const sumbench::Document& news_article() {
  static const sumbench::Document doc = sumbench::analyze(read_file("news_article.txt"), "news");
  return doc;
}

// Two-sentence summary against a three-sentence source with three
// highlights, shaped after the worked alignment example: a reordered
// "John eat today" / "Mr. Smith" pair, an unhighlighted "Mr. Smith" sentence
// and a one-content-word "He called me".
struct WorkedScenario {
  sumbench::Document source;
  sumbench::Document summary;
  sumbench::HighlightSet highlights;
};

inline WorkedScenario worked_scenario() {
  WorkedScenario s;
  s.source = sumbench::analyze(read_file("worked_source.txt"), "worked-source");
  s.summary = sumbench::analyze(read_file("worked_summary.txt"), "worked-summary");
  s.highlights.document_id = s.source.id();
  for (auto span : std::vector<sumbench::Span>{{0, 24}, {30, 45}, {74, 86}}) {
    s.highlights = sumbench::add_user_span(s.highlights, span, s.source);
  }
  return s;
}

// Random normalized highlight set: `count` random spans added in sequence.
inline sumbench::HighlightSet random_highlights(const sumbench::Document& doc, std::mt19937& rng,
                                                int count, std::size_t max_len = 60) {
  sumbench::HighlightSet set;
  set.document_id = doc.id();
  const std::size_t n = doc.length();
  std::uniform_int_distribution<std::size_t> start_dist(0, n - 1);
  std::uniform_int_distribution<std::size_t> len_dist(1, max_len);
  for (int i = 0; i < count; ++i) {
    std::size_t start = start_dist(rng);
    std::size_t end = std::min(n, start + len_dist(rng));
    set = sumbench::add_user_span(set, {start, end}, doc);
  }
  return set;
}

inline std::set<std::string> content_types_in(const sumbench::Document& doc) {
  std::set<std::string> out;
  for (const auto& s : doc.sentences())
    for (const auto& t : s.tokens)
      if (t.is_content()) out.insert(t.lemma);
  return out;
}

// Content-lemma types of tokens touched by any active highlight.
inline std::set<std::string> highlighted_content_types(const sumbench::Document& doc,
                                                       const sumbench::HighlightSet& set) {
  std::set<std::string> out;
  for (const auto& s : doc.sentences())
    for (const auto& t : s.tokens)
      if (t.is_content() && sumbench::overlaps_active(set, t.span)) out.insert(t.lemma);
  return out;
}

}  // namespace fixtures
