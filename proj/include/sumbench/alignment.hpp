#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "sumbench/consolidation.hpp"
#include "sumbench/error.hpp"
#include "sumbench/highlighting.hpp"
#include "sumbench/text_pipeline.hpp"

namespace sumbench {

struct LcsMatch {
  std::vector<std::size_t> summary_token_indices;
  std::vector<std::size_t> source_token_indices;
  std::vector<std::string> lemmas;

  std::size_t size() const { return lemmas.size(); }
  bool empty() const { return lemmas.empty(); }

  friend bool operator==(const LcsMatch&, const LcsMatch&) = default;
};

enum class RetainedBy { content_count, highlight_coverage };

inline std::string_view to_string(RetainedBy r) {
  return r == RetainedBy::content_count ? "content_count" : "highlight_coverage";
}

struct AlignmentConfig {
  std::size_t min_content_tokens = 3;
  double coverage_threshold = 0.25;
  std::size_t max_iterations = 4;

  void validate() const {
    if (min_content_tokens == 0 || max_iterations == 0) {
      throw Error(ErrorCode::validation, "alignment constants must be positive");
    }
    if (!(coverage_threshold > 0.0 && coverage_threshold <= 1.0)) {
      throw Error(ErrorCode::validation, "coverage threshold must lie in (0, 1]");
    }
  }
};

struct AlignmentLink {
  std::size_t summary_sentence_index = 0;
  std::size_t source_sentence_index = 0;
  LcsMatch match;
  std::size_t iteration = 1;
  RetainedBy retained_by = RetainedBy::content_count;

  friend bool operator==(const AlignmentLink&, const AlignmentLink&) = default;
};

// One LCS round and what the filter made of it; rejected rounds included.
struct AlignmentDecision {
  std::size_t summary_sentence_index = 0;
  std::size_t source_sentence_index = 0;
  LcsMatch match;
  std::size_t iteration = 1;
  std::size_t content_tokens = 0;
  double best_coverage = 0.0;
  std::optional<RetainedBy> retained_by;
};

struct SummarySentenceAlignment {
  std::size_t index = 0;
  Span span;
  std::vector<AlignmentLink> links;
  std::vector<Span> source_spans;  // union of linked source token spans

  friend bool operator==(const SummarySentenceAlignment&, const SummarySentenceAlignment&) = default;
};

struct AlignmentMap {
  std::vector<SummarySentenceAlignment> summary_sentences;

  std::size_t link_count() const {
    std::size_t n = 0;
    for (const auto& s : summary_sentences) n += s.links.size();
    return n;
  }

  friend bool operator==(const AlignmentMap&, const AlignmentMap&) = default;
};

// Longest common subsequence over lemma sequences. Among maximal matches the
// pair sequence (source index, summary index) is lexicographically smallest:
// earliest source positions first, then earliest summary positions.
template <typename Summary, typename Source, typename Equal>
LcsMatch lcs_indices(const Summary& summary, const Source& source, Equal&& equal) {
  const std::size_t n = summary.size();
  const std::size_t m = source.size();
  LcsMatch out;
  if (n == 0 || m == 0) return out;

  // suffix[i][j] = LCS length of summary[i..] and source[j..]
  std::vector<std::uint32_t> suffix((n + 1) * (m + 1), 0);
  auto at = [&](std::size_t i, std::size_t j) -> std::uint32_t& { return suffix[i * (m + 1) + j]; };
  for (std::size_t i = n; i-- > 0;) {
    for (std::size_t j = m; j-- > 0;) {
      if (equal(summary[i], source[j])) {
        at(i, j) = static_cast<std::uint32_t>(at(i + 1, j + 1) + 1);
      } else {
        at(i, j) = std::max(at(i + 1, j), at(i, j + 1));
      }
    }
  }

  std::size_t i = 0;
  std::size_t j = 0;
  std::size_t remaining = at(0, 0);
  while (remaining > 0) {
    bool found = false;
    for (std::size_t jj = j; jj < m && !found; ++jj) {
      if (at(i, jj) < remaining) break;
      for (std::size_t ii = i; ii < n; ++ii) {
        if (at(ii, jj) < remaining) break;
        if (equal(summary[ii], source[jj]) && at(ii + 1, jj + 1) + 1u == remaining) {
          out.summary_token_indices.push_back(ii);
          out.source_token_indices.push_back(jj);
          i = ii + 1;
          j = jj + 1;
          --remaining;
          found = true;
          break;
        }
      }
    }
  }
  return out;
}

inline LcsMatch lcs(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  LcsMatch out = lcs_indices(a, b, [](const std::string& x, const std::string& y) { return x == y; });
  for (std::size_t k : out.summary_token_indices) out.lemmas.push_back(a[k]);
  return out;
}

inline LcsMatch lcs(const std::vector<LemmaEntry>& a, const std::vector<LemmaEntry>& b) {
  LcsMatch out = lcs_indices(a, b, [](const LemmaEntry& x, const LemmaEntry& y) { return x.lemma == y.lemma; });
  for (auto& k : out.summary_token_indices) {
    out.lemmas.emplace_back(a[k].lemma);
    k = a[k].token_index;
  }
  for (auto& k : out.source_token_indices) k = b[k].token_index;
  return out;
}

// Per-highlight content-lemma types, computed once per alignment run.
struct HighlightProfile {
  Span span;
  std::set<std::string> content_types;
};

inline std::vector<HighlightProfile> profile_highlights(const Document& doc, const HighlightSet& set) {
  std::vector<HighlightProfile> out;
  for (const auto& h : set.active) {
    HighlightProfile p{h.span, {}};
    for (const auto& s : doc.sentences()) {
      if (!s.span.overlaps(h.span)) continue;
      for (const auto& t : s.tokens) {
        if (t.is_content() && t.span.overlaps(h.span)) p.content_types.insert(t.lemma);
      }
    }
    out.push_back(std::move(p));
  }
  return out;
}

struct FilterOutcome {
  std::optional<RetainedBy> retained_by;
  std::size_t content_tokens = 0;
  double best_coverage = 0.0;
};

// Keeps a match with enough content tokens; otherwise keeps it when its
// source tokens inside some highlight cover enough of that highlight's
// content-lemma types.
inline FilterOutcome filter_decision(const LcsMatch& match, const Sentence& source_sentence,
                                     const std::vector<HighlightProfile>& highlights,
                                     const AlignmentConfig& cfg) {
  FilterOutcome out;
  for (std::size_t k : match.source_token_indices) {
    if (source_sentence.tokens[k].is_content()) ++out.content_tokens;
  }
  if (out.content_tokens >= cfg.min_content_tokens) {
    out.retained_by = RetainedBy::content_count;
    return out;
  }
  for (const auto& h : highlights) {
    if (h.content_types.empty() || !h.span.overlaps(source_sentence.span)) continue;
    std::set<std::string_view> covered;
    bool touches = false;
    for (std::size_t k : match.source_token_indices) {
      const Token& t = source_sentence.tokens[k];
      if (!t.span.overlaps(h.span)) continue;
      touches = true;
      if (t.is_content() && h.content_types.count(t.lemma)) covered.insert(t.lemma);
    }
    if (!touches) continue;
    double coverage = static_cast<double>(covered.size()) / static_cast<double>(h.content_types.size());
    out.best_coverage = std::max(out.best_coverage, coverage);
  }
  if (out.best_coverage >= cfg.coverage_threshold) out.retained_by = RetainedBy::highlight_coverage;
  return out;
}

inline FilterOutcome filter_decision(const LcsMatch& match, const Sentence& source_sentence,
                                     const Document& source, const HighlightSet& highlights,
                                     const AlignmentConfig& cfg) {
  return filter_decision(match, source_sentence, profile_highlights(source, highlights), cfg);
}

// Up to max_iterations LCS rounds between the shrinking summary residual and
// the full source sentence. Every round's summary tokens leave the residual,
// retained or not.
inline std::vector<AlignmentDecision> align_pair_decisions(
    const Sentence& summary_sentence, const Sentence& source_sentence,
    const std::vector<HighlightProfile>& highlights, const AlignmentConfig& cfg) {
  std::vector<AlignmentDecision> out;
  std::vector<LemmaEntry> residual = lemma_sequence(summary_sentence);
  const std::vector<LemmaEntry> source = lemma_sequence(source_sentence);
  for (std::size_t round = 1; round <= cfg.max_iterations && !residual.empty(); ++round) {
    LcsMatch match = lcs(residual, source);
    if (match.empty()) break;
    FilterOutcome f = filter_decision(match, source_sentence, highlights, cfg);
    std::erase_if(residual, [&](const LemmaEntry& e) {
      return std::binary_search(match.summary_token_indices.begin(),
                                match.summary_token_indices.end(), e.token_index);
    });
    out.push_back({summary_sentence.index, source_sentence.index, std::move(match), round,
                   f.content_tokens, f.best_coverage, f.retained_by});
  }
  return out;
}

inline std::vector<AlignmentLink> align_pair(const Sentence& summary_sentence,
                                             const Sentence& source_sentence,
                                             const std::vector<HighlightProfile>& highlights,
                                             const AlignmentConfig& cfg) {
  std::vector<AlignmentLink> links;
  for (auto& d : align_pair_decisions(summary_sentence, source_sentence, highlights, cfg)) {
    if (!d.retained_by) continue;
    links.push_back({d.summary_sentence_index, d.source_sentence_index, std::move(d.match),
                     d.iteration, *d.retained_by});
  }
  return links;
}

inline std::vector<AlignmentLink> align_pair(const Sentence& summary_sentence,
                                             const Sentence& source_sentence,
                                             const Document& source, const HighlightSet& highlights,
                                             const AlignmentConfig& cfg) {
  return align_pair(summary_sentence, source_sentence, profile_highlights(source, highlights), cfg);
}

namespace detail {

inline std::vector<Span> merge_spans(std::vector<Span> spans) {
  std::sort(spans.begin(), spans.end());
  std::vector<Span> out;
  for (const auto& s : spans) {
    if (!out.empty() && out.back().end >= s.start) {
      out.back().end = std::max(out.back().end, s.end);
    } else {
      out.push_back(s);
    }
  }
  return out;
}

}  // namespace detail

// Every decision over the full sentence cross-product, in
// (summary sentence, source sentence, iteration) order.
inline std::vector<AlignmentDecision> align_decisions(const Document& source,
                                                      const HighlightSet& highlights,
                                                      const Document& summary,
                                                      const AlignmentConfig& cfg = {}) {
  cfg.validate();
  auto profiles = profile_highlights(source, highlights);
  std::vector<AlignmentDecision> out;
  for (const auto& ss : summary.sentences()) {
    for (const auto& src : source.sentences()) {
      auto ds = align_pair_decisions(ss, src, profiles, cfg);
      out.insert(out.end(), std::make_move_iterator(ds.begin()), std::make_move_iterator(ds.end()));
    }
  }
  return out;
}

inline AlignmentMap align(const Document& source, const HighlightSet& highlights,
                          const Document& summary, const AlignmentConfig& cfg = {}) {
  cfg.validate();
  auto profiles = profile_highlights(source, highlights);
  AlignmentMap map;
  for (const auto& ss : summary.sentences()) {
    SummarySentenceAlignment entry{ss.index, ss.span, {}, {}};
    std::vector<Span> spans;
    for (const auto& src : source.sentences()) {
      for (auto& link : align_pair(ss, src, profiles, cfg)) {
        for (std::size_t k : link.match.source_token_indices) spans.push_back(src.tokens[k].span);
        entry.links.push_back(std::move(link));
      }
    }
    entry.source_spans = detail::merge_spans(std::move(spans));
    map.summary_sentences.push_back(std::move(entry));
  }
  return map;
}

inline AlignmentMap align(const Document& source, const HighlightSet& highlights,
                          const SummaryDraft& summary, const AlignmentConfig& cfg = {}) {
  return align(source, highlights, summary.analysis, cfg);
}

// Fraction of highlighted content-lemma types that some retained link
// matches on the source side, inside a highlight.
inline double highlight_coverage_metric(const AlignmentMap& map, const Document& source,
                                        const HighlightSet& highlights) {
  std::set<std::string> highlighted;
  for (const auto& p : profile_highlights(source, highlights)) {
    highlighted.insert(p.content_types.begin(), p.content_types.end());
  }
  if (highlighted.empty()) return 0.0;
  std::set<std::string> matched;
  for (const auto& entry : map.summary_sentences) {
    for (const auto& link : entry.links) {
      const Sentence& src = source.sentences().at(link.source_sentence_index);
      for (std::size_t k : link.match.source_token_indices) {
        const Token& t = src.tokens[k];
        if (!t.is_content() || !highlighted.count(t.lemma)) continue;
        if (overlaps_active(highlights, t.span)) matched.insert(t.lemma);
      }
    }
  }
  return static_cast<double>(matched.size()) / static_cast<double>(highlighted.size());
}

}  // namespace sumbench
