#pragma once

#include <algorithm>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sumbench/error.hpp"
#include "sumbench/span.hpp"
#include "sumbench/text_pipeline.hpp"
#include "sumbench/unicode.hpp"

namespace sumbench {

enum class HighlightOrigin { user, accepted_suggestion };

inline std::string_view to_string(HighlightOrigin o) {
  return o == HighlightOrigin::user ? "user" : "accepted_suggestion";
}

struct Highlight {
  Span span;
  HighlightOrigin origin = HighlightOrigin::user;

  friend bool operator==(const Highlight&, const Highlight&) = default;
};

struct PendingSuggestion {
  std::string id;
  Span span;
  double score = 0.0;

  friend bool operator==(const PendingSuggestion&, const PendingSuggestion&) = default;
};

// Value type; every operation below returns a new, normalized set.
//
// Normal form: active spans sorted, pairwise disjoint and non-touching; a
// merged highlight is `user` if any constituent was. No pending suggestion
// overlaps an active span.
struct HighlightSet {
  std::string document_id;
  std::vector<Highlight> active;
  std::vector<PendingSuggestion> pending;

  std::vector<Span> active_spans() const {
    std::vector<Span> out;
    out.reserve(active.size());
    for (const auto& h : active) out.push_back(h.span);
    return out;
  }

  bool has_active() const { return !active.empty(); }

  friend bool operator==(const HighlightSet&, const HighlightSet&) = default;
};

inline std::vector<Highlight> merge_highlights(std::vector<Highlight> items) {
  std::stable_sort(items.begin(), items.end(),
                   [](const Highlight& a, const Highlight& b) { return a.span.start < b.span.start; });
  std::vector<Highlight> out;
  for (auto& h : items) {
    if (h.span.empty()) continue;
    if (!out.empty() && out.back().span.touches(h.span)) {
      auto& last = out.back();
      last.span.end = std::max(last.span.end, h.span.end);
      if (h.origin == HighlightOrigin::user) last.origin = HighlightOrigin::user;
    } else {
      out.push_back(h);
    }
  }
  return out;
}

inline bool overlaps_active(const HighlightSet& set, const Span& span) {
  auto it = std::lower_bound(set.active.begin(), set.active.end(), span.start,
                             [](const Highlight& h, std::size_t pos) { return h.span.end <= pos; });
  return it != set.active.end() && it->span.start < span.end;
}

inline HighlightSet normalize(HighlightSet set) {
  set.active = merge_highlights(std::move(set.active));
  std::erase_if(set.pending, [&](const PendingSuggestion& p) { return overlaps_active(set, p.span); });
  return set;
}

inline bool is_normalized(const HighlightSet& set) {
  for (std::size_t i = 0; i < set.active.size(); ++i) {
    if (set.active[i].span.empty()) return false;
    if (i > 0 && set.active[i - 1].span.end >= set.active[i].span.start) return false;
  }
  for (const auto& p : set.pending) {
    if (overlaps_active(set, p.span)) return false;
  }
  return true;
}

// Pending suggestions the new span touches are absorbed: a user highlight
// over part of a suggested sentence is a selection decision about it.
inline HighlightSet add_user_span(HighlightSet set, const Span& span, const Document& doc) {
  validate_span(span, doc.length());
  set.active.push_back({span, HighlightOrigin::user});
  return normalize(std::move(set));
}

// Removes a character range from active coverage. Without a document there
// is no length to check against, so only emptiness is validated.
inline HighlightSet erase_span(HighlightSet set, const Span& span) {
  if (span.empty()) throw Error(ErrorCode::validation, "empty span " + to_string(span));
  std::vector<Highlight> kept;
  kept.reserve(set.active.size() + 1);
  for (const auto& h : set.active) {
    if (!h.span.overlaps(span)) {
      kept.push_back(h);
      continue;
    }
    if (h.span.start < span.start) kept.push_back({{h.span.start, span.start}, h.origin});
    if (span.end < h.span.end) kept.push_back({{span.end, h.span.end}, h.origin});
  }
  set.active = std::move(kept);
  return set;
}

inline HighlightSet erase_span(HighlightSet set, const Span& span, const Document& doc) {
  validate_span(span, doc.length());
  return erase_span(std::move(set), span);
}

inline HighlightSet accept_suggestion(HighlightSet set, std::string_view id) {
  auto it = std::find_if(set.pending.begin(), set.pending.end(),
                         [&](const PendingSuggestion& p) { return p.id == id; });
  if (it == set.pending.end()) {
    throw Error(ErrorCode::not_found, "no pending suggestion '" + std::string(id) + "'");
  }
  Span span = it->span;
  set.pending.erase(it);
  set.active.push_back({span, HighlightOrigin::accepted_suggestion});
  return normalize(std::move(set));
}

inline HighlightSet reject_suggestion(HighlightSet set, std::string_view id) {
  auto it = std::find_if(set.pending.begin(), set.pending.end(),
                         [&](const PendingSuggestion& p) { return p.id == id; });
  if (it == set.pending.end()) {
    throw Error(ErrorCode::not_found, "no pending suggestion '" + std::string(id) + "'");
  }
  set.pending.erase(it);
  return set;
}

// Replaces the pending list, dropping suggestions that overlap active
// highlights.
inline HighlightSet install_suggestions(HighlightSet set, std::vector<PendingSuggestion> items) {
  set.pending = std::move(items);
  return normalize(std::move(set));
}

inline constexpr std::string_view kHighlightBegin = "<extra_id_1>";
inline constexpr std::string_view kHighlightEnd = "<extra_id_2>";

// Marks each active highlight with <extra_id_1> ... <extra_id_2>, no added
// whitespace. Pending suggestions are not serialized.
inline std::string to_markup(std::u32string_view text, const std::vector<Span>& spans) {
  std::string out;
  out.reserve(text.size() + spans.size() * (kHighlightBegin.size() + kHighlightEnd.size()));
  std::size_t pos = 0;
  for (const auto& s : spans) {
    out += unicode::encode(text.substr(pos, s.start - pos));
    out += kHighlightBegin;
    out += unicode::encode(text.substr(s.start, s.length()));
    out += kHighlightEnd;
    pos = s.end;
  }
  out += unicode::encode(text.substr(std::min(pos, text.size())));
  return out;
}

inline std::string to_markup(const Document& doc, const HighlightSet& set) {
  return to_markup(doc.codepoints(), set.active_spans());
}

struct MarkupParse {
  std::string text;
  std::vector<Span> spans;

  friend bool operator==(const MarkupParse&, const MarkupParse&) = default;
};

inline MarkupParse from_markup(std::string_view marked) {
  const std::u32string cps = unicode::decode(marked);
  const std::u32string begin = unicode::decode(kHighlightBegin);
  const std::u32string end = unicode::decode(kHighlightEnd);
  std::u32string_view view(cps);

  std::u32string plain;
  plain.reserve(cps.size());
  MarkupParse out;
  bool open = false;
  std::size_t open_at = 0;
  std::size_t i = 0;
  while (i < view.size()) {
    if (view.substr(i).starts_with(begin)) {
      if (open) throw ParseError("nested highlight marker", i);
      open = true;
      open_at = plain.size();
      i += begin.size();
    } else if (view.substr(i).starts_with(end)) {
      if (!open) throw ParseError("closing marker without opening marker", i);
      if (plain.size() == open_at) throw ParseError("empty highlight", i);
      out.spans.push_back({open_at, plain.size()});
      open = false;
      i += end.size();
    } else {
      plain.push_back(view[i]);
      ++i;
    }
  }
  if (open) throw ParseError("unterminated highlight marker", cps.size());
  out.text = unicode::encode(plain);
  return out;
}

}  // namespace sumbench
