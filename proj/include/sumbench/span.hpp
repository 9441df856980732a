#pragma once

#include <algorithm>
#include <compare>
#include <cstddef>
#include <string>

#include "sumbench/error.hpp"

namespace sumbench {

// Half-open range [start, end) of Unicode scalar value offsets.
struct Span {
  std::size_t start = 0;
  std::size_t end = 0;

  constexpr std::size_t length() const { return end - start; }
  constexpr bool empty() const { return end <= start; }
  constexpr bool contains(std::size_t pos) const { return start <= pos && pos < end; }
  constexpr bool contains(const Span& other) const {
    return start <= other.start && other.end <= end;
  }
  constexpr bool overlaps(const Span& other) const {
    return start < other.end && other.start < end;
  }
  // Overlapping or sharing a boundary.
  constexpr bool touches(const Span& other) const {
    return start <= other.end && other.start <= end;
  }

  friend constexpr auto operator<=>(const Span&, const Span&) = default;
};

inline std::string to_string(const Span& s) {
  return "[" + std::to_string(s.start) + "," + std::to_string(s.end) + ")";
}

constexpr Span intersect(const Span& a, const Span& b) {
  Span r{std::max(a.start, b.start), std::min(a.end, b.end)};
  if (r.end < r.start) r.end = r.start;
  return r;
}

// Throws validation for empty spans and out_of_range when the span runs past
// text_length.
inline void validate_span(const Span& span, std::size_t text_length) {
  if (span.end <= span.start) {
    throw Error(ErrorCode::validation, "empty span " + to_string(span));
  }
  if (span.end > text_length) {
    throw Error(ErrorCode::out_of_range, "span " + to_string(span) +
                                             " exceeds text length " +
                                             std::to_string(text_length));
  }
}

}  // namespace sumbench
