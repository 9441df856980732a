#pragma once

#include <chrono>
#include <functional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "sumbench/error.hpp"
#include "sumbench/highlighting.hpp"
#include "sumbench/text_pipeline.hpp"
#include "sumbench/unicode.hpp"

namespace sumbench {

enum class Provenance { baseline, external_model, user_edited };

inline std::string_view to_string(Provenance p) {
  switch (p) {
    case Provenance::baseline: return "baseline";
    case Provenance::external_model: return "external_model";
    case Provenance::user_edited: return "user_edited";
  }
  return "baseline";
}

inline Provenance provenance_from_string(std::string_view s) {
  if (s == "baseline") return Provenance::baseline;
  if (s == "external_model") return Provenance::external_model;
  if (s == "user_edited") return Provenance::user_edited;
  throw Error(ErrorCode::validation, "unknown provenance '" + std::string(s) + "'");
}

struct SummaryDraft {
  std::string text;
  Document analysis;
  Provenance provenance = Provenance::baseline;

  static SummaryDraft make(std::string text, Provenance provenance) {
    Document analysis = analyze(text, "summary");
    return {std::move(text), std::move(analysis), provenance};
  }
};

struct GenerationConfig {
  std::size_t max_input_tokens = 4096;
  std::size_t max_target_tokens = 400;
  std::string decoding = "greedy";
  std::string endpoint;
  std::chrono::milliseconds timeout{30000};
};

using Consolidator = std::function<SummaryDraft(const Document&, const HighlightSet&)>;

namespace detail {

inline std::string collapse_whitespace(std::u32string_view text) {
  std::u32string out;
  bool in_space = false;
  for (char32_t c : text) {
    if (unicode::is_space(c) || c < 0x20) {
      in_space = true;
      continue;
    }
    if (in_space && !out.empty()) out.push_back(U' ');
    in_space = false;
    out.push_back(c);
  }
  return unicode::encode(out);
}

}  // namespace detail

// Extractive fusion: for each source sentence, the tokens touched by
// highlights form fragments (snapped outward to whole tokens); a sentence's
// fragments are joined with single spaces into one summary sentence.
inline SummaryDraft consolidate_baseline(const Document& doc, const HighlightSet& set) {
  if (!set.has_active()) throw Error(ErrorCode::validation, "no active highlights to consolidate");
  const auto& cps = doc.codepoints();
  const auto& res = default_analyzer().resources();

  std::set<std::string> seen;
  std::vector<std::string> sentences_out;
  for (const auto& sentence : doc.sentences()) {
    std::vector<std::string> fragments;
    for (const auto& h : set.active) {
      if (!h.span.overlaps(sentence.span)) continue;
      std::size_t first = sentence.tokens.size();
      std::size_t last = 0;
      for (std::size_t i = 0; i < sentence.tokens.size(); ++i) {
        if (sentence.tokens[i].span.overlaps(h.span)) {
          first = std::min(first, i);
          last = i;
        }
      }
      if (first == sentence.tokens.size()) continue;
      Span extent{sentence.tokens[first].span.start, sentence.tokens[last].span.end};
      std::string fragment =
          detail::collapse_whitespace(std::u32string_view(cps).substr(extent.start, extent.length()));
      if (!seen.insert(unicode::to_lower_utf8(fragment)).second) continue;
      fragments.push_back(std::move(fragment));
    }
    if (fragments.empty()) continue;

    std::u32string joined;
    for (const auto& f : fragments) {
      if (!joined.empty()) joined.push_back(U' ');
      joined += unicode::decode(f);
    }
    if (joined.front() >= U'a' && joined.front() <= U'z') joined.front() -= 32;
    char32_t tail = joined.back();
    bool terminal = tail == U'.' || tail == U'!' || tail == U'?' ||
                    (unicode::is_closing_punct(tail) && joined.size() > 1 &&
                     (joined[joined.size() - 2] == U'.' || joined[joined.size() - 2] == U'!' ||
                      joined[joined.size() - 2] == U'?'));
    if (!terminal) {
      // A trailing word that would fuse with "." into an abbreviation token
      // ("Dr" -> "Dr.") gets a detached period instead.
      std::size_t word_start = joined.size();
      while (word_start > 0 && unicode::is_word(joined[word_start - 1])) --word_start;
      std::u32string candidate = unicode::to_lower(std::u32string_view(joined).substr(word_start));
      candidate.push_back(U'.');
      bool fuses = false;
      for (const auto& abbr : res.abbreviations()) {
        if (abbr.size() >= candidate.size() &&
            std::u32string_view(abbr).ends_with(candidate)) {
          fuses = true;
          break;
        }
      }
      if (fuses) joined.push_back(U' ');
      joined.push_back(U'.');
    }
    sentences_out.push_back(unicode::encode(joined));
  }
  if (sentences_out.empty()) {
    throw Error(ErrorCode::validation, "highlights cover no tokens");
  }
  std::string text;
  for (const auto& s : sentences_out) {
    if (!text.empty()) text.push_back(' ');
    text += s;
  }
  return SummaryDraft::make(std::move(text), Provenance::baseline);
}

struct ModelRequest {
  std::string input;
  std::size_t sentences_included = 0;
  std::size_t tokens_included = 0;
};

// Marked-up model input limited to the leading whole sentences whose token
// count fits the budget. Highlights are clipped to the kept prefix, so every
// begin marker has its end marker.
inline ModelRequest build_model_request(const Document& doc, const HighlightSet& set,
                                        std::size_t max_input_tokens) {
  ModelRequest req;
  std::size_t end = 0;
  for (const auto& s : doc.sentences()) {
    if (req.tokens_included + s.tokens.size() > max_input_tokens) break;
    req.tokens_included += s.tokens.size();
    ++req.sentences_included;
    end = s.span.end;
  }
  if (req.sentences_included == 0) {
    throw Error(ErrorCode::limit, "first sentence exceeds the model input budget");
  }
  std::vector<Span> clipped;
  for (const auto& h : set.active) {
    Span c = intersect(h.span, {0, end});
    if (!c.empty()) clipped.push_back(c);
  }
  req.input = to_markup(std::u32string_view(doc.codepoints()).substr(0, end), clipped);
  return req;
}

inline nlohmann::json model_request_body(const ModelRequest& req, const GenerationConfig& cfg) {
  return {{"input", req.input},
          {"max_target_tokens", cfg.max_target_tokens},
          {"decoding", cfg.decoding}};
}

inline std::string parse_model_response(std::string_view body) {
  auto j = nlohmann::json::parse(body, nullptr, false);
  if (j.is_discarded() || !j.is_object() || !j.contains("summary") || !j["summary"].is_string()) {
    throw Error(ErrorCode::protocol, "model response lacks a string 'summary' field");
  }
  return j["summary"].get<std::string>();
}

// Transport for the external model: takes the request JSON and returns the
// raw response body, throwing TransportError on failure.
using ModelTransport = std::function<std::string(const GenerationConfig&, const nlohmann::json&)>;

inline SummaryDraft consolidate_external(const Document& doc, const HighlightSet& set,
                                         const GenerationConfig& cfg,
                                         const ModelTransport& transport) {
  if (!set.has_active()) throw Error(ErrorCode::validation, "no active highlights to consolidate");
  if (cfg.max_input_tokens == 0 || cfg.max_target_tokens == 0) {
    throw Error(ErrorCode::validation, "generation limits must be positive");
  }
  ModelRequest req = build_model_request(doc, set, cfg.max_input_tokens);
  std::string body = transport(cfg, model_request_body(req, cfg));
  return SummaryDraft::make(parse_model_response(body), Provenance::external_model);
}

}  // namespace sumbench
