#pragma once

// JSON shapes shared by the REST service, the CLI and session files.
// Spans serialize as two-element arrays [start, end] of Unicode scalar
// offsets, end exclusive.

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "sumbench/alignment.hpp"
#include "sumbench/consolidation.hpp"
#include "sumbench/error.hpp"
#include "sumbench/highlighting.hpp"
#include "sumbench/salience.hpp"
#include "sumbench/text_pipeline.hpp"

namespace sumbench::wire {

using nlohmann::json;

inline json to_json(const Span& s) { return json::array({s.start, s.end}); }

inline Span span_from_json(const json& j) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number_unsigned() || !j[1].is_number_unsigned()) {
    throw Error(ErrorCode::validation, "span must be [start, end] with non-negative integers");
  }
  return {j[0].get<std::size_t>(), j[1].get<std::size_t>()};
}

inline json spans_to_json(const std::vector<Span>& spans) {
  json out = json::array();
  for (const auto& s : spans) out.push_back(to_json(s));
  return out;
}

inline json to_json(const Document& doc) {
  json sentences = json::array();
  for (const auto& s : doc.sentences()) {
    json tokens = json::array();
    for (const auto& t : s.tokens) {
      tokens.push_back({{"surface", t.surface},
                        {"lemma", t.lemma},
                        {"span", to_json(t.span)},
                        {"kind", to_string(t.kind)}});
    }
    sentences.push_back({{"index", s.index}, {"span", to_json(s.span)}, {"tokens", std::move(tokens)}});
  }
  return {{"id", doc.id()}, {"text", doc.text()}, {"sentences", std::move(sentences)}};
}

inline json to_json(const PendingSuggestion& p) {
  return {{"id", p.id}, {"span", to_json(p.span)}, {"score", p.score}};
}

inline json to_json(const HighlightSet& set) {
  json active = json::array();
  for (const auto& h : set.active) {
    active.push_back({{"span", to_json(h.span)}, {"origin", to_string(h.origin)}});
  }
  json pending = json::array();
  for (const auto& p : set.pending) pending.push_back(to_json(p));
  return {{"document_id", set.document_id}, {"active", std::move(active)}, {"pending", std::move(pending)}};
}

inline HighlightSet highlight_set_from_json(const json& j) {
  HighlightSet set;
  set.document_id = j.value("document_id", std::string{});
  for (const auto& h : j.at("active")) {
    auto origin = h.at("origin").get<std::string>() == "user" ? HighlightOrigin::user
                                                              : HighlightOrigin::accepted_suggestion;
    set.active.push_back({span_from_json(h.at("span")), origin});
  }
  for (const auto& p : j.at("pending")) {
    set.pending.push_back({p.at("id").get<std::string>(), span_from_json(p.at("span")),
                           p.at("score").get<double>()});
  }
  return set;
}

inline json to_json(const SuggestionSet& s, const Document& doc) {
  json items = json::array();
  for (const auto& p : s.items) {
    json item = to_json(p);
    item["text"] = doc.slice(p.span);
    items.push_back(std::move(item));
  }
  return {{"document_id", s.document_id}, {"suggestions", std::move(items)}};
}

inline json to_json(const AlignmentMap& map, const Document& source, const Document& summary) {
  json sentences = json::array();
  for (const auto& entry : map.summary_sentences) {
    const Sentence& ss = summary.sentences().at(entry.index);
    json links = json::array();
    for (const auto& link : entry.links) {
      const Sentence& src = source.sentences().at(link.source_sentence_index);
      std::vector<Span> sum_spans;
      std::vector<Span> src_spans;
      for (std::size_t k : link.match.summary_token_indices) sum_spans.push_back(ss.tokens[k].span);
      for (std::size_t k : link.match.source_token_indices) src_spans.push_back(src.tokens[k].span);
      links.push_back({{"source_sentence", link.source_sentence_index},
                       {"summary_token_spans", spans_to_json(sum_spans)},
                       {"source_token_spans", spans_to_json(src_spans)},
                       {"lemmas", link.match.lemmas},
                       {"retained_by", to_string(link.retained_by)},
                       {"iteration", link.iteration}});
    }
    sentences.push_back({{"index", entry.index},
                         {"span", to_json(entry.span)},
                         {"links", std::move(links)},
                         {"source_spans", spans_to_json(entry.source_spans)}});
  }
  return {{"summary_sentences", std::move(sentences)}};
}

inline json to_json(const AlignmentDecision& d) {
  json j = {{"summary_sentence", d.summary_sentence_index},
            {"source_sentence", d.source_sentence_index},
            {"iteration", d.iteration},
            {"lemmas", d.match.lemmas},
            {"content_tokens", d.content_tokens},
            {"best_coverage", d.best_coverage}};
  j["retained_by"] = d.retained_by ? json(to_string(*d.retained_by)) : json(nullptr);
  return j;
}

inline json error_body(const Error& e) {
  json err = {{"code", to_string(e.code())}, {"message", e.what()}};
  if (e.code() == ErrorCode::transport) err["fallback"] = TransportError::fallback();
  return {{"error", std::move(err)}};
}

}  // namespace sumbench::wire
