#pragma once

// HTTP clients for the two pluggable models: the consolidation (CTR) model
// and an optional sentence scorer.
//
// Scorer wire protocol: POST {"sentences": [<string>...]} answered by
// {"scores": [<number in [0,1]>...]}, one score per sentence.

#include <chrono>
#include <memory>
#include <string>
#include <string_view>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "sumbench/consolidation.hpp"
#include "sumbench/error.hpp"
#include "sumbench/salience.hpp"

namespace sumbench {

struct HttpEndpoint {
  std::string base;  // scheme://host[:port]
  std::string path;  // at least "/"
};

inline HttpEndpoint parse_endpoint(std::string_view url) {
  auto scheme = url.find("://");
  if (scheme == std::string_view::npos || url.substr(0, scheme) != "http") {
    throw Error(ErrorCode::validation, "endpoint must be an http:// URL: " + std::string(url));
  }
  auto slash = url.find('/', scheme + 3);
  HttpEndpoint ep;
  ep.base = std::string(url.substr(0, slash));
  ep.path = slash == std::string_view::npos ? "/" : std::string(url.substr(slash));
  if (ep.base.size() <= scheme + 3) throw Error(ErrorCode::validation, "endpoint has no host");
  return ep;
}

inline std::string http_post_json(const std::string& url, const nlohmann::json& body,
                                  std::chrono::milliseconds timeout) {
  HttpEndpoint ep = parse_endpoint(url);
  httplib::Client client(ep.base);
  auto secs = std::chrono::duration_cast<std::chrono::seconds>(timeout);
  auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(timeout - secs);
  client.set_connection_timeout(secs.count(), usecs.count());
  client.set_read_timeout(secs.count(), usecs.count());
  client.set_write_timeout(secs.count(), usecs.count());
  auto res = client.Post(ep.path, body.dump(), "application/json");
  if (!res) {
    throw TransportError("request to " + url + " failed: " + httplib::to_string(res.error()));
  }
  if (res->status != 200) {
    throw TransportError("request to " + url + " returned HTTP " + std::to_string(res->status));
  }
  return res->body;
}

inline ModelTransport http_model_transport() {
  return [](const GenerationConfig& cfg, const nlohmann::json& body) {
    if (cfg.endpoint.empty()) throw Error(ErrorCode::precondition, "no model endpoint configured");
    return http_post_json(cfg.endpoint, body, cfg.timeout);
  };
}

inline SummaryDraft consolidate_external(const Document& doc, const HighlightSet& set,
                                         const GenerationConfig& cfg) {
  return consolidate_external(doc, set, cfg, http_model_transport());
}

inline std::vector<double> parse_scorer_response(std::string_view body, std::size_t expected) {
  auto j = nlohmann::json::parse(body, nullptr, false);
  if (j.is_discarded() || !j.is_object() || !j.contains("scores") || !j["scores"].is_array() ||
      j["scores"].size() != expected) {
    throw Error(ErrorCode::protocol, "scorer response must carry one score per sentence");
  }
  std::vector<double> out;
  for (const auto& v : j["scores"]) {
    if (!v.is_number()) throw Error(ErrorCode::protocol, "non-numeric score");
    double d = v.get<double>();
    if (!(d >= 0.0 && d <= 1.0)) throw Error(ErrorCode::protocol, "score outside [0,1]");
    out.push_back(d);
  }
  return out;
}

// Scorer backed by a remote model. Any failure (timeout, bad status,
// malformed body) falls back to the built-in scorer; `fell_back` records it.
inline SalienceScorer make_external_scorer(std::string endpoint, std::chrono::milliseconds timeout,
                                           std::shared_ptr<bool> fell_back = nullptr) {
  return [endpoint = std::move(endpoint), timeout, fell_back](const Document& doc) {
    if (fell_back) *fell_back = false;
    try {
      nlohmann::json sentences = nlohmann::json::array();
      for (const auto& s : doc.sentences()) sentences.push_back(doc.slice(s.span));
      std::string body = http_post_json(endpoint, {{"sentences", sentences}}, timeout);
      return parse_scorer_response(body, doc.sentences().size());
    } catch (const Error&) {
      if (fell_back) *fell_back = true;
      return score_builtin(doc);
    }
  };
}

}  // namespace sumbench
