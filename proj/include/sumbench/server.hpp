#pragma once

// REST front end over SessionService. JSON bodies, UTF-8, span offsets in
// Unicode scalar values.
//
//   GET  /health
//   POST /sessions                      {text}
//   GET  /sessions/{id}
//   POST /sessions/{id}/suggestions
//   POST /sessions/{id}/highlights      {op, span?|suggestion_id?, revision?}
//   POST /sessions/{id}/summary         {engine}
//   PUT  /sessions/{id}/summary         {text, revision?}
//   GET  /sessions/{id}/alignment

#include <functional>
#include <string>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "sumbench/error.hpp"
#include "sumbench/session.hpp"
#include "sumbench/wire.hpp"

namespace sumbench {

inline int http_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::validation: return 400;
    case ErrorCode::out_of_range: return 400;
    case ErrorCode::parse: return 400;
    case ErrorCode::not_found: return 404;
    case ErrorCode::conflict: return 409;
    case ErrorCode::busy: return 409;
    case ErrorCode::precondition: return 422;
    case ErrorCode::limit: return 413;
    case ErrorCode::transport: return 502;
    case ErrorCode::protocol: return 502;
  }
  return 500;
}

inline nlohmann::json summary_view(const Session& s) {
  if (!s.summary) return nullptr;
  nlohmann::json sentences = nlohmann::json::array();
  for (const auto& sent : s.summary->analysis.sentences()) {
    sentences.push_back({{"index", sent.index}, {"span", wire::to_json(sent.span)}});
  }
  return {{"text", s.summary->text},
          {"provenance", to_string(s.summary->provenance)},
          {"sentences", std::move(sentences)}};
}

inline nlohmann::json session_view(const Session& s) {
  nlohmann::json items = nlohmann::json::array();
  for (const auto& p : s.suggestions.items) items.push_back(wire::to_json(p));
  return {{"id", s.id},
          {"revision", s.revision},
          {"created", s.created},
          {"updated", s.updated},
          {"document", wire::to_json(s.document)},
          {"highlights", wire::to_json(s.highlights)},
          {"suggestion_requested", s.suggestion_requested},
          {"suggestions", std::move(items)},
          {"summary", summary_view(s)},
          {"alignment", s.alignment ? *s.alignment : nlohmann::json(nullptr)},
          {"stale", s.stale}};
}

class HttpServer {
 public:
  explicit HttpServer(SessionService& service) : service_(service) {
    // The library default adds SO_REUSEPORT, which would let a second
    // instance share a port already in use.
    server_.set_socket_options([](socket_t sock) {
      int yes = 1;
      setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, reinterpret_cast<const void*>(&yes), sizeof(yes));
    });
    routes();
  }

  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  // Returns the bound port, or -1 if the address is unavailable.
  int bind(const std::string& host, int port) {
    if (port == 0) return server_.bind_to_any_port(host);
    return server_.bind_to_port(host, port) ? port : -1;
  }

  bool listen_after_bind() { return server_.listen_after_bind(); }
  void stop() { server_.stop(); }
  bool is_running() const { return server_.is_running(); }
  void wait_until_ready() const { server_.wait_until_ready(); }

 private:
  using Handler = std::function<nlohmann::json(const httplib::Request&, httplib::Response&)>;

  static nlohmann::json body_json(const httplib::Request& req) {
    if (req.body.empty()) return nlohmann::json::object();
    auto j = nlohmann::json::parse(req.body, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
      throw Error(ErrorCode::validation, "request body must be a JSON object");
    }
    return j;
  }

  static std::optional<std::uint64_t> revision_field(const nlohmann::json& j) {
    if (!j.contains("revision") || j["revision"].is_null()) return std::nullopt;
    if (!j["revision"].is_number_unsigned()) throw Error(ErrorCode::validation, "revision must be an integer");
    return j["revision"].get<std::uint64_t>();
  }

  static std::string string_field(const nlohmann::json& j, const char* name) {
    if (!j.contains(name) || !j[name].is_string()) {
      throw Error(ErrorCode::validation, std::string("missing string field '") + name + "'");
    }
    return j[name].get<std::string>();
  }

  static httplib::Server::Handler wrap(Handler h) {
    return [h = std::move(h)](const httplib::Request& req, httplib::Response& res) {
      nlohmann::json out;
      try {
        out = h(req, res);
        res.status = 200;
      } catch (const Error& e) {
        out = wire::error_body(e);
        res.status = http_status(e.code());
      } catch (const nlohmann::json::exception& e) {
        out = wire::error_body(Error(ErrorCode::validation, e.what()));
        res.status = 400;
      } catch (const std::exception& e) {
        out = {{"error", {{"code", "internal"}, {"message", e.what()}}}};
        res.status = 500;
      }
      res.set_content(out.dump(), "application/json; charset=utf-8");
    };
  }

  void routes() {
    server_.Get("/health", wrap([](const auto&, auto&) { return nlohmann::json{{"status", "ok"}}; }));

    server_.Post("/sessions", wrap([this](const auto& req, auto&) {
      auto j = body_json(req);
      Session s = service_.create(string_field(j, "text"));
      return nlohmann::json{{"id", s.id}, {"revision", s.revision}, {"document", wire::to_json(s.document)}};
    }));

    server_.Get(R"(/sessions/([0-9a-zA-Z]+))", wrap([this](const auto& req, auto&) {
      return session_view(service_.get(req.matches[1].str()));
    }));

    server_.Post(R"(/sessions/([0-9a-zA-Z]+)/suggestions)", wrap([this](const auto& req, auto&) {
      auto [s, set] = service_.suggestions(req.matches[1].str());
      nlohmann::json out = wire::to_json(set, s.document);
      out["revision"] = s.revision;
      out["highlights"] = wire::to_json(s.highlights);
      return out;
    }));

    server_.Post(R"(/sessions/([0-9a-zA-Z]+)/highlights)", wrap([this](const auto& req, auto&) {
      auto j = body_json(req);
      HighlightMutation m;
      m.op = highlight_op_from_string(string_field(j, "op"));
      if (j.contains("span")) m.span = wire::span_from_json(j["span"]);
      if (j.contains("suggestion_id")) m.suggestion_id = string_field(j, "suggestion_id");
      m.expected_revision = revision_field(j);
      Session s = service_.mutate_highlights(req.matches[1].str(), m);
      return nlohmann::json{{"revision", s.revision}, {"highlights", wire::to_json(s.highlights)}, {"stale", s.stale}};
    }));

    server_.Post(R"(/sessions/([0-9a-zA-Z]+)/summary)", wrap([this](const auto& req, auto&) {
      auto j = body_json(req);
      Engine engine = engine_from_string(j.value("engine", std::string("baseline")));
      Session s = service_.generate(req.matches[1].str(), engine);
      return nlohmann::json{{"revision", s.revision},
                            {"summary", summary_view(s)},
                            {"alignment", *s.alignment},
                            {"stale", s.stale}};
    }));

    server_.Put(R"(/sessions/([0-9a-zA-Z]+)/summary)", wrap([this](const auto& req, auto&) {
      auto j = body_json(req);
      Session s = service_.update_summary(req.matches[1].str(), string_field(j, "text"), revision_field(j));
      return nlohmann::json{{"revision", s.revision},
                            {"summary", summary_view(s)},
                            {"alignment", *s.alignment},
                            {"stale", s.stale}};
    }));

    server_.Get(R"(/sessions/([0-9a-zA-Z]+)/alignment)", wrap([this](const auto& req, auto&) {
      Session s = service_.get(req.matches[1].str());
      return nlohmann::json{{"revision", s.revision},
                            {"stale", s.stale},
                            {"alignment", s.alignment ? *s.alignment : nlohmann::json(nullptr)}};
    }));
  }

  SessionService& service_;
  httplib::Server server_;
};

}  // namespace sumbench
