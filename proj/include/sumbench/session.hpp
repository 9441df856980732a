#pragma once

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <utility>

#include <nlohmann/json.hpp>

#include "sumbench/alignment.hpp"
#include "sumbench/consolidation.hpp"
#include "sumbench/error.hpp"
#include "sumbench/highlighting.hpp"
#include "sumbench/salience.hpp"
#include "sumbench/text_pipeline.hpp"
#include "sumbench/wire.hpp"

namespace sumbench {

enum class Engine { baseline, external };

inline Engine engine_from_string(std::string_view s) {
  if (s == "baseline") return Engine::baseline;
  if (s == "external") return Engine::external;
  throw Error(ErrorCode::validation, "engine must be 'baseline' or 'external'");
}

struct Session {
  std::string id;
  Document document;
  HighlightSet highlights;
  bool suggestion_requested = false;
  std::optional<std::uint64_t> suggestions_revision;
  SuggestionSet suggestions;
  std::optional<SummaryDraft> summary;
  std::optional<nlohmann::json> alignment;  // wire form
  bool stale = false;
  std::string created;
  std::string updated;
  std::uint64_t revision = 0;
};

namespace detail {

inline std::string utc_timestamp() {
  auto now = std::chrono::system_clock::now();
  std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

inline bool valid_session_id(std::string_view id) {
  if (id.empty() || id.size() > 64) return false;
  for (char c : id) {
    bool ok = (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f');
    if (!ok) return false;
  }
  return true;
}

}  // namespace detail

inline nlohmann::json session_to_json(const Session& s) {
  using nlohmann::json;
  json j = {{"id", s.id},
            {"revision", s.revision},
            {"created", s.created},
            {"updated", s.updated},
            {"text", s.document.text()},
            {"highlights", wire::to_json(s.highlights)},
            {"suggestion_requested", s.suggestion_requested},
            {"stale", s.stale}};
  j["suggestions_revision"] = s.suggestions_revision ? json(*s.suggestions_revision) : json(nullptr);
  json items = json::array();
  for (const auto& p : s.suggestions.items) items.push_back(wire::to_json(p));
  j["suggestions"] = std::move(items);
  if (s.summary) {
    j["summary"] = {{"text", s.summary->text}, {"provenance", to_string(s.summary->provenance)}};
  } else {
    j["summary"] = nullptr;
  }
  j["alignment"] = s.alignment ? *s.alignment : json(nullptr);
  return j;
}

inline Session session_from_json(const nlohmann::json& j) {
  Session s;
  s.id = j.at("id").get<std::string>();
  s.revision = j.at("revision").get<std::uint64_t>();
  s.created = j.value("created", std::string{});
  s.updated = j.value("updated", std::string{});
  s.document = analyze(j.at("text").get<std::string>(), s.id);
  s.highlights = wire::highlight_set_from_json(j.at("highlights"));
  s.suggestion_requested = j.value("suggestion_requested", false);
  s.stale = j.value("stale", false);
  if (j.contains("suggestions_revision") && !j["suggestions_revision"].is_null()) {
    s.suggestions_revision = j["suggestions_revision"].get<std::uint64_t>();
  }
  s.suggestions.document_id = s.id;
  for (const auto& p : j.value("suggestions", nlohmann::json::array())) {
    s.suggestions.items.push_back({p.at("id").get<std::string>(), wire::span_from_json(p.at("span")),
                                   p.at("score").get<double>()});
  }
  if (j.contains("summary") && !j["summary"].is_null()) {
    s.summary = SummaryDraft::make(j["summary"].at("text").get<std::string>(),
                                   provenance_from_string(j["summary"].at("provenance").get<std::string>()));
  }
  if (j.contains("alignment") && !j["alignment"].is_null()) s.alignment = j["alignment"];
  return s;
}

// One JSON file per session, replaced atomically on every write.
class SessionStore {
 public:
  explicit SessionStore(std::filesystem::path dir) : dir_(std::move(dir)) {
    std::filesystem::create_directories(dir_);
  }

  std::filesystem::path path_for(std::string_view id) const {
    return dir_ / (std::string(id) + ".json");
  }

  void save(const Session& s) const {
    auto target = path_for(s.id);
    auto tmp = target;
    tmp += ".tmp";
    {
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      if (!out) throw Error(ErrorCode::precondition, "cannot write " + tmp.string());
      out << session_to_json(s).dump(2) << '\n';
      out.flush();
      if (!out) throw Error(ErrorCode::precondition, "short write to " + tmp.string());
    }
    std::filesystem::rename(tmp, target);
  }

  std::optional<Session> load(std::string_view id) const {
    if (!detail::valid_session_id(id)) return std::nullopt;
    auto p = path_for(id);
    std::ifstream in(p, std::ios::binary);
    if (!in) return std::nullopt;
    std::stringstream buf;
    buf << in.rdbuf();
    auto j = nlohmann::json::parse(buf.str(), nullptr, false);
    if (j.is_discarded()) throw Error(ErrorCode::parse, "corrupt session file " + p.string());
    return session_from_json(j);
  }

  const std::filesystem::path& dir() const { return dir_; }

 private:
  std::filesystem::path dir_;
};

struct ServiceConfig {
  std::filesystem::path data_dir = "sessions";
  std::size_t max_text_bytes = 1 << 20;
  double suggestion_ratio = kDefaultSuggestionRatio;
  AlignmentConfig alignment;
  GenerationConfig generation;
};

enum class HighlightOp { add, erase, accept, reject };

inline HighlightOp highlight_op_from_string(std::string_view s) {
  if (s == "add") return HighlightOp::add;
  if (s == "erase") return HighlightOp::erase;
  if (s == "accept") return HighlightOp::accept;
  if (s == "reject") return HighlightOp::reject;
  throw Error(ErrorCode::validation, "op must be one of add, erase, accept, reject");
}

struct HighlightMutation {
  HighlightOp op = HighlightOp::add;
  std::optional<Span> span;
  std::optional<std::string> suggestion_id;
  std::optional<std::uint64_t> expected_revision;
};

// Orchestrates the select -> generate -> review workflow. Sessions are
// independent; operations on one session are serialized by its mutex and
// every mutation is persisted before it is acknowledged.
class SessionService {
 public:
  explicit SessionService(ServiceConfig cfg, SalienceScorer scorer = score_builtin,
                          ModelTransport transport = nullptr)
      : cfg_(std::move(cfg)),
        store_(cfg_.data_dir),
        scorer_(std::move(scorer)),
        transport_(std::move(transport)) {
    cfg_.alignment.validate();
  }

  const ServiceConfig& config() const { return cfg_; }

  Session create(std::string_view text) {
    if (text.empty() || text.find_first_not_of(" \t\r\n") == std::string_view::npos) {
      throw Error(ErrorCode::validation, "text must not be empty");
    }
    if (text.size() > cfg_.max_text_bytes) {
      throw Error(ErrorCode::limit, "text exceeds " + std::to_string(cfg_.max_text_bytes) + " bytes");
    }
    auto entry = std::make_shared<Entry>();
    Session& s = entry->session;
    s.id = new_id();
    s.document = analyze(text, s.id);
    s.highlights.document_id = s.id;
    s.suggestions.document_id = s.id;
    s.created = s.updated = detail::utc_timestamp();
    s.revision = 1;
    store_.save(s);
    {
      std::lock_guard lock(map_mutex_);
      entries_[s.id] = entry;
    }
    return s;
  }

  Session get(std::string_view id) {
    auto entry = find(id);
    std::lock_guard lock(entry->mutex);
    return entry->session;
  }

  // Installs the top suggestions as pending highlights. Repeating the call
  // without intervening changes returns the same set and keeps the revision.
  std::pair<Session, SuggestionSet> suggestions(std::string_view id) {
    auto entry = find(id);
    std::lock_guard lock(entry->mutex);
    Session& s = entry->session;
    if (s.suggestions_revision && *s.suggestions_revision == s.revision) return {s, s.suggestions};

    SuggestionSet set = suggest(s.document, scorer_, cfg_.suggestion_ratio);
    Session next = s;
    next.suggestions = set;
    next.highlights = install_suggestions(next.highlights, set.items);
    next.suggestion_requested = true;
    next.suggestions_revision = s.revision + 1;
    commit(entry, std::move(next));
    return {s, set};
  }

  Session mutate_highlights(std::string_view id, const HighlightMutation& m) {
    auto entry = find(id);
    std::lock_guard lock(entry->mutex);
    Session& s = entry->session;
    check_revision(s, m.expected_revision);

    Session next = s;
    switch (m.op) {
      case HighlightOp::add:
        if (!m.span) throw Error(ErrorCode::validation, "add requires a span");
        next.highlights = add_user_span(next.highlights, *m.span, next.document);
        break;
      case HighlightOp::erase:
        if (!m.span) throw Error(ErrorCode::validation, "erase requires a span");
        next.highlights = erase_span(next.highlights, *m.span, next.document);
        break;
      case HighlightOp::accept:
        if (!m.suggestion_id) throw Error(ErrorCode::validation, "accept requires a suggestion_id");
        next.highlights = accept_suggestion(next.highlights, *m.suggestion_id);
        break;
      case HighlightOp::reject:
        if (!m.suggestion_id) throw Error(ErrorCode::validation, "reject requires a suggestion_id");
        next.highlights = reject_suggestion(next.highlights, *m.suggestion_id);
        break;
    }
    if (next.summary && next.highlights.active != s.highlights.active) next.stale = true;
    commit(entry, std::move(next));
    return s;
  }

  Session generate(std::string_view id, Engine engine) {
    auto entry = find(id);
    if (engine == Engine::baseline) {
      std::lock_guard lock(entry->mutex);
      Session& s = entry->session;
      if (entry->generating) throw Error(ErrorCode::busy, "a generation is already running");
      if (!s.highlights.has_active()) {
        throw Error(ErrorCode::precondition, "generation needs at least one active highlight");
      }
      Session next = s;
      next.summary = consolidate_baseline(next.document, next.highlights);
      realign(next);
      commit(entry, std::move(next));
      return s;
    }

    Document doc;
    HighlightSet highlights;
    {
      std::lock_guard lock(entry->mutex);
      if (entry->generating) throw Error(ErrorCode::busy, "a generation is already running");
      if (!entry->session.highlights.has_active()) {
        throw Error(ErrorCode::precondition, "generation needs at least one active highlight");
      }
      if (cfg_.generation.endpoint.empty() || !transport_) {
        throw Error(ErrorCode::precondition, "no model endpoint configured");
      }
      entry->generating = true;
      doc = entry->session.document;
      highlights = entry->session.highlights;
    }
    std::optional<SummaryDraft> draft;
    try {
      draft = consolidate_external(doc, highlights, cfg_.generation, transport_);
    } catch (...) {
      std::lock_guard lock(entry->mutex);
      entry->generating = false;
      throw;
    }
    std::lock_guard lock(entry->mutex);
    entry->generating = false;
    Session next = entry->session;
    next.summary = std::move(*draft);
    realign(next);
    commit(entry, std::move(next));
    return entry->session;
  }

  // Replaces the summary with user text and recomputes the alignment. Pause
  // detection is the client's job; every call realigns.
  Session update_summary(std::string_view id, std::string text,
                         std::optional<std::uint64_t> expected_revision = std::nullopt) {
    if (text.size() > cfg_.max_text_bytes) {
      throw Error(ErrorCode::limit, "summary exceeds " + std::to_string(cfg_.max_text_bytes) + " bytes");
    }
    auto entry = find(id);
    std::lock_guard lock(entry->mutex);
    Session& s = entry->session;
    if (!s.summary) throw Error(ErrorCode::precondition, "session has no summary to edit");
    check_revision(s, expected_revision);
    Session next = s;
    next.summary = SummaryDraft::make(std::move(text), Provenance::user_edited);
    realign(next);
    commit(entry, std::move(next));
    return s;
  }

  // Alignment of the session's current summary, highlights and document
  // under this service's constants, without touching the stored one.
  nlohmann::json recompute_alignment(const Session& s) const {
    if (!s.summary) return nullptr;
    AlignmentMap map = align(s.document, s.highlights, s.summary->analysis, cfg_.alignment);
    return wire::to_json(map, s.document, s.summary->analysis);
  }

  void flush() {
    std::lock_guard lock(map_mutex_);
    for (auto& [_, entry] : entries_) {
      std::lock_guard elock(entry->mutex);
      store_.save(entry->session);
    }
  }

 private:
  struct Entry {
    std::mutex mutex;
    Session session;
    bool generating = false;
  };

  std::shared_ptr<Entry> find(std::string_view id) {
    std::lock_guard lock(map_mutex_);
    if (auto it = entries_.find(std::string(id)); it != entries_.end()) return it->second;
    auto loaded = store_.load(id);
    if (!loaded) throw Error(ErrorCode::not_found, "no session '" + std::string(id) + "'");
    auto entry = std::make_shared<Entry>();
    entry->session = std::move(*loaded);
    entries_[entry->session.id] = entry;
    return entry;
  }

  static void check_revision(const Session& s, std::optional<std::uint64_t> expected) {
    if (expected && *expected != s.revision) {
      throw Error(ErrorCode::conflict, "revision " + std::to_string(*expected) +
                                           " is stale; session is at " + std::to_string(s.revision));
    }
  }

  void realign(Session& s) const {
    s.alignment = recompute_alignment(s);
    s.stale = false;
  }

  // Persists first so a failed write leaves the in-memory session untouched.
  void commit(const std::shared_ptr<Entry>& entry, Session next) {
    next.revision = entry->session.revision + 1;
    next.updated = detail::utc_timestamp();
    store_.save(next);
    entry->session = std::move(next);
  }

  std::string new_id() {
    std::lock_guard lock(rng_mutex_);
    std::uniform_int_distribution<std::uint64_t> dist;
    std::ostringstream os;
    os << std::hex;
    os.width(16);
    os.fill('0');
    os << dist(rng_);
    return os.str();
  }

  ServiceConfig cfg_;
  SessionStore store_;
  SalienceScorer scorer_;
  ModelTransport transport_;
  std::mutex map_mutex_;
  std::map<std::string, std::shared_ptr<Entry>> entries_;
  std::mutex rng_mutex_;
  std::mt19937_64 rng_{std::random_device{}()};
};

}  // namespace sumbench
