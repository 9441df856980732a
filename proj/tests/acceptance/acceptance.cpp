// Acceptance runner: one PASS/FAIL line per criterion, nonzero exit on any
// failure.

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "process.hpp"
#include "sumbench/session.hpp"

#ifndef SUMBENCH_CLI_PATH
#error "SUMBENCH_CLI_PATH must be defined"
#endif

using namespace sumbench;
using nlohmann::json;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

struct Failure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void require(bool cond, const std::string& what) {
  if (!cond) throw Failure(what);
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

fs::path scratch_dir(const std::string& tag) {
  auto p = fs::temp_directory_path() / ("sumbench-acceptance-" + std::to_string(::getpid()) + "-" + tag);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

// ---------------------------------------------------------------------------

std::string worked_fixture() {
  auto t0 = Clock::now();
  auto sc = fixtures::worked_scenario();
  auto decisions = align_decisions(sc.source, sc.highlights, sc.summary);
  auto map = align(sc.source, sc.highlights, sc.summary);
  double elapsed = seconds_since(t0);

  using Lemmas = std::vector<std::string>;
  auto find = [&](std::size_t sum, std::size_t src, const Lemmas& lemmas) -> const AlignmentDecision* {
    for (const auto& d : decisions) {
      if (d.summary_sentence_index == sum && d.source_sentence_index == src) {
        Lemmas content;
        for (std::size_t k = 0; k < d.match.size(); ++k) {
          const auto& t = sc.source.sentences()[src].tokens[d.match.source_token_indices[k]];
          if (t.is_content()) content.push_back(d.match.lemmas[k]);
        }
        if (content == lemmas) return &d;
      }
    }
    return nullptr;
  };

  auto john = find(0, 0, {"john", "eat", "today"});
  require(john && john->retained_by == RetainedBy::content_count && john->iteration == 1,
          "'john eat today' not retained by content count in round 1");
  auto smith_other = find(0, 1, {"mr.", "smith"});
  require(smith_other && !smith_other->retained_by, "'mr. smith' against the second source sentence not rejected");
  auto he = find(1, 2, {"call"});
  require(he && he->retained_by == RetainedBy::highlight_coverage && he->best_coverage == 1.0,
          "'he call me' not retained at 100% coverage");
  require(he->match.lemmas == Lemmas({"he", "call", "me", "."}), "'he call me' match has unexpected lemmas");
  auto smith = find(0, 0, {"mr.", "smith"});
  require(smith && smith->retained_by == RetainedBy::highlight_coverage && smith->iteration == 2 &&
              smith->best_coverage == 0.5,
          "'mr. smith' against the first source sentence not retained at 50% in round 2");

  // Nothing else is retained, and nothing else with content is rejected.
  require(map.link_count() == 3, "expected exactly three retained links, got " + std::to_string(map.link_count()));
  for (const auto& d : decisions) {
    if (&d == john || &d == smith_other || &d == he || &d == smith) continue;
    require(!d.retained_by && d.content_tokens == 0, "unexpected extra decision with content");
  }
  require(elapsed < 1.0, "took " + std::to_string(elapsed) + " s");
  std::ostringstream os;
  os << "4 decisions exact, " << decisions.size() << " rounds total, " << elapsed * 1000 << " ms";
  return os.str();
}

std::string lcs_oracle() {
  auto t0 = Clock::now();
  std::mt19937 rng(20240601);
  std::uniform_int_distribution<std::size_t> len(0, 10);
  std::uniform_int_distribution<int> alpha(1, 6);
  const int pairs = 2000;
  for (int i = 0; i < pairs; ++i) {
    int k = alpha(rng);
    std::uniform_int_distribution<int> sym(0, k - 1);
    std::vector<std::string> a(len(rng)), b(len(rng));
    for (auto& s : a) s = "w" + std::to_string(sym(rng));
    for (auto& s : b) s = "w" + std::to_string(sym(rng));
    auto got = lcs(a, b).size();
    auto expected = oracle::brute_force_lcs_length(a, b);
    require(got == expected, "pair " + std::to_string(i) + ": lcs " + std::to_string(got) +
                                 " vs brute force " + std::to_string(expected));
  }
  double elapsed = seconds_since(t0);
  require(elapsed < 30.0, "took " + std::to_string(elapsed) + " s");
  return std::to_string(pairs) + " pairs exact, " + std::to_string(elapsed) + " s";
}

std::string suggestion_count_law() {
  auto t0 = Clock::now();
  for (std::size_t n = 1; n <= 200; ++n) {
    std::string text;
    for (std::size_t i = 0; i < n; ++i) text += "Report " + std::to_string(i) + " covers harbor item w" + std::to_string(i) + ". ";
    auto doc = analyze(text, "n" + std::to_string(n));
    require(doc.sentences().size() == n, "synthetic document has wrong sentence count");
    std::size_t expected = std::max<std::size_t>(1, (3 * n + 9) / 10);
    auto got = suggest(doc).items.size();
    require(got == expected, "n=" + std::to_string(n) + ": " + std::to_string(got) + " != " + std::to_string(expected));
  }
  double elapsed = seconds_since(t0);
  require(elapsed < 5.0, "took " + std::to_string(elapsed) + " s");
  return "n=1..200 exact, " + std::to_string(elapsed) + " s";
}

std::string markup_round_trip() {
  const auto& doc = fixtures::news_article();
  require(doc.token_count() >= 800, "fixed document is shorter than 800 tokens");
  auto t0 = Clock::now();
  std::mt19937 rng(77);
  std::uniform_int_distribution<int> count(0, 20);
  for (int i = 0; i < 500; ++i) {
    auto set = fixtures::random_highlights(doc, rng, count(rng), 120);
    require(is_normalized(set), "generated set is not normalized");
    auto parsed = from_markup(to_markup(doc, set));
    require(parsed.text == doc.text(), "text differs after round trip " + std::to_string(i));
    require(parsed.spans == set.active_spans(), "spans differ after round trip " + std::to_string(i));
  }
  double elapsed = seconds_since(t0);
  require(elapsed < 5.0, "took " + std::to_string(elapsed) + " s");
  return "500 sets over " + std::to_string(doc.token_count()) + " tokens, " + std::to_string(elapsed) + " s";
}

std::string baseline_coverage() {
  const auto& doc = fixtures::news_article();
  auto t0 = Clock::now();
  std::mt19937 rng(4242);
  std::uniform_int_distribution<int> count(1, 15);
  int checked = 0;
  while (checked < 200) {
    auto set = fixtures::random_highlights(doc, rng, count(rng), 90);
    auto highlighted = fixtures::highlighted_content_types(doc, set);
    if (highlighted.empty()) continue;
    auto draft = consolidate_baseline(doc, set);
    auto produced = fixtures::content_types_in(draft.analysis);
    std::size_t covered = 0;
    for (const auto& t : highlighted) covered += produced.count(t);
    require(covered == highlighted.size(), "coverage below 1.0 for: " + draft.text);
    require(produced.size() == highlighted.size(), "new content types in: " + draft.text);
    ++checked;
  }
  double elapsed = seconds_since(t0);
  require(elapsed < 10.0, "took " + std::to_string(elapsed) + " s");
  return "200 sets, coverage 1.0, no new types, " + std::to_string(elapsed) + " s";
}

std::string align_latency() {
  const auto& doc = fixtures::news_article();
  std::string summary_text;
  std::size_t tokens = 0;
  for (std::size_t i = 1; tokens < 200; i += 3) {
    const auto& s = doc.sentences()[i % doc.sentences().size()];
    summary_text += doc.slice(s.span) + " ";
    tokens += s.tokens.size();
  }
  auto summary = analyze(summary_text, "summary");
  std::mt19937 rng(5);
  auto set = fixtures::random_highlights(doc, rng, 12, 120);
  AlignmentConfig cfg{3, 0.25, 4};

  std::vector<double> ms;
  std::size_t links = 0;
  for (int run = 0; run < 50; ++run) {
    auto t0 = Clock::now();
    auto map = align(doc, set, summary, cfg);
    ms.push_back(seconds_since(t0) * 1000.0);
    links = map.link_count();
  }
  std::sort(ms.begin(), ms.end());
  double median = (ms[24] + ms[25]) / 2.0;
  require(summary.token_count() >= 200, "summary is shorter than 200 tokens");
  require(median < 100.0, "median " + std::to_string(median) + " ms");
  std::ostringstream os;
  os << doc.token_count() << "-token source, " << summary.token_count() << "-token summary, median "
     << median << " ms, " << links << " links";
  return os.str();
}

// The CLI's serve command on an ephemeral port.
struct ServeProcess {
  explicit ServeProcess(const fs::path& data_dir)
      : child({SUMBENCH_CLI_PATH, "serve", "--addr", "127.0.0.1:0", "--data-dir", data_dir.string()}) {
    port = proc::port_from_banner(child.read_line());
    require(port > 0, "server did not report a port");
    client = std::make_unique<httplib::Client>("127.0.0.1", port);
    client->set_read_timeout(10, 0);
  }

  json call(const std::string& method, const std::string& path, const json& body = nullptr) {
    httplib::Result res;
    std::string payload = body.is_null() ? "" : body.dump();
    if (method == "GET") res = client->Get(path);
    else if (method == "POST") res = client->Post(path, payload, "application/json");
    else res = client->Put(path, payload, "application/json");
    require(static_cast<bool>(res), method + " " + path + ": no response");
    require(res->status == 200, method + " " + path + ": HTTP " + std::to_string(res->status) + " " + res->body);
    return json::parse(res->body);
  }

  proc::Background child;
  int port = -1;
  std::unique_ptr<httplib::Client> client;
};

std::string end_to_end_session() {
  auto dir = scratch_dir("e2e");
  ServeProcess server(dir);
  auto t0 = Clock::now();

  auto created = server.call("POST", "/sessions", {{"text", fixtures::read_file("news_article.txt")}});
  std::string base = "/sessions/" + created["id"].get<std::string>();
  std::uint64_t rev = created["revision"];

  auto sug = server.call("POST", base + "/suggestions");
  require(!sug["suggestions"].empty(), "no suggestions");
  rev = sug["revision"];
  std::string first_id = sug["suggestions"][0]["id"];

  auto acc = server.call("POST", base + "/highlights", {{"op", "accept"}, {"suggestion_id", first_id}, {"revision", rev}});
  require(acc["revision"] == rev + 1, "accept did not bump the revision by one");
  rev = acc["revision"];

  // A manual span inside a sentence that is not pending.
  std::set<std::string> pending;
  for (const auto& p : acc["highlights"]["pending"]) pending.insert(p["id"].get<std::string>());
  json manual;
  for (const auto& s : created["document"]["sentences"]) {
    std::string id = "s" + std::to_string(s["index"].get<std::size_t>());
    if (id != first_id && !pending.count(id)) {
      std::size_t start = s["span"][0];
      manual = json::array({start, start + 20});
      break;
    }
  }
  auto add = server.call("POST", base + "/highlights", {{"op", "add"}, {"span", manual}, {"revision", rev}});
  require(add["revision"] == rev + 1, "add did not bump the revision by one");
  rev = add["revision"];

  auto gen = server.call("POST", base + "/summary", {{"engine", "baseline"}});
  require(gen["revision"] == rev + 1, "generate did not bump the revision by one");
  require(gen["stale"] == false, "fresh summary is stale");
  rev = gen["revision"];
  std::string summary = gen["summary"]["text"];

  auto edit = server.call("PUT", base + "/summary",
                          {{"text", summary + " Volunteers cleared the harbor road."}, {"revision", rev}});
  require(edit["revision"] == rev + 1, "edit did not bump the revision by one");
  rev = edit["revision"];

  auto realigned = server.call("GET", base + "/alignment");
  auto final_view = server.call("GET", base);
  double elapsed = seconds_since(t0);

  require(realigned["revision"] == rev && final_view["revision"] == rev, "final revision inconsistent");
  require(realigned["stale"] == false && final_view["stale"] == false, "final alignment is stale");
  require(realigned["alignment"] == edit["alignment"], "alignment differs from the edit response");
  require(!realigned["alignment"]["summary_sentences"][0]["links"].empty(), "summary has no links");
  require(final_view["summary"]["provenance"] == "user_edited", "edit not recorded");
  require(elapsed < 2.0, "took " + std::to_string(elapsed) + " s");
  fs::remove_all(dir);
  return "7 REST steps, final revision " + std::to_string(rev) + ", " + std::to_string(elapsed) + " s";
}

std::string persistence_restart() {
  auto dir = scratch_dir("persist");
  std::string id;
  std::string persisted;
  std::uint64_t rev = 0;
  {
    ServeProcess server(dir);
    auto created = server.call("POST", "/sessions", {{"text", fixtures::read_file("worked_source.txt")}});
    id = created["id"];
    std::string base = "/sessions/" + id;
    for (auto span : {json::array({0, 24}), json::array({30, 45}), json::array({74, 86})}) {
      server.call("POST", base + "/highlights", {{"op", "add"}, {"span", span}});
    }
    server.call("POST", base + "/summary", {{"engine", "baseline"}});
    auto edit = server.call("PUT", base + "/summary", {{"text", fixtures::read_file("worked_summary.txt")}});
    persisted = edit["alignment"].dump();
    rev = edit["revision"];
    server.child.signal(SIGKILL);  // no flush, no shutdown path
    server.child.wait();
  }

  ServeProcess restarted(dir);
  std::string base = "/sessions/" + id;
  auto view = restarted.call("GET", base);
  require(view["revision"] == rev, "revision lost across restart");
  require(view["alignment"].dump() == persisted, "stored alignment changed across restart");

  // Recompute in-process from the file alone, then through the service.
  SessionStore store(dir);
  auto loaded = store.load(id);
  require(loaded.has_value(), "session file missing");
  ServiceConfig cfg;
  cfg.data_dir = scratch_dir("persist-recompute");
  SessionService fresh(cfg);
  std::string recomputed = fresh.recompute_alignment(*loaded).dump();
  require(recomputed == persisted, "recomputed alignment differs from the persisted one");
  // Resubmitting the same summary makes the restarted service realign.
  auto again = restarted.call("PUT", base + "/summary", {{"text", view["summary"]["text"]}});
  require(again["alignment"].dump() == persisted, "realignment after restart differs");
  fs::remove_all(cfg.data_dir);
  fs::remove_all(dir);
  return "kill -9 and restart, " + std::to_string(persisted.size()) + "-byte alignment identical";
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<std::string()> run;
  };
  const std::vector<Criterion> criteria = {
      {"worked_fixture", worked_fixture},
      {"lcs_oracle", lcs_oracle},
      {"suggestion_count_law", suggestion_count_law},
      {"markup_round_trip", markup_round_trip},
      {"baseline_coverage", baseline_coverage},
      {"align_latency", align_latency},
      {"end_to_end_session", end_to_end_session},
      {"persistence_restart", persistence_restart},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    try {
      std::string detail = c.run();
      std::cout << "PASS " << c.name << ": " << detail << std::endl;
    } catch (const std::exception& e) {
      ++failures;
      std::cout << "FAIL " << c.name << ": " << e.what() << std::endl;
    }
  }
  std::cout << (criteria.size() - failures) << "/" << criteria.size() << " criteria passed" << std::endl;
  return failures == 0 ? 0 : 1;
}
