// sumbench: command-line front end for the highlight-driven summarization
// pipeline.
//
// Exit codes: 0 success, 1 usage, 2 input error, 3 transport error.

#include <pthread.h>
#include <signal.h>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>
#include <string>
#include <thread>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "sumbench.hpp"
#include "sumbench/model_client.hpp"
#include "sumbench/server.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitInput = 2;
constexpr int kExitTransport = 3;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string read_input(const std::string& path) {
  if (path == "-") {
    return std::string(std::istreambuf_iterator<char>(std::cin), {});
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// One "start end" pair per line; blank lines and '#' comments are skipped.
std::vector<sumbench::Span> read_spans(const std::string& path) {
  std::istringstream in(read_input(path));
  std::vector<sumbench::Span> spans;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream fields(line);
    long long start = -1;
    long long end = -1;
    std::string extra;
    if (!(fields >> start >> end) || (fields >> extra) || start < 0 || end < 0) {
      throw InputError(path + ":" + std::to_string(lineno) + ": expected 'start end'");
    }
    spans.push_back({static_cast<std::size_t>(start), static_cast<std::size_t>(end)});
  }
  return spans;
}

sumbench::HighlightSet highlights_from(const std::vector<sumbench::Span>& spans,
                                       const sumbench::Document& doc) {
  sumbench::HighlightSet set;
  set.document_id = doc.id();
  for (const auto& s : spans) set = sumbench::add_user_span(std::move(set), s, doc);
  return set;
}

void print_json(const nlohmann::json& j) { std::cout << j.dump(2) << '\n'; }

// Ratios and thresholds live in (0, 1].
const CLI::Validator kUnitInterval(
    [](std::string& value) -> std::string {
      double v = 0.0;
      try {
        std::size_t used = 0;
        v = std::stod(value, &used);
        if (used != value.size()) return "not a number: " + value;
      } catch (const std::exception&) {
        return "not a number: " + value;
      }
      return v > 0.0 && v <= 1.0 ? std::string() : "value must lie in (0, 1]";
    },
    "(0,1]");

struct Options {
  std::string input;
  std::string source;
  std::string summary;
  std::string highlights;
  std::string engine = "baseline";
  std::string endpoint;
  std::string scorer_endpoint;
  std::string addr = "127.0.0.1:8080";
  std::string data_dir = "sessions";
  double ratio = sumbench::kDefaultSuggestionRatio;
  int timeout_ms = 30000;
  bool decisions = false;
  sumbench::AlignmentConfig alignment;
};

int cmd_analyze(const Options& o) {
  print_json(sumbench::wire::to_json(sumbench::analyze(read_input(o.input), "input")));
  return kExitOk;
}

int cmd_suggest(const Options& o) {
  auto doc = sumbench::analyze(read_input(o.input), "input");
  sumbench::SalienceScorer scorer = sumbench::score_builtin;
  if (!o.scorer_endpoint.empty()) {
    scorer = sumbench::make_external_scorer(o.scorer_endpoint, std::chrono::milliseconds(o.timeout_ms));
  }
  print_json(sumbench::wire::to_json(sumbench::suggest(doc, scorer, o.ratio), doc));
  return kExitOk;
}

int cmd_consolidate(const Options& o) {
  if (o.engine == "external" && o.endpoint.empty()) {
    throw UsageError("--engine external requires --endpoint");
  }
  auto doc = sumbench::analyze(read_input(o.input), "input");
  auto spans = read_spans(o.highlights);
  if (spans.empty()) throw InputError("highlights file " + o.highlights + " contains no spans");
  auto set = highlights_from(spans, doc);
  sumbench::SummaryDraft draft;
  if (o.engine == "external") {
    sumbench::GenerationConfig cfg;
    cfg.endpoint = o.endpoint;
    cfg.timeout = std::chrono::milliseconds(o.timeout_ms);
    draft = sumbench::consolidate_external(doc, set, cfg);
  } else {
    draft = sumbench::consolidate_baseline(doc, set);
  }
  std::cout << draft.text << '\n';
  return kExitOk;
}

int cmd_align(const Options& o) {
  auto source = sumbench::analyze(read_input(o.source), "source");
  auto summary = sumbench::analyze(read_input(o.summary), "summary");
  sumbench::HighlightSet set;
  if (!o.highlights.empty()) set = highlights_from(read_spans(o.highlights), source);
  auto map = sumbench::align(source, set, summary, o.alignment);
  nlohmann::json out = sumbench::wire::to_json(map, source, summary);
  if (o.decisions) {
    nlohmann::json ds = nlohmann::json::array();
    for (const auto& d : sumbench::align_decisions(source, set, summary, o.alignment)) {
      ds.push_back(sumbench::wire::to_json(d));
    }
    out["decisions"] = std::move(ds);
  }
  print_json(out);
  return kExitOk;
}

int cmd_serve(const Options& o) {
  auto colon = o.addr.rfind(':');
  if (colon == std::string::npos) throw UsageError("--addr must be host:port");
  std::string host = o.addr.substr(0, colon);
  int port = 0;
  try {
    port = std::stoi(o.addr.substr(colon + 1));
  } catch (const std::exception&) {
    throw UsageError("--addr must be host:port");
  }

  sumbench::ServiceConfig cfg;
  cfg.data_dir = o.data_dir;
  cfg.suggestion_ratio = o.ratio;
  cfg.alignment = o.alignment;
  cfg.generation.endpoint = o.endpoint;
  cfg.generation.timeout = std::chrono::milliseconds(o.timeout_ms);
  sumbench::SalienceScorer scorer = sumbench::score_builtin;
  if (!o.scorer_endpoint.empty()) {
    scorer = sumbench::make_external_scorer(o.scorer_endpoint, std::chrono::milliseconds(o.timeout_ms));
  }

  // Block termination signals in every thread; a dedicated thread waits for
  // them and stops the server.
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  sumbench::SessionService service(cfg, scorer, sumbench::http_model_transport());
  sumbench::HttpServer server(service);
  int bound = server.bind(host, port);
  if (bound < 0) {
    std::cerr << "sumbench: cannot bind " << o.addr << '\n';
    return kExitInput;
  }
  std::cout << "listening on http://" << host << ":" << bound << std::endl;

  std::thread waiter([&] {
    int sig = 0;
    sigwait(&signals, &sig);
    server.stop();
  });
  bool ok = server.listen_after_bind();
  if (waiter.joinable()) {
    // Wake the waiter if the server exited on its own.
    pthread_kill(waiter.native_handle(), SIGTERM);
    waiter.join();
  }
  service.flush();
  std::cerr << "sumbench: shut down" << std::endl;
  return ok ? kExitOk : kExitInput;
}

void add_alignment_flags(CLI::App* cmd, Options& o) {
  cmd->add_option("--min-content-tokens", o.alignment.min_content_tokens,
                  "Content tokens that keep an LCS on their own")
      ->envname("SUMBENCH_MIN_CONTENT_TOKENS")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--coverage-threshold", o.alignment.coverage_threshold,
                  "Highlight coverage that keeps a short LCS")
      ->envname("SUMBENCH_COVERAGE_THRESHOLD")
      ->check(kUnitInterval);
  cmd->add_option("--max-iterations", o.alignment.max_iterations, "LCS rounds per sentence pair")
      ->envname("SUMBENCH_MAX_ITERATIONS")
      ->check(CLI::PositiveNumber);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Highlight-driven summarization workbench"};
  app.require_subcommand(1);
  Options o;

  auto* analyze = app.add_subcommand("analyze", "Print the sentence/token analysis of a text as JSON");
  analyze->add_option("input", o.input, "Text file, or - for stdin")->required();

  auto* suggest = app.add_subcommand("suggest", "Propose the most salient sentences as JSON");
  suggest->add_option("input", o.input, "Text file, or - for stdin")->required();
  suggest->add_option("--ratio", o.ratio, "Fraction of sentences to suggest")
      ->envname("SUMBENCH_SUGGESTION_RATIO")
      ->check(kUnitInterval);
  suggest->add_option("--scorer-endpoint", o.scorer_endpoint, "External sentence scorer URL")
      ->envname("SUMBENCH_SCORER_ENDPOINT");
  suggest->add_option("--timeout-ms", o.timeout_ms, "External scorer timeout");

  auto* consolidate = app.add_subcommand("consolidate", "Fuse highlighted content into a summary");
  consolidate->add_option("input", o.input, "Text file, or - for stdin")->required();
  consolidate->add_option("--highlights", o.highlights, "Spans file: one 'start end' pair per line")
      ->required();
  consolidate->add_option("--engine", o.engine, "baseline or external")
      ->check(CLI::IsMember({"baseline", "external"}));
  consolidate->add_option("--endpoint", o.endpoint, "External model URL")
      ->envname("SUMBENCH_MODEL_ENDPOINT");
  consolidate->add_option("--timeout-ms", o.timeout_ms, "External model timeout");

  auto* align = app.add_subcommand("align", "Align summary sentences to source text as JSON");
  align->add_option("source", o.source, "Source text file")->required();
  align->add_option("summary", o.summary, "Summary text file")->required();
  align->add_option("--highlights", o.highlights, "Spans file over the source");
  align->add_flag("--decisions", o.decisions, "Include every LCS decision, rejected ones too");
  add_alignment_flags(align, o);

  auto* serve = app.add_subcommand("serve", "Run the REST session service");
  serve->add_option("--addr", o.addr, "host:port to listen on (port 0 picks one)")
      ->envname("SUMBENCH_ADDR");
  serve->add_option("--data-dir", o.data_dir, "Directory for session files")
      ->envname("SUMBENCH_DATA_DIR");
  serve->add_option("--model-endpoint", o.endpoint, "External consolidation model URL")
      ->envname("SUMBENCH_MODEL_ENDPOINT");
  serve->add_option("--scorer-endpoint", o.scorer_endpoint, "External sentence scorer URL")
      ->envname("SUMBENCH_SCORER_ENDPOINT");
  serve->add_option("--ratio", o.ratio, "Fraction of sentences to suggest")
      ->envname("SUMBENCH_SUGGESTION_RATIO")
      ->check(kUnitInterval);
  serve->add_option("--timeout-ms", o.timeout_ms, "External model timeout");
  add_alignment_flags(serve, o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*analyze) return cmd_analyze(o);
    if (*suggest) return cmd_suggest(o);
    if (*consolidate) return cmd_consolidate(o);
    if (*align) return cmd_align(o);
    if (*serve) return cmd_serve(o);
  } catch (const UsageError& e) {
    std::cerr << "sumbench: " << e.what() << '\n';
    return kExitUsage;
  } catch (const InputError& e) {
    std::cerr << "sumbench: " << e.what() << '\n';
    return kExitInput;
  } catch (const sumbench::TransportError& e) {
    std::cerr << "sumbench: " << e.what() << " (fallback: " << sumbench::TransportError::fallback()
              << ")\n";
    return kExitTransport;
  } catch (const sumbench::Error& e) {
    std::cerr << "sumbench: " << sumbench::to_string(e.code()) << ": " << e.what() << '\n';
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "sumbench: " << e.what() << '\n';
    return kExitInput;
  }
  return kExitUsage;
}
