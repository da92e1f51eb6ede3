// sedgraph: build, inspect and serve comparative bilingual lexicons.
//
// Exit codes: 0 success, 1 findings or unknown lookups, 2 I/O, format or
// usage errors. Data goes to stdout, diagnostics to stderr.

#include <pthread.h>
#include <signal.h>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include "sedgraph/sedgraph.hpp"
#include "sedgraph/service.hpp"

namespace {

using namespace sedgraph;

constexpr int kOk = 0;
constexpr int kFindings = 1;
constexpr int kFailure = 2;

void print_report(const ValidationReport& report) {
  for (const auto& i : report.issues) std::cerr << i.locus << ": " << i.code << ": " << i.message << '\n';
}

std::optional<BuildResult> load_or_complain(const std::string& path) {
  try {
    return load_lexicon(path);
  } catch (const IoError& e) {
    std::cerr << "sedgraph: " << e.what() << '\n';
  } catch (const FatalFormat& e) {
    std::cerr << "sedgraph: " << path << ": " << e.what() << '\n';
  }
  return std::nullopt;
}

int cmd_build(const std::string& input, const std::string& output) {
  auto built = load_or_complain(input);
  if (!built) return kFailure;
  print_report(built->report);
  if (!output.empty()) {
    std::ofstream out(output, std::ios::binary | std::ios::trunc);
    if (!out) {
      std::cerr << "sedgraph: cannot write " << output << '\n';
      return kFailure;
    }
    out << export_text(built->graph);
    if (!out.flush()) {
      std::cerr << "sedgraph: cannot write " << output << '\n';
      return kFailure;
    }
  }
  return built->report.empty() ? kOk : kFindings;
}

int cmd_entry(const std::string& input, const std::string& head, int depth, int branch, const std::string& profile) {
  const auto prof = parse_profile(profile);
  if (!prof) {
    std::cerr << "sedgraph: unknown profile " << profile << '\n';
    return kFailure;
  }
  if (depth < 0 || branch < 1) {
    std::cerr << "sedgraph: --depth must be >= 0 and --branch >= 1\n";
    return kFailure;
  }
  auto built = load_or_complain(input);
  if (!built) return kFailure;
  try {
    std::cout << render_text(assemble(built->graph, head, ExpansionConfig{depth, branch, true}, *prof));
  } catch (const UnknownHead& e) {
    std::cerr << "sedgraph: " << e.what() << '\n';
    return kFindings;
  }
  return kOk;
}

int cmd_catalog(const std::string& input, const std::string& format) {
  auto built = load_or_complain(input);
  if (!built) return kFailure;
  const auto cat = catalog(built->graph);
  if (format == "records") {
    nlohmann::ordered_json total;
    total["kind"] = "catalog_total";
    total["pairs"] = cat.total_pairs;
    total["senses"] = cat.total_senses;
    std::cout << total.dump() << '\n';
    for (auto c : kPairClasses) {
      nlohmann::ordered_json j;
      j["kind"] = "catalog_count";
      j["class"] = std::string(to_string(c));
      j["count"] = cat.count(c);
      std::cout << j.dump() << '\n';
    }
    nlohmann::ordered_json lac;
    lac["kind"] = "catalog_count";
    lac["class"] = "LACUNA";
    lac["count"] = cat.lacuna_count();
    std::cout << lac.dump() << '\n';
    for (const auto& [lang, list] : cat.lacunae) {
      for (const auto& s : list) {
        nlohmann::ordered_json j;
        j["kind"] = "lacuna";
        j["lang"] = lang;
        j["sense"] = s.str();
        std::cout << j.dump(-1, ' ', false) << '\n';
      }
    }
    return kOk;
  }
  std::cout << "pairs\t" << cat.total_pairs << '\n' << "senses\t" << cat.total_senses << '\n';
  for (auto c : kPairClasses) std::cout << to_string(c) << '\t' << cat.count(c) << '\n';
  std::cout << "LACUNA\t" << cat.lacuna_count() << '\n';
  for (const auto& [lang, list] : cat.lacunae) {
    for (const auto& s : list) std::cout << "lacuna\t" << lang << '\t' << s.str() << '\n';
  }
  return kOk;
}

int cmd_search(const std::string& input, const std::string& lang, const std::string& q) {
  auto built = load_or_complain(input);
  if (!built) return kFailure;
  if (!LanguageTag::valid(lang) || !built->graph.has_language(LanguageTag(lang))) {
    std::cerr << "sedgraph: unknown language " << lang << '\n';
    return kFindings;
  }
  for (const auto& lex : prefix_search(built->graph, LanguageTag(lang), q, built->graph.lexemes().size())) {
    std::cout << lex.lemma() << '\t' << lex.id.str() << '\n';
  }
  return kOk;
}

int cmd_serve(std::string input, const std::string& bind, int port, std::string feedback_log,
              const std::string& post_origin) {
  if (const char* env = std::getenv("SEDGRAPH_LEXICON"); env && *env) input = env;
  if (input.empty()) {
    std::cerr << "sedgraph: no lexicon given (positional, --lexicon or SEDGRAPH_LEXICON)\n";
    return kFailure;
  }
  auto built = load_or_complain(input);
  if (!built) return kFailure;
  if (!built->report.empty()) {
    std::cerr << "sedgraph: warning: " << built->report.size() << " validation finding(s)\n";
    print_report(built->report);
  }
  if (feedback_log.empty()) feedback_log = default_feedback_log(input);

  // Signals are handled on a dedicated thread so the server can stop cleanly.
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  FeedbackStore feedback(feedback_log);
  Service service(built->graph, feedback, ServiceOptions{post_origin});
  if (!service.bind(bind, port)) {
    std::cerr << "sedgraph: cannot bind " << bind << ':' << port << '\n';
    return kFailure;
  }
  std::thread waiter([&] {
    int sig = 0;
    sigwait(&signals, &sig);
    service.stop();
  });
  std::cerr << "sedgraph: serving " << input << " on " << bind << ':' << port << '\n';
  const bool ok = service.listen_after_bind();
  // Wake the waiter if the server stopped on its own.
  pthread_kill(waiter.native_handle(), SIGTERM);
  waiter.join();
  return ok ? kOk : kFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sedgraph: comparative bilingual lexicon engine"};
  app.require_subcommand(1);

  std::string input, output, head, profile = "standard", format = "text", lang, query;
  std::string lexicon, bind = "127.0.0.1", feedback_log, post_origin;
  int depth = 4, branch = 8, port = 8080;

  auto* build = app.add_subcommand("build", "validate a lexicon and optionally write its canonical export");
  build->add_option("input", input, "lexicon (.sedl)")->required();
  build->add_option("-o,--output", output, "canonical export path");

  auto* entry = app.add_subcommand("entry", "print an entry as text");
  entry->add_option("input", input, "lexicon (.sedl)")->required();
  entry->add_option("--head", head, "sense or lexeme id")->required();
  entry->add_option("--depth", depth, "maximum chain depth");
  entry->add_option("--branch", branch, "maximum children per pair");
  entry->add_option("--profile", profile, "minimal, standard or full");

  auto* cat = app.add_subcommand("catalog", "print the correspondence catalog");
  cat->add_option("input", input, "lexicon (.sedl)")->required();
  cat->add_option("--format", format, "text or records")->check(CLI::IsMember({"text", "records"}));

  auto* search = app.add_subcommand("search", "prefix search over lemmas");
  search->add_option("input", input, "lexicon (.sedl)")->required();
  search->add_option("--lang", lang, "language tag")->required();
  search->add_option("--q", query, "lemma prefix")->required();

  auto* serve = app.add_subcommand("serve", "run the HTTP service");
  serve->add_option("input", input, "lexicon (.sedl)");
  serve->add_option("--lexicon", lexicon, "lexicon (.sedl); SEDGRAPH_LEXICON overrides");
  serve->add_option("--port", port, "port (default 8080)");
  serve->add_option("--bind", bind, "address (default 127.0.0.1)");
  serve->add_option("--feedback-log", feedback_log, "feedback log path (default: beside the lexicon)");
  serve->add_option("--allow-origin", post_origin, "origin allowed to POST /feedback cross-site");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kFailure;
  }

  if (*build) return cmd_build(input, output);
  if (*entry) return cmd_entry(input, head, depth, branch, profile);
  if (*cat) return cmd_catalog(input, format);
  if (*search) return cmd_search(input, lang, query);
  if (*serve) return cmd_serve(input.empty() ? lexicon : input, bind, port, feedback_log, post_origin);
  return kFailure;
}
