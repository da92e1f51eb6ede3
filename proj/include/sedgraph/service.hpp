#pragma once

// HTTP front door over an immutable graph. Reads never take a lock; the
// feedback log is the only write path and is serialized by its own mutex.

#include <fcntl.h>
#include <unistd.h>

#include <cerrno>
#include <charconv>
#include <chrono>
#include <cstring>
#include <ctime>
#include <fstream>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "sedgraph/classifier.hpp"
#include "sedgraph/entry.hpp"
#include "sedgraph/errors.hpp"
#include "sedgraph/ingest.hpp"
#include "sedgraph/lexicon.hpp"

namespace sedgraph {

enum class FeedbackKind { error, lacuna, suggestion };

inline std::string_view to_string(FeedbackKind k) {
  switch (k) {
    case FeedbackKind::error: return "error";
    case FeedbackKind::lacuna: return "lacuna";
    case FeedbackKind::suggestion: return "suggestion";
  }
  return "error";
}

inline std::optional<FeedbackKind> parse_feedback_kind(std::string_view s) {
  if (s == "error") return FeedbackKind::error;
  if (s == "lacuna") return FeedbackKind::lacuna;
  if (s == "suggestion") return FeedbackKind::suggestion;
  return std::nullopt;
}

inline constexpr std::size_t kMaxFeedbackBody = 4096;  // codepoints

struct FeedbackReport {
  long long id = 0;
  FeedbackKind kind = FeedbackKind::error;
  std::optional<std::string> target;
  std::string body;
  std::string received_at;  // UTC, ISO 8601
  friend bool operator==(const FeedbackReport&, const FeedbackReport&) = default;
};

inline std::string utc_timestamp(std::chrono::system_clock::time_point t = std::chrono::system_clock::now()) {
  const std::time_t secs = std::chrono::system_clock::to_time_t(t);
  std::tm tm{};
  gmtime_r(&secs, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

inline std::string feedback_line(const FeedbackReport& r) {
  nlohmann::ordered_json j;
  j["kind"] = "feedback";
  j["id"] = r.id;
  j["report_kind"] = std::string(to_string(r.kind));
  if (r.target) j["target"] = *r.target;
  j["body"] = r.body;
  j["received_at"] = r.received_at;
  return j.dump(-1, ' ', false);
}

inline std::optional<FeedbackReport> parse_feedback_line(std::string_view line) {
  try {
    auto j = nlohmann::json::parse(line);
    if (!j.is_object() || j.value("kind", "") != "feedback") return std::nullopt;
    auto kind = parse_feedback_kind(j.at("report_kind").get<std::string>());
    if (!kind) return std::nullopt;
    FeedbackReport r;
    r.id = j.at("id").get<long long>();
    r.kind = *kind;
    if (j.contains("target")) r.target = j["target"].get<std::string>();
    r.body = j.at("body").get<std::string>();
    r.received_at = j.value("received_at", "");
    return r;
  } catch (const nlohmann::json::exception&) {
    return std::nullopt;
  }
}

/// Append-only feedback log. Ids continue from the largest id found on disk.
/// An empty path keeps reports in memory only.
class FeedbackStore {
 public:
  explicit FeedbackStore(std::string path = {}) : path_(std::move(path)) {
    if (path_.empty()) return;
    std::ifstream in(path_, std::ios::binary);
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty() || line[0] == '#') continue;
      if (auto r = parse_feedback_line(line)) {
        next_id_ = std::max(next_id_, r->id + 1);
        reports_.push_back(std::move(*r));
      } else {
        ++skipped_lines_;
      }
    }
  }

  FeedbackReport append(FeedbackKind kind, std::optional<std::string> target, std::string body) {
    std::lock_guard lock(mu_);
    FeedbackReport r{next_id_, kind, std::move(target), std::move(body), utc_timestamp()};
    if (!path_.empty()) write_durably(feedback_line(r) + '\n');
    ++next_id_;
    reports_.push_back(r);
    return r;
  }

  std::vector<FeedbackReport> reports() const {
    std::lock_guard lock(mu_);
    return reports_;
  }

  const std::string& path() const noexcept { return path_; }
  std::size_t skipped_lines() const noexcept { return skipped_lines_; }

 private:
  void write_durably(const std::string& line) {
    const int fd = ::open(path_.c_str(), O_WRONLY | O_APPEND | O_CREAT | O_CLOEXEC, 0644);
    if (fd < 0) throw IoError("cannot open feedback log " + path_ + ": " + std::strerror(errno));
    std::size_t done = 0;
    while (done < line.size()) {
      const auto n = ::write(fd, line.data() + done, line.size() - done);
      if (n < 0) {
        if (errno == EINTR) continue;
        ::close(fd);
        throw IoError("cannot write feedback log " + path_);
      }
      done += static_cast<std::size_t>(n);
    }
    ::fsync(fd);
    ::close(fd);
  }

  std::string path_;
  mutable std::mutex mu_;
  long long next_id_ = 1;
  std::vector<FeedbackReport> reports_;
  std::size_t skipped_lines_ = 0;
};

inline std::string default_feedback_log(const std::string& lexicon_path) {
  const auto dot = lexicon_path.rfind(".sedl");
  if (dot != std::string::npos && dot + 5 == lexicon_path.size()) {
    return lexicon_path.substr(0, dot) + ".feedback.sedl";
  }
  return lexicon_path + ".feedback.sedl";
}

struct ServiceOptions {
  std::string post_origin;  // allowed CORS origin for POST; empty = same-origin only
  int max_depth = 32;       // upper bound accepted for ?depth=
};

class Service {
 public:
  Service(const LexicalGraph& graph, FeedbackStore& feedback, ServiceOptions options = {})
      : graph_(graph), feedback_(feedback), options_(std::move(options)), catalog_body_(to_json(catalog(graph_)).dump(-1, ' ', false)) {
    routes();
  }

  httplib::Server& server() { return server_; }

  bool bind(const std::string& host, int port) { return server_.bind_to_port(host, port); }
  int bind_any(const std::string& host) { return server_.bind_to_any_port(host); }
  bool listen_after_bind() { return server_.listen_after_bind(); }
  void stop() { server_.stop(); }
  void wait_until_ready() const { server_.wait_until_ready(); }

 private:
  static void json_reply(httplib::Response& res, int status, const std::string& body) {
    res.status = status;
    res.set_content(body, "application/json; charset=utf-8");
  }

  static void error_reply(httplib::Response& res, int status, const std::string& message) {
    nlohmann::ordered_json j;
    j["error"] = message;
    json_reply(res, status, j.dump(-1, ' ', false));
  }

  static std::optional<long long> int_param(const httplib::Request& req, const char* key, long long fallback,
                                            bool& bad) {
    if (!req.has_param(key)) return fallback;
    const auto s = req.get_param_value(key);
    long long v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) {
      bad = true;
      return std::nullopt;
    }
    return v;
  }

  void routes() {
    server_.set_post_routing_handler([this](const httplib::Request& req, httplib::Response& res) {
      if (req.method == "GET") {
        res.set_header("Access-Control-Allow-Origin", "*");
      } else if (!options_.post_origin.empty()) {
        res.set_header("Access-Control-Allow-Origin", options_.post_origin);
        res.set_header("Vary", "Origin");
      }
    });
    server_.Options("/feedback", [this](const httplib::Request&, httplib::Response& res) {
      res.status = 204;
      if (!options_.post_origin.empty()) {
        res.set_header("Access-Control-Allow-Methods", "POST");
        res.set_header("Access-Control-Allow-Headers", "Content-Type");
      }
    });

    server_.Get("/health", [this](const httplib::Request&, httplib::Response& res) {
      nlohmann::ordered_json j;
      j["status"] = "ok";
      j["lexemes"] = graph_.lexemes().size();
      j["senses"] = graph_.senses().size();
      j["edges"] = graph_.edges().size();
      json_reply(res, 200, j.dump(-1, ' ', false));
    });

    server_.Get("/catalog", [this](const httplib::Request&, httplib::Response& res) {
      json_reply(res, 200, catalog_body_);
    });

    server_.Get("/entry", [this](const httplib::Request& req, httplib::Response& res) {
      if (!req.has_param("head")) return error_reply(res, 400, "missing head");
      bool bad = false;
      const auto depth = int_param(req, "depth", 4, bad);
      const auto branch = int_param(req, "branch", 8, bad);
      if (bad) return error_reply(res, 400, "depth and branch must be integers");
      if (*depth < 0 || *depth > options_.max_depth) {
        return error_reply(res, 400, "depth must be in 0.." + std::to_string(options_.max_depth));
      }
      if (*branch < 1 || *branch > 1'000'000) return error_reply(res, 400, "branch must be >= 1");
      auto profile = parse_profile(req.has_param("profile") ? req.get_param_value("profile") : "standard");
      if (!profile) return error_reply(res, 400, "profile must be minimal, standard or full");
      ExpansionConfig config{static_cast<int>(*depth), static_cast<int>(*branch), true};
      try {
        json_reply(res, 200, serialize(assemble(graph_, req.get_param_value("head"), config, *profile)));
      } catch (const UnknownHead& e) {
        error_reply(res, 404, e.what());
      }
    });

    server_.Get("/search", [this](const httplib::Request& req, httplib::Response& res) {
      const auto lang = req.get_param_value("lang");
      if (!LanguageTag::valid(lang) || !graph_.has_language(LanguageTag(lang))) {
        return error_reply(res, 400, "unknown lang");
      }
      const auto q = req.get_param_value("q");
      if (!is_valid_utf8(q) || to_nfc(q).empty()) return error_reply(res, 400, "empty q");
      bool bad = false;
      const auto limit = int_param(req, "limit", 20, bad);
      if (bad || *limit < 1) return error_reply(res, 400, "limit must be a positive integer");
      auto out = nlohmann::ordered_json::array();
      for (const auto& lex : prefix_search(graph_, LanguageTag(lang), q, static_cast<std::size_t>(*limit))) {
        nlohmann::ordered_json j;
        j["id"] = lex.id.str();
        j["lemma"] = lex.lemma();
        j["pos"] = std::string(to_string(lex.pos()));
        out.push_back(std::move(j));
      }
      json_reply(res, 200, out.dump(-1, ' ', false));
    });

    server_.Post("/feedback", [this](const httplib::Request& req, httplib::Response& res) {
      nlohmann::json body;
      try {
        body = nlohmann::json::parse(req.body);
      } catch (const nlohmann::json::parse_error&) {
        return error_reply(res, 400, "body must be a JSON object");
      }
      if (!body.is_object()) return error_reply(res, 400, "body must be a JSON object");
      const auto kind_it = body.find("kind");
      std::optional<FeedbackKind> kind;
      if (kind_it != body.end() && kind_it->is_string()) kind = parse_feedback_kind(kind_it->get<std::string>());
      if (!kind) return error_reply(res, 400, "kind must be error, lacuna or suggestion");
      const auto text_it = body.find("body");
      if (text_it == body.end() || !text_it->is_string()) return error_reply(res, 400, "body text is required");
      auto text = text_it->get<std::string>();
      if (text.empty()) return error_reply(res, 400, "body text is empty");
      if (codepoint_count(text) > kMaxFeedbackBody) return error_reply(res, 400, "body text exceeds 4096 characters");

      std::optional<std::string> target;
      if (auto t = body.find("target"); t != body.end() && !t->is_null()) {
        if (!t->is_string() || !resolves(t->get<std::string>())) return error_reply(res, 404, "target not found");
        target = to_nfc(t->get<std::string>());
      }
      try {
        const auto report = feedback_.append(*kind, std::move(target), std::move(text));
        nlohmann::ordered_json j;
        j["id"] = report.id;
        json_reply(res, 201, j.dump());
      } catch (const IoError& e) {
        error_reply(res, 500, e.what());
      }
    });
  }

  bool resolves(const std::string& id) const {
    const auto key = to_nfc(id);
    if (auto s = SenseId::parse(key)) return graph_.find_sense(*s) != nullptr;
    if (auto l = LexemeId::parse(key)) return graph_.find_lexeme(*l) != nullptr;
    return false;
  }

  const LexicalGraph& graph_;
  FeedbackStore& feedback_;
  ServiceOptions options_;
  std::string catalog_body_;
  httplib::Server server_;
};

}  // namespace sedgraph
