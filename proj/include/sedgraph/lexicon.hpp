#pragma once

// Lexicon model: the immutable two-language lexical graph.

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "sedgraph/errors.hpp"
#include "sedgraph/ids.hpp"
#include "sedgraph/unicode.hpp"

namespace sedgraph {

// Unknown record fields survive ingestion and are re-emitted on export.
using Extras = nlohmann::json;

struct SynonymLink {
  LexemeId target;
  Extras extra = Extras::object();
  friend bool operator==(const SynonymLink&, const SynonymLink&) = default;
};

struct PhraseUnit {
  std::string text;
  std::optional<std::string> gloss;
  Extras extra = Extras::object();
  friend bool operator==(const PhraseUnit&, const PhraseUnit&) = default;
};

struct Citation {
  std::string quote;
  std::string source;
  Extras extra = Extras::object();
  friend bool operator==(const Citation&, const Citation&) = default;
};

struct Sense {
  SenseId id;
  std::string gloss;
  std::optional<std::string> domain;
  std::vector<SynonymLink> synonyms;
  std::vector<PhraseUnit> phrases;
  std::vector<Citation> citations;
  Extras extra = Extras::object();
  friend bool operator==(const Sense&, const Sense&) = default;
};

struct Lexeme {
  LexemeId id;
  std::vector<SenseId> senses;
  Extras extra = Extras::object();

  const LanguageTag& lang() const noexcept { return id.lang; }
  const std::string& lemma() const noexcept { return id.lemma; }
  PartOfSpeech pos() const noexcept { return id.pos; }

  friend bool operator==(const Lexeme&, const Lexeme&) = default;
};

struct EquivalenceEdge {
  SenseId from;
  SenseId to;
  int rank = 1;
  std::optional<std::string> note;
  Extras extra = Extras::object();
  friend bool operator==(const EquivalenceEdge&, const EquivalenceEdge&) = default;
};

// Raw material for a graph. No invariant is enforced on parts; the builder in
// ingest.hpp produces well-formed parts, validate_graph() reports on any.
struct GraphParts {
  std::vector<Lexeme> lexemes;
  std::vector<Sense> senses;
  std::vector<EquivalenceEdge> edges;
};

class LexicalGraph {
 public:
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  LexicalGraph() = default;

  // Sorts the parts into canonical order and builds the indexes. Records
  // that reference missing senses are kept in edges() but left out of the
  // adjacency lists.
  static LexicalGraph from_parts(GraphParts parts) {
    LexicalGraph g;
    g.lexemes_ = std::move(parts.lexemes);
    g.senses_ = std::move(parts.senses);
    g.edges_ = std::move(parts.edges);

    // The builder already delivers sorted parts; only sort when needed.
    auto sort = [](auto& v, auto less) {
      if (!std::is_sorted(v.begin(), v.end(), less)) std::stable_sort(v.begin(), v.end(), less);
    };
    sort(g.lexemes_, [](const Lexeme& a, const Lexeme& b) { return a.id < b.id; });
    sort(g.senses_, [](const Sense& a, const Sense& b) { return a.id < b.id; });
    sort(g.edges_, [](const EquivalenceEdge& a, const EquivalenceEdge& b) {
      if (a.from != b.from) return a.from < b.from;
      if (a.rank != b.rank) return a.rank < b.rank;
      return a.to < b.to;
    });

    std::set<LanguageTag> tags;
    for (const auto& lex : g.lexemes_) tags.insert(lex.lang());
    g.langs_.assign(tags.begin(), tags.end());

    g.out_.assign(g.senses_.size(), {});
    g.in_.assign(g.senses_.size(), {});
    for (std::size_t e = 0; e < g.edges_.size(); ++e) {
      const auto from = g.sense_pos(g.edges_[e].from);
      const auto to = g.sense_pos(g.edges_[e].to);
      if (from == npos || to == npos) continue;
      g.out_[from].push_back(e);
      g.in_[to].push_back(e);
    }
    for (auto& in : g.in_) {
      std::stable_sort(in.begin(), in.end(), [&g](std::size_t a, std::size_t b) {
        const auto& ea = g.edges_[a];
        const auto& eb = g.edges_[b];
        if (ea.from.lexeme.lemma != eb.from.lexeme.lemma) return ea.from.lexeme.lemma < eb.from.lexeme.lemma;
        if (ea.rank != eb.rank) return ea.rank < eb.rank;
        return ea.from < eb.from;
      });
    }
    return g;
  }

  // Sorted; at most two for a well-formed graph.
  const std::vector<LanguageTag>& langs() const noexcept { return langs_; }
  bool has_language(const LanguageTag& tag) const {
    return std::find(langs_.begin(), langs_.end(), tag) != langs_.end();
  }

  std::span<const Lexeme> lexemes() const noexcept { return lexemes_; }
  std::span<const Sense> senses() const noexcept { return senses_; }
  // Canonical order: (from, rank).
  std::span<const EquivalenceEdge> edges() const noexcept { return edges_; }

  // Binary search over the sorted parts; a duplicated id resolves to its first copy.
  std::size_t lexeme_pos(const LexemeId& id) const {
    auto it = std::lower_bound(lexemes_.begin(), lexemes_.end(), id,
                               [](const Lexeme& l, const LexemeId& key) { return l.id < key; });
    return it != lexemes_.end() && it->id == id ? static_cast<std::size_t>(it - lexemes_.begin()) : npos;
  }
  std::size_t sense_pos(const SenseId& id) const {
    auto it = std::lower_bound(senses_.begin(), senses_.end(), id,
                               [](const Sense& s, const SenseId& key) { return s.id < key; });
    return it != senses_.end() && it->id == id ? static_cast<std::size_t>(it - senses_.begin()) : npos;
  }

  const Lexeme* find_lexeme(const LexemeId& id) const {
    auto p = lexeme_pos(id);
    return p == npos ? nullptr : &lexemes_[p];
  }
  const Sense* find_sense(const SenseId& id) const {
    auto p = sense_pos(id);
    return p == npos ? nullptr : &senses_[p];
  }

  // Edge indexes into edges(), ascending rank.
  const std::vector<std::size_t>& out_edges(std::size_t sense) const { return out_[sense]; }
  // Edge indexes ordered by (from lemma, rank, from id).
  const std::vector<std::size_t>& in_edges(std::size_t sense) const { return in_[sense]; }

  std::size_t out_degree(const SenseId& id) const {
    auto p = sense_pos(id);
    if (p == npos) throw UnknownSense(id.str());
    return out_[p].size();
  }

  std::size_t find_edge(const SenseId& from, const SenseId& to) const {
    auto p = sense_pos(from);
    if (p == npos) return npos;
    for (auto e : out_[p]) {
      if (edges_[e].to == to) return e;
    }
    return npos;
  }

  bool empty() const noexcept { return lexemes_.empty() && senses_.empty() && edges_.empty(); }

  friend bool operator==(const LexicalGraph& a, const LexicalGraph& b) {
    return a.lexemes_ == b.lexemes_ && a.senses_ == b.senses_ && a.edges_ == b.edges_;
  }

 private:
  std::vector<LanguageTag> langs_;
  std::vector<Lexeme> lexemes_;
  std::vector<Sense> senses_;
  std::vector<EquivalenceEdge> edges_;
  std::vector<std::vector<std::size_t>> out_;
  std::vector<std::vector<std::size_t>> in_;
};

// ---------------------------------------------------------------------------
// Lookup

/// Exact-lemma lookup in one language, homonym index order.
inline std::vector<Lexeme> lookup_lemma(const LexicalGraph& graph, const LanguageTag& lang, std::string_view lemma) {
  if (!graph.has_language(lang)) throw UnknownLanguage(lang.str());
  if (!is_valid_utf8(lemma)) return {};
  const std::string key = to_nfc(lemma);
  auto lexemes = graph.lexemes();
  auto lo = std::lower_bound(lexemes.begin(), lexemes.end(), key, [&](const Lexeme& l, const std::string& k) {
    if (l.lang() != lang) return l.lang() < lang;
    return l.lemma() < k;
  });
  std::vector<Lexeme> out;
  for (; lo != lexemes.end() && lo->lang() == lang && lo->lemma() == key; ++lo) out.push_back(*lo);
  return out;
}

/// Lexemes of one language whose lemma starts with `prefix`, in lemma order.
inline std::vector<Lexeme> prefix_search(const LexicalGraph& graph, const LanguageTag& lang, std::string_view prefix,
                                         std::size_t limit) {
  if (!graph.has_language(lang)) throw UnknownLanguage(lang.str());
  std::vector<Lexeme> out;
  if (!is_valid_utf8(prefix)) return out;
  const std::string key = to_nfc(prefix);
  auto lexemes = graph.lexemes();
  auto it = std::lower_bound(lexemes.begin(), lexemes.end(), key, [&](const Lexeme& l, const std::string& k) {
    if (l.lang() != lang) return l.lang() < lang;
    return l.lemma() < k;
  });
  for (; it != lexemes.end() && out.size() < limit; ++it) {
    if (it->lang() != lang || it->lemma().compare(0, key.size(), key) != 0) break;
    out.push_back(*it);
  }
  return out;
}

/// Edges leaving `sense`, ascending rank. Empty means the sense is a lacuna.
inline std::vector<EquivalenceEdge> out_equivalents(const LexicalGraph& graph, const SenseId& sense) {
  const auto p = graph.sense_pos(sense);
  if (p == LexicalGraph::npos) throw UnknownSense(sense.str());
  std::vector<EquivalenceEdge> out;
  for (auto e : graph.out_edges(p)) out.push_back(graph.edges()[e]);
  return out;
}

/// Edges arriving at `sense`, ordered by (source lemma, rank).
inline std::vector<EquivalenceEdge> in_equivalents(const LexicalGraph& graph, const SenseId& sense) {
  const auto p = graph.sense_pos(sense);
  if (p == LexicalGraph::npos) throw UnknownSense(sense.str());
  std::vector<EquivalenceEdge> out;
  for (auto e : graph.in_edges(p)) out.push_back(graph.edges()[e]);
  return out;
}

// ---------------------------------------------------------------------------
// Validation

namespace issue {
inline constexpr std::string_view dangling = "dangling reference";
inline constexpr std::string_view same_language = "same-language edge";
inline constexpr std::string_view duplicate_edge = "duplicate edge";
inline constexpr std::string_view rank_gap = "rank gap";
inline constexpr std::string_view not_nfc = "NFC violation";
inline constexpr std::string_view duplicate_id = "duplicate id";
inline constexpr std::string_view missing_gloss = "missing gloss";
inline constexpr std::string_view empty_lexeme = "empty lexeme";
inline constexpr std::string_view cross_language_synonym = "cross-language synonym";
inline constexpr std::string_view invalid_field = "invalid field";
inline constexpr std::string_view too_many_languages = "too many languages";
inline constexpr std::string_view parse_error = "parse error";
}  // namespace issue

struct ValidationIssue {
  std::string code;
  std::string locus;  // "line N" for ingested records, otherwise the record's identity
  std::string message;
  friend bool operator==(const ValidationIssue&, const ValidationIssue&) = default;
};

struct ValidationReport {
  std::vector<ValidationIssue> issues;

  bool empty() const noexcept { return issues.empty(); }
  std::size_t size() const noexcept { return issues.size(); }
  void add(std::string_view code, std::string locus, std::string message) {
    issues.push_back({std::string(code), std::move(locus), std::move(message)});
  }
  std::size_t count(std::string_view code) const {
    return static_cast<std::size_t>(
        std::count_if(issues.begin(), issues.end(), [&](const ValidationIssue& i) { return i.code == code; }));
  }
};

inline std::string edge_locus(const EquivalenceEdge& e) { return "equiv " + e.from.str() + " -> " + e.to.str(); }

/// Checks every graph invariant; an empty report means the graph is well-formed.
inline ValidationReport validate_graph(const LexicalGraph& graph) {
  ValidationReport report;
  if (graph.langs().size() > 2) {
    report.add(issue::too_many_languages, "graph", std::to_string(graph.langs().size()) + " language tags");
  }

  std::set<std::string> seen;
  for (const auto& lex : graph.lexemes()) {
    const auto locus = "lexeme " + lex.id.str();
    if (!seen.insert(lex.id.str()).second) report.add(issue::duplicate_id, locus, "lexeme declared twice");
    if (!LanguageTag::valid(lex.lang().str())) report.add(issue::invalid_field, locus, "bad language tag");
    if (lex.lemma().empty()) report.add(issue::invalid_field, locus, "empty lemma");
    if (!is_valid_utf8(lex.lemma()) || !is_nfc(lex.lemma())) report.add(issue::not_nfc, locus, "lemma is not NFC");
    if (lex.id.homonym < 1) report.add(issue::invalid_field, locus, "homonym index < 1");
    if (lex.senses.empty()) report.add(issue::empty_lexeme, locus, "lexeme has no senses");
    for (const auto& s : lex.senses) {
      if (s.lexeme != lex.id) report.add(issue::invalid_field, locus, "sense " + s.str() + " belongs to another lexeme");
      if (!graph.find_sense(s)) report.add(issue::dangling, locus, "sense " + s.str() + " not found");
    }
    if (lex.senses.size() > 1) {
      for (const auto& s : lex.senses) {
        const auto* sense = graph.find_sense(s);
        if (sense && sense->gloss.empty()) report.add(issue::missing_gloss, "sense " + s.str(), "polysemous lexeme needs glosses");
      }
    }
  }

  seen.clear();
  for (const auto& sense : graph.senses()) {
    const auto locus = "sense " + sense.id.str();
    if (!seen.insert(sense.id.str()).second) report.add(issue::duplicate_id, locus, "sense declared twice");
    if (sense.id.number < 1) report.add(issue::invalid_field, locus, "sense number < 1");
    const auto* owner = graph.find_lexeme(sense.id.lexeme);
    if (!owner) {
      report.add(issue::dangling, locus, "lexeme " + sense.id.lexeme.str() + " not found");
    } else if (std::find(owner->senses.begin(), owner->senses.end(), sense.id) == owner->senses.end()) {
      report.add(issue::dangling, locus, "sense not listed by its lexeme");
    }
    for (const auto& syn : sense.synonyms) {
      if (!graph.find_lexeme(syn.target)) {
        report.add(issue::dangling, locus, "synonym " + syn.target.str() + " not found");
      } else if (syn.target.lang != sense.id.lang()) {
        report.add(issue::cross_language_synonym, locus, "synonym " + syn.target.str() + " is in another language");
      }
    }
    for (const auto& ph : sense.phrases) {
      if (ph.text.empty()) report.add(issue::invalid_field, locus, "empty phrase text");
    }
    for (const auto& c : sense.citations) {
      if (c.quote.empty()) report.add(issue::invalid_field, locus, "empty citation quote");
    }
  }

  std::set<std::pair<std::string, std::string>> pairs;
  std::map<std::string, std::vector<int>> ranks;
  for (const auto& e : graph.edges()) {
    const auto locus = edge_locus(e);
    const bool from_ok = graph.find_sense(e.from) != nullptr;
    const bool to_ok = graph.find_sense(e.to) != nullptr;
    if (!from_ok || !to_ok) {
      report.add(issue::dangling, locus, (!from_ok ? e.from.str() : e.to.str()) + " not found");
    }
    if (e.from.lang() == e.to.lang()) report.add(issue::same_language, locus, "edge does not cross languages");
    if (!pairs.emplace(e.from.str(), e.to.str()).second) report.add(issue::duplicate_edge, locus, "edge declared twice");
    ranks[e.from.str()].push_back(e.rank);
  }
  for (auto& [from, rs] : ranks) {
    std::sort(rs.begin(), rs.end());
    for (std::size_t i = 0; i < rs.size(); ++i) {
      if (rs[i] != static_cast<int>(i) + 1) {
        report.add(issue::rank_gap, "sense " + from, "out-edge ranks are not 1.." + std::to_string(rs.size()));
        break;
      }
    }
  }
  return report;
}

}  // namespace sedgraph
