#pragma once

// Shared test support: fixture paths, random lexicon generators and the
// naive oracles the implementation is checked against. The oracles work on
// plain edge lists and never touch the graph's indexes.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "sedgraph/sedgraph.hpp"

namespace sedgraph::testing {

inline std::string seed_path() { return SEDGRAPH_SEED_PATH; }
inline std::string golden_dir() { return SEDGRAPH_GOLDEN_DIR; }

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

inline LexicalGraph seed_graph() { return load_lexicon(seed_path()).graph; }

inline SenseId sid(const std::string& s) {
  auto id = SenseId::parse(s);
  if (!id) throw std::invalid_argument("bad sense id in test: " + s);
  return *id;
}

inline LexemeId lid(const std::string& s) {
  auto id = LexemeId::parse(s);
  if (!id) throw std::invalid_argument("bad lexeme id in test: " + s);
  return *id;
}

class TempDir {
 public:
  TempDir() {
    static std::mt19937_64 rng{std::random_device{}()};
    path_ = std::filesystem::temp_directory_path() / ("sedgraph-test-" + std::to_string(rng()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  std::string file(const std::string& name) const { return (path_ / name).string(); }

 private:
  std::filesystem::path path_;
};

inline void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
}

// ---------------------------------------------------------------------------
// Small graphs built directly from parts: sense i is "<lang>:s<i>:other:1#1".

struct SmallEdge {
  int from;
  int to;
  int rank;
};

struct SmallGraph {
  std::vector<bool> in_b;  // language of each sense: false = "aa", true = "bb"
  std::vector<SmallEdge> edges;

  SenseId sense(int i) const {
    return SenseId{LexemeId{LanguageTag(in_b[static_cast<std::size_t>(i)] ? "bb" : "aa"), "s" + std::to_string(i),
                            PartOfSpeech::other, 1},
                   1};
  }

  LexicalGraph build() const {
    GraphParts parts;
    for (int i = 0; i < static_cast<int>(in_b.size()); ++i) {
      const auto s = sense(i);
      parts.lexemes.push_back(Lexeme{s.lexeme, {s}, Extras::object()});
      parts.senses.push_back(Sense{s, "", std::nullopt, {}, {}, {}, Extras::object()});
    }
    for (const auto& e : edges) {
      parts.edges.push_back(EquivalenceEdge{sense(e.from), sense(e.to), e.rank, std::nullopt, Extras::object()});
    }
    return LexicalGraph::from_parts(std::move(parts));
  }
};

/// Random cross-language graph; each sense's out-edges get a random dense
/// rank order.
inline SmallGraph random_small_graph(std::mt19937_64& rng, int max_senses, double density) {
  std::uniform_int_distribution<int> size_dist(2, max_senses);
  std::bernoulli_distribution coin(0.5), edge(density);
  SmallGraph g;
  const int n = size_dist(rng);
  for (int i = 0; i < n; ++i) g.in_b.push_back(coin(rng));
  g.in_b[0] = false;
  g.in_b[1] = true;
  for (int f = 0; f < n; ++f) {
    std::vector<int> targets;
    for (int t = 0; t < n; ++t) {
      if (g.in_b[static_cast<std::size_t>(f)] != g.in_b[static_cast<std::size_t>(t)] && edge(rng)) targets.push_back(t);
    }
    std::shuffle(targets.begin(), targets.end(), rng);
    for (std::size_t r = 0; r < targets.size(); ++r) g.edges.push_back({f, targets[r], static_cast<int>(r) + 1});
  }
  return g;
}

// ---------------------------------------------------------------------------
// Random full lexicons as record streams.

struct LexiconShape {
  int max_lexemes = 500;
  int max_edges = 2000;
};

inline std::string random_lemma(std::mt19937_64& rng, bool cyrillic) {
  static const std::vector<std::string> cyr = {"а", "б", "в", "г", "д", "е", "ж", "з", "и", "к", "л",
                                               "м", "н", "о", "п", "р", "с", "т", "у", "ъ", "я", "ё", "й"};
  static const std::vector<std::string> lat = {"a", "b", "c", "d", "e", "f", "g", "h", "é", "ñ", "o", "u"};
  const auto& alphabet = cyrillic ? cyr : lat;
  std::uniform_int_distribution<std::size_t> pick(0, alphabet.size() - 1);
  std::uniform_int_distribution<int> len(1, 8), words(1, 3);
  std::string out;
  const int w = words(rng);
  for (int i = 0; i < w; ++i) {
    if (i) out += ' ';
    const int l = len(rng);
    for (int j = 0; j < l; ++j) out += alphabet[pick(rng)];
  }
  return out;
}

/// A valid lexicon as explicit records (every rank and position given).
inline std::vector<Record> random_lexicon(std::mt19937_64& rng, const LexiconShape& shape = {}) {
  std::uniform_int_distribution<int> lex_count(2, shape.max_lexemes);
  std::uniform_int_distribution<int> sense_count(1, 3), small(0, 2), pos_pick(0, 5);
  std::bernoulli_distribution coin(0.5), rare(0.1);
  const LanguageTag a("ru"), b("bg");

  std::vector<Record> out;
  std::set<std::string> lex_ids;
  std::vector<LexemeId> lexemes;
  std::vector<SenseId> senses;
  const int n = lex_count(rng);
  for (int i = 0; i < n; ++i) {
    const bool first = (i % 2) == 0;
    LexemeId id{first ? a : b, random_lemma(rng, first || coin(rng)), static_cast<PartOfSpeech>(pos_pick(rng)),
                rare(rng) ? 2 : 1};
    if (!lex_ids.insert(id.str()).second) continue;
    Extras extra = Extras::object();
    if (rare(rng)) extra["source_dict"] = "gen-" + std::to_string(i);
    out.push_back({LexemeDecl{id, extra}});
    lexemes.push_back(id);
    const int k = sense_count(rng);
    for (int s = 1; s <= k; ++s) {
      SenseId sense{id, s};
      std::string gloss = (k > 1 || coin(rng)) ? random_lemma(rng, first) : "";
      std::optional<std::string> domain;
      if (rare(rng)) domain = "dom" + std::to_string(s);
      out.push_back({SenseDecl{sense, gloss, domain, Extras::object()}});
      senses.push_back(sense);
    }
  }

  std::vector<SenseId> in_a, in_b;
  for (const auto& s : senses) (s.lang() == a ? in_a : in_b).push_back(s);
  std::uniform_int_distribution<int> edge_budget(0, shape.max_edges);
  const int budget = (in_a.empty() || in_b.empty()) ? 0 : edge_budget(rng);
  std::set<std::pair<std::string, std::string>> seen;
  std::map<std::string, int> next_rank;
  for (int e = 0; e < budget; ++e) {
    const bool from_a = coin(rng);
    const auto& src = from_a ? in_a : in_b;
    const auto& dst = from_a ? in_b : in_a;
    const auto& f = src[std::uniform_int_distribution<std::size_t>(0, src.size() - 1)(rng)];
    const auto& t = dst[std::uniform_int_distribution<std::size_t>(0, dst.size() - 1)(rng)];
    if (!seen.emplace(f.str(), t.str()).second) continue;
    const int rank = ++next_rank[f.str()];
    std::optional<std::string> note;
    if (rare(rng)) note = "note " + std::to_string(e);
    out.push_back({EquivDecl{f, t, rank, note, Extras::object()}});
  }

  for (const auto& s : senses) {
    const int syn = small(rng), phr = small(rng), cit = small(rng);
    int pos = 0;
    for (int i = 0; i < syn; ++i) {
      const auto& target = lexemes[std::uniform_int_distribution<std::size_t>(0, lexemes.size() - 1)(rng)];
      if (target.lang != s.lang()) continue;
      out.push_back({SynonymDecl{s, target, ++pos, Extras::object()}});
    }
    for (int i = 0; i < phr; ++i) {
      std::optional<std::string> gloss;
      if (coin(rng)) gloss = random_lemma(rng, true);
      out.push_back({PhraseDecl{s, random_lemma(rng, true), gloss, i + 1, Extras::object()}});
    }
    for (int i = 0; i < cit; ++i) {
      out.push_back({CitationDecl{s, random_lemma(rng, true) + " \"q\"", "corpus-" + std::to_string(i), i + 1,
                                  Extras::object()}});
    }
  }
  for (std::size_t i = 0; i < out.size(); ++i) out[i].locus = i + 1;
  return out;
}

// ---------------------------------------------------------------------------
// Oracles

/// Edge list snapshot, in no particular order.
inline std::vector<EquivalenceEdge> raw_edges(const LexicalGraph& g) {
  std::vector<EquivalenceEdge> out(g.edges().begin(), g.edges().end());
  std::reverse(out.begin(), out.end());
  return out;
}

/// Naive recursive expansion with an explicit path vector.
inline void oracle_expand_from(const std::vector<EquivalenceEdge>& edges, std::vector<SenseId>& path,
                               const SenseId& current, int depth, const ExpansionConfig& cfg,
                               std::vector<NodePair>& out) {
  if (depth > cfg.max_depth) return;
  std::vector<EquivalenceEdge> outs;
  for (const auto& e : edges) {
    if (e.from == current) outs.push_back(e);
  }
  std::sort(outs.begin(), outs.end(), [](const auto& x, const auto& y) { return x.rank < y.rank; });
  if (outs.size() > static_cast<std::size_t>(cfg.max_branch)) outs.resize(static_cast<std::size_t>(cfg.max_branch));
  for (const auto& e : outs) {
    const bool closure = std::find(path.begin(), path.end(), e.to) != path.end();
    if (closure) {
      if (cfg.include_closures) out.push_back(NodePair{e.from, e.to, e.rank, depth, true});
      continue;
    }
    out.push_back(NodePair{e.from, e.to, e.rank, depth, false});
    path.push_back(e.to);
    oracle_expand_from(edges, path, e.to, depth + 1, cfg, out);
    path.pop_back();
  }
}

/// Sorted pair multiset of the naive expansion.
inline std::vector<NodePair> oracle_expand(const std::vector<EquivalenceEdge>& edges, const SenseId& head,
                                           const ExpansionConfig& cfg) {
  std::vector<NodePair> out;
  std::vector<SenseId> path{head};
  oracle_expand_from(edges, path, head, 1, cfg, out);
  std::sort(out.begin(), out.end());
  return out;
}

inline std::vector<NodePair> sorted_pairs(const ChainTree& tree) {
  auto out = linearize(tree);
  std::sort(out.begin(), out.end());
  return out;
}

struct OraclePairClass {
  CorrespondenceClass cls;
  std::optional<CorrespondenceClass> fan;
  bool reciprocal;
};

/// Degree counting straight from the edge list.
inline OraclePairClass oracle_classify_pair(const std::vector<EquivalenceEdge>& edges, const EquivalenceEdge& edge) {
  std::size_t out_from = 0, out_to = 0, in_to = 0;
  bool reciprocal = false;
  for (const auto& e : edges) {
    if (e.from == edge.from) ++out_from;
    if (e.from == edge.to) ++out_to;
    if (e.to == edge.to) ++in_to;
    if (e.from == edge.to && e.to == edge.from) reciprocal = true;
  }
  std::optional<CorrespondenceClass> fan;
  if (out_from > 1 && in_to == 1) fan = CorrespondenceClass::divergent;
  if (in_to > 1 && out_from == 1) fan = CorrespondenceClass::convergent;
  if (in_to > 1 && out_from > 1) fan = CorrespondenceClass::many_to_many;
  if (!reciprocal) return {fan.value_or(CorrespondenceClass::non_reciprocal), fan, false};
  if (out_from == 1 && out_to == 1) return {CorrespondenceClass::symmetric_exclusive, fan, true};
  return {CorrespondenceClass::symmetric_nonexclusive, fan, true};
}

inline std::size_t oracle_out_degree(const std::vector<EquivalenceEdge>& edges, const SenseId& s) {
  return static_cast<std::size_t>(std::count_if(edges.begin(), edges.end(), [&](const auto& e) { return e.from == s; }));
}

/// Every key present in `lower` is present in `higher` with an equal value;
/// objects are compared key-wise and arrays element-wise.
template <typename Json>
bool json_subset(const Json& lower, const Json& higher) {
  if (lower.is_object()) {
    if (!higher.is_object()) return false;
    for (auto it = lower.begin(); it != lower.end(); ++it) {
      if (!higher.contains(it.key()) || !json_subset(it.value(), higher[it.key()])) return false;
    }
    return true;
  }
  if (lower.is_array()) {
    if (!higher.is_array() || lower.size() != higher.size()) return false;
    for (std::size_t i = 0; i < lower.size(); ++i) {
      if (!json_subset(lower[i], higher[i])) return false;
    }
    return true;
  }
  return lower == higher;
}

}  // namespace sedgraph::testing
