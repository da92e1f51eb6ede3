#pragma once

// Correspondence typology for equivalence pairs and senses, and the
// whole-graph catalog.
//
// A pair is first split by reciprocity (does the transpose edge exist?),
// then by fan shape: the out-degree of its source against the in-degree of
// its target.
//
//   reciprocal, both sides 1:1 with each other   SYMMETRIC_EXCLUSIVE
//   reciprocal, otherwise                        SYMMETRIC_NONEXCLUSIVE
//   one-way, out > 1, in = 1                     DIVERGENT
//   one-way, out = 1, in > 1                     CONVERGENT
//   one-way, out > 1, in > 1                     MANY_TO_MANY
//   one-way, out = 1, in = 1                     NON_RECIPROCAL
//
// The fan shape is reported alongside the class for reciprocal pairs too.

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sedgraph/errors.hpp"
#include "sedgraph/lexicon.hpp"

namespace sedgraph {

enum class CorrespondenceClass {
  symmetric_exclusive,
  symmetric_nonexclusive,
  divergent,
  convergent,
  many_to_many,
  non_reciprocal,
  lacuna,
};

inline constexpr std::array<CorrespondenceClass, 6> kPairClasses = {
    CorrespondenceClass::symmetric_exclusive, CorrespondenceClass::symmetric_nonexclusive,
    CorrespondenceClass::divergent,           CorrespondenceClass::convergent,
    CorrespondenceClass::many_to_many,        CorrespondenceClass::non_reciprocal,
};

inline std::string_view to_string(CorrespondenceClass c) {
  switch (c) {
    case CorrespondenceClass::symmetric_exclusive: return "SYMMETRIC_EXCLUSIVE";
    case CorrespondenceClass::symmetric_nonexclusive: return "SYMMETRIC_NONEXCLUSIVE";
    case CorrespondenceClass::divergent: return "DIVERGENT";
    case CorrespondenceClass::convergent: return "CONVERGENT";
    case CorrespondenceClass::many_to_many: return "MANY_TO_MANY";
    case CorrespondenceClass::non_reciprocal: return "NON_RECIPROCAL";
    case CorrespondenceClass::lacuna: return "LACUNA";
  }
  return "LACUNA";
}

enum class FanShape { one_to_one, divergent, convergent, many_to_many };

inline std::optional<CorrespondenceClass> fan_tag(FanShape f) {
  switch (f) {
    case FanShape::one_to_one: return std::nullopt;
    case FanShape::divergent: return CorrespondenceClass::divergent;
    case FanShape::convergent: return CorrespondenceClass::convergent;
    case FanShape::many_to_many: return CorrespondenceClass::many_to_many;
  }
  return std::nullopt;
}

struct PairClassification {
  CorrespondenceClass cls = CorrespondenceClass::non_reciprocal;
  bool reciprocal = false;
  FanShape fan = FanShape::one_to_one;
  std::size_t source_out_degree = 0;
  std::size_t target_in_degree = 0;

  std::optional<CorrespondenceClass> fan_class() const { return fan_tag(fan); }
  friend bool operator==(const PairClassification&, const PairClassification&) = default;
};

inline FanShape fan_shape(std::size_t out_degree, std::size_t in_degree) {
  if (out_degree > 1 && in_degree > 1) return FanShape::many_to_many;
  if (out_degree > 1) return FanShape::divergent;
  if (in_degree > 1) return FanShape::convergent;
  return FanShape::one_to_one;
}

namespace detail {

inline PairClassification classify_edge_at(const LexicalGraph& graph, std::size_t edge) {
  const auto& e = graph.edges()[edge];
  const auto from = graph.sense_pos(e.from);
  const auto to = graph.sense_pos(e.to);
  PairClassification r;
  r.source_out_degree = graph.out_edges(from).size();
  r.target_in_degree = graph.in_edges(to).size();
  r.fan = fan_shape(r.source_out_degree, r.target_in_degree);
  r.reciprocal = graph.find_edge(e.to, e.from) != LexicalGraph::npos;
  if (r.reciprocal) {
    const bool exclusive = r.source_out_degree == 1 && graph.out_edges(to).size() == 1;
    r.cls = exclusive ? CorrespondenceClass::symmetric_exclusive : CorrespondenceClass::symmetric_nonexclusive;
  } else {
    r.cls = fan_tag(r.fan).value_or(CorrespondenceClass::non_reciprocal);
  }
  return r;
}

}  // namespace detail

inline PairClassification classify_pair(const LexicalGraph& graph, const SenseId& from, const SenseId& to) {
  const auto e = graph.find_edge(from, to);
  if (e == LexicalGraph::npos) throw UnknownEdge(from.str(), to.str());
  return detail::classify_edge_at(graph, e);
}

inline PairClassification classify_pair(const LexicalGraph& graph, const EquivalenceEdge& edge) {
  return classify_pair(graph, edge.from, edge.to);
}

// LACUNA iff the sense has no out-equivalents, otherwise 1:1 or 1:n.
struct SenseClassification {
  std::size_t out_degree = 0;

  bool lacuna() const noexcept { return out_degree == 0; }
  std::string summary() const {
    if (out_degree == 0) return std::string(to_string(CorrespondenceClass::lacuna));
    if (out_degree == 1) return "1:1";
    return "1:n";
  }
  friend bool operator==(const SenseClassification&, const SenseClassification&) = default;
};

inline SenseClassification classify_sense(const LexicalGraph& graph, const SenseId& sense) {
  return SenseClassification{graph.out_degree(sense)};
}

struct ClassifiedPair {
  SenseId from;
  SenseId to;
  friend bool operator==(const ClassifiedPair&, const ClassifiedPair&) = default;
};

struct CorrespondenceCatalog {
  std::size_t total_pairs = 0;
  std::size_t total_senses = 0;
  std::map<CorrespondenceClass, std::size_t> counts;
  std::map<CorrespondenceClass, std::size_t> fan_counts;  // fan tags, all pairs
  std::map<std::string, std::vector<SenseId>> lacunae;    // by language code
  std::map<CorrespondenceClass, std::vector<ClassifiedPair>> exemplars;

  std::size_t count(CorrespondenceClass c) const {
    auto it = counts.find(c);
    return it == counts.end() ? 0 : it->second;
  }
  std::size_t lacuna_count() const {
    std::size_t n = 0;
    for (const auto& [lang, list] : lacunae) n += list.size();
    return n;
  }
};

inline CorrespondenceCatalog catalog(const LexicalGraph& graph, std::size_t exemplar_cap = 20) {
  CorrespondenceCatalog cat;
  for (auto c : kPairClasses) {
    cat.counts[c] = 0;
    cat.exemplars[c];
  }
  for (const auto& lang : graph.langs()) cat.lacunae[lang.str()];

  for (std::size_t e = 0; e < graph.edges().size(); ++e) {
    const auto& edge = graph.edges()[e];
    if (graph.sense_pos(edge.from) == LexicalGraph::npos || graph.sense_pos(edge.to) == LexicalGraph::npos) continue;
    const auto r = detail::classify_edge_at(graph, e);
    ++cat.total_pairs;
    ++cat.counts[r.cls];
    if (auto tag = r.fan_class()) ++cat.fan_counts[*tag];
    auto& ex = cat.exemplars[r.cls];
    if (ex.size() < exemplar_cap) ex.push_back({edge.from, edge.to});
  }
  for (std::size_t s = 0; s < graph.senses().size(); ++s) {
    ++cat.total_senses;
    if (graph.out_edges(s).empty()) {
      const auto& id = graph.senses()[s].id;
      cat.lacunae[id.lang().str()].push_back(id);
    }
  }
  return cat;
}

}  // namespace sedgraph
