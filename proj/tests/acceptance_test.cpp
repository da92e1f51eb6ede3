// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit if any fail.

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <tuple>

#include "support/server.hpp"
#include "support/testing.hpp"

namespace {

using namespace sedgraph;
namespace t = sedgraph::testing;

// Pinned thresholds.
constexpr int kRoundTripLexicons = 200;
constexpr double kRoundTripBudgetSeconds = 10.0;
constexpr int kExhaustiveMaxSenses = 5;
constexpr int kRandomGraphs = 500;
constexpr int kMaxChainDepth = 5;
constexpr std::size_t kMaxClassifierEdges = 1000;
constexpr int kApiCombinations = 50;
constexpr int kFeedbackReports = 10;

struct Outcome {
  bool pass = true;
  std::string detail;
};

void fail(Outcome& o, const std::string& why) {
  if (o.pass) o.detail = why;
  o.pass = false;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

Outcome roundtrip() {
  Outcome o;
  std::mt19937_64 rng(1001);
  std::vector<std::string> inputs;
  for (int i = 0; i < kRoundTripLexicons; ++i) {
    std::ostringstream os;
    write_records(os, t::random_lexicon(rng, {500, 2000}));
    inputs.push_back(os.str());
  }
  std::size_t max_edges = 0;
  std::size_t max_lexemes = 0;
  const auto start = std::chrono::steady_clock::now();
  for (const auto& text : inputs) {
    const auto first = load_lexicon_text(text);
    const auto exported = export_text(first.graph);
    const auto second = load_lexicon_text(exported);
    if (!first.report.empty() || !second.report.empty()) fail(o, "generated lexicon did not validate");
    if (!(second.graph == first.graph)) fail(o, "parse(export(parse(x))) differs from parse(x)");
    if (export_text(second.graph) != exported) fail(o, "export is not byte-stable");
    max_edges = std::max(max_edges, first.graph.edges().size());
    max_lexemes = std::max(max_lexemes, first.graph.lexemes().size());
  }
  const double secs = seconds_since(start);
  if (max_lexemes > 500 || max_edges > 2000) fail(o, "generator exceeded its bounds");
  if (secs >= kRoundTripBudgetSeconds) fail(o, "took " + std::to_string(secs) + " s");
  std::ostringstream d;
  d << kRoundTripLexicons << " lexicons (max " << max_lexemes << " lexemes, " << max_edges << " edges) in " << secs
    << " s";
  if (o.pass) o.detail = d.str();
  return o;
}

// Calls fn on every bipartite graph over n senses; sense 0 is fixed to the
// first language since swapping languages gives an isomorphic graph.
void each_small_graph(int n, const std::function<void(const t::SmallGraph&)>& fn) {
  for (unsigned split = 0; split < (1u << (n - 1)); ++split) {
    t::SmallGraph base;
    base.in_b.push_back(false);
    for (int i = 1; i < n; ++i) base.in_b.push_back((split >> (i - 1)) & 1u);
    std::vector<std::pair<int, int>> slots;
    for (int f = 0; f < n; ++f) {
      for (int to = 0; to < n; ++to) {
        if (base.in_b[static_cast<std::size_t>(f)] != base.in_b[static_cast<std::size_t>(to)]) slots.emplace_back(f, to);
      }
    }
    for (unsigned long mask = 0; mask < (1ul << slots.size()); ++mask) {
      t::SmallGraph g = base;
      std::vector<int> next_rank(static_cast<std::size_t>(n), 1);
      for (std::size_t s = 0; s < slots.size(); ++s) {
        if (mask >> s & 1ul) {
          const auto [f, to] = slots[s];
          g.edges.push_back({f, to, next_rank[static_cast<std::size_t>(f)]++});
        }
      }
      fn(g);
    }
  }
}

std::size_t check_chains(const LexicalGraph& g, Outcome& o) {
  std::size_t runs = 0;
  const auto edges = t::raw_edges(g);
  for (const auto& s : g.senses()) {
    for (int depth = 0; depth <= kMaxChainDepth; ++depth) {
      for (int branch : {1, 2, 8}) {
        const ExpansionConfig cfg{depth, branch, true};
        const auto tree = expand(g, s.id, cfg);
        ++runs;
        if (t::sorted_pairs(tree) != t::oracle_expand(edges, s.id, cfg)) {
          fail(o, "mismatch at head " + s.id.str() + " depth " + std::to_string(depth));
        }
      }
    }
  }
  return runs;
}

Outcome chain_oracle() {
  Outcome o;
  std::size_t exhaustive = 0, graphs = 0, runs = 0;
  for (int n = 1; n <= kExhaustiveMaxSenses; ++n) {
    each_small_graph(n, [&](const t::SmallGraph& sg) {
      ++exhaustive;
      runs += check_chains(sg.build(), o);
    });
  }
  std::mt19937_64 rng(1002);
  for (int max_senses : {12, 50}) {
    for (int i = 0; i < kRandomGraphs; ++i) {
      const double density = max_senses == 12 ? 0.1 + 0.05 * (i % 8) : 0.02 + 0.01 * (i % 8);
      ++graphs;
      runs += check_chains(t::random_small_graph(rng, max_senses, density).build(), o);
    }
  }
  if (o.pass) {
    o.detail = std::to_string(exhaustive) + " exhaustive graphs (<= " + std::to_string(kExhaustiveMaxSenses) +
               " senses), " + std::to_string(graphs) + " random (<= 12 and <= 50 senses), " + std::to_string(runs) +
               " expansions, 0 mismatches";
  }
  return o;
}

Outcome alternation() {
  Outcome o;
  std::mt19937_64 rng(1003);
  std::size_t pairs = 0;
  for (int i = 0; i < kRandomGraphs; ++i) {
    const auto g = t::random_small_graph(rng, 20, 0.1 + 0.05 * (i % 6)).build();
    for (const auto& s : g.senses()) {
      const auto tree = expand(g, s.id, {kMaxChainDepth, 8, true});
      for (const auto& n : tree.nodes) {
        const auto& p = n.pair;
        ++pairs;
        if (g.find_edge(p.source, p.target) == LexicalGraph::npos) fail(o, "pair without an edge");
        if ((p.target.lang() == s.id.lang()) != (p.depth % 2 == 0)) fail(o, "language does not alternate");
        if (p.source.lang() == p.target.lang()) fail(o, "same-language pair");
      }
    }
  }
  if (o.pass) o.detail = std::to_string(pairs) + " pairs checked";
  return o;
}

Outcome classifier_oracle() {
  Outcome o;
  std::mt19937_64 rng(1004);
  std::size_t edges_seen = 0, largest = 0;
  for (int i = 0; i < kRandomGraphs; ++i) {
    auto sg = t::random_small_graph(rng, 64, 0.02 + 0.04 * (i % 8));
    const auto g = sg.build();
    const auto edges = t::raw_edges(g);
    if (edges.size() > kMaxClassifierEdges) {
      --i;
      continue;
    }
    largest = std::max(largest, edges.size());
    for (const auto& e : edges) {
      const auto got = classify_pair(g, e);
      const auto want = t::oracle_classify_pair(edges, e);
      if (got.cls != want.cls || got.fan_class() != want.fan || got.reciprocal != want.reciprocal) {
        fail(o, "class mismatch on " + edge_locus(e));
      }
    }
    edges_seen += edges.size();
    const auto cat = catalog(g);
    std::size_t sum = 0, zero_out = 0;
    for (const auto& [c, n] : cat.counts) sum += n;
    for (const auto& s : g.senses()) zero_out += t::oracle_out_degree(edges, s.id) == 0;
    if (sum != edges.size()) fail(o, "class counts do not sum to the edge count");
    if (cat.lacuna_count() != zero_out) fail(o, "lacuna count differs from zero out-degree count");
  }
  if (o.pass) {
    o.detail = std::to_string(kRandomGraphs) + " graphs, " + std::to_string(edges_seen) + " edges (max " +
               std::to_string(largest) + " per graph)";
  }
  return o;
}

Outcome seed_reproduction() {
  Outcome o;
  const auto built = load_lexicon(t::seed_path());
  const auto& g = built.graph;
  if (!built.report.empty()) fail(o, "seed has validation findings");
  if (g.lexemes().size() != 6 || g.senses().size() != 7 || g.edges().size() != 6) fail(o, "seed counts differ");
  const auto head = t::sid("bg:заблуждавам:verb:1#1");
  const auto pairs = linearize(expand(g, head, {3, 8, true}));
  const std::vector<std::string> expected = {
      "bg:заблуждавам:verb:1#1>ru:обманывать:verb:1#1@1",
      "bg:заблуждавам:verb:1#1>ru:вводить в заблуждение:phrase:1#1@1",
      "ru:обманывать:verb:1#1>bg:лъжа:verb:1#1@2",
      "ru:обманывать:verb:1#1>bg:заблуждавам:verb:1#1@2!",
      "ru:вводить в заблуждение:phrase:1#1>bg:вкарвам в заблуда:phrase:1#1@2",
      "bg:лъжа:verb:1#1>ru:лгать:verb:1#1@3",
  };
  std::vector<std::string> got;
  for (const auto& p : pairs) {
    got.push_back(p.source.str() + ">" + p.target.str() + "@" + std::to_string(p.depth) + (p.closure ? "!" : ""));
  }
  if (got != expected) fail(o, "depth-3 chain differs");
  const auto cat = catalog(g);
  if (cat.count(CorrespondenceClass::symmetric_nonexclusive) != 2 || cat.count(CorrespondenceClass::divergent) != 2 ||
      cat.count(CorrespondenceClass::non_reciprocal) != 2 || cat.lacuna_count() != 3) {
    fail(o, "catalog counts differ");
  }
  for (auto profile : {Profile::minimal, Profile::standard, Profile::full}) {
    const auto golden = t::read_file(t::golden_dir() + "/zabluzhdavam_d3_" + std::string(to_string(profile)) + ".txt");
    if (golden.empty() || render_text(assemble(g, head.str(), {3, 8, true}, profile)) != golden) {
      fail(o, std::string(to_string(profile)) + " rendering differs from golden file");
    }
  }
  if (o.pass) o.detail = "6 lexemes, 7 senses, 6 edges; chain, catalog and 3 golden renderings match";
  return o;
}

// Compares one /entry response with the in-process serialization.
bool entry_matches(httplib::Client& client, const LexicalGraph& g, const std::string& head, int depth, int branch,
                   Profile profile) {
  const auto res = client.Get("/entry?head=" + httplib::detail::encode_query_param(head) + "&depth=" +
                              std::to_string(depth) + "&branch=" + std::to_string(branch) +
                              "&profile=" + std::string(to_string(profile)));
  return res && res->status == 200 && res->body == serialize(assemble(g, head, {depth, branch, true}, profile));
}

Outcome api_equivalence() {
  Outcome o;
  std::mt19937_64 rng(1005);

  // Distinct combinations on the sample lexicon, with sense and lexeme heads.
  const auto seed = t::seed_graph();
  std::vector<std::string> heads;
  for (const auto& s : seed.senses()) heads.push_back(s.id.str());
  for (const auto& l : seed.lexemes()) heads.push_back(l.id.str());
  std::set<std::tuple<std::size_t, int, int, int>> combos;
  std::uniform_int_distribution<std::size_t> pick_head(0, heads.size() - 1);
  std::uniform_int_distribution<int> pick_depth(0, kMaxChainDepth), pick_branch(1, 4), pick_profile(0, 2);
  while (combos.size() < static_cast<std::size_t>(kApiCombinations)) {
    combos.emplace(pick_head(rng), pick_depth(rng), pick_branch(rng), pick_profile(rng));
  }
  int seed_checked = 0;
  {
    FeedbackStore store;
    t::RunningService server(seed, store);
    auto client = server.client();
    for (const auto& [h, depth, branch, profile] : combos) {
      ++seed_checked;
      if (!entry_matches(client, seed, heads[h], depth, branch, static_cast<Profile>(profile))) {
        fail(o, "body differs for " + heads[h] + " depth " + std::to_string(depth));
      }
    }
    const auto cat = client.Get("/catalog");
    if (!cat || cat->body != to_json(catalog(seed)).dump(-1, ' ', false)) fail(o, "seed catalog body differs");
  }

  // The same check on a larger random lexicon.
  const auto random = build_graph(t::random_lexicon(rng, {60, 200})).graph;
  int random_checked = 0;
  {
    FeedbackStore store;
    t::RunningService server(random, store);
    auto client = server.client();
    std::uniform_int_distribution<std::size_t> pick(0, random.senses().size() - 1);
    for (int i = 0; i < kApiCombinations / 2; ++i) {
      const auto head = random.senses()[pick(rng)].id.str();
      ++random_checked;
      if (!entry_matches(client, random, head, i % (kMaxChainDepth + 1), 1 + i % 4, static_cast<Profile>(i % 3))) {
        fail(o, "body differs for " + head);
      }
    }
    const auto cat = client.Get("/catalog");
    if (!cat || cat->body != to_json(catalog(random)).dump(-1, ' ', false)) fail(o, "random catalog body differs");
  }
  if (o.pass) {
    o.detail = std::to_string(seed_checked) + " distinct seed combinations, " + std::to_string(random_checked) +
               " random-lexicon requests and 2 catalogs byte-identical";
  }
  return o;
}

Outcome feedback_durability() {
  Outcome o;
  const auto g = t::seed_graph();
  t::TempDir dir;
  const auto path = dir.file("seed.feedback.sedl");
  {
    FeedbackStore store(path);
    t::RunningService server(g, store);
    auto client = server.client();
    for (int i = 1; i <= kFeedbackReports; ++i) {
      nlohmann::json body{{"kind", "lacuna"}, {"target", "bg:вкарвам в заблуда:phrase:1#1"}, {"body", "report " + std::to_string(i)}};
      const auto res = client.Post("/feedback", body.dump(), "application/json");
      if (!res || res->status != 201 || nlohmann::json::parse(res->body)["id"] != i) fail(o, "report " + std::to_string(i) + " rejected");
    }
  }
  FeedbackStore reopened(path);
  const auto reports = reopened.reports();
  if (reports.size() != kFeedbackReports) fail(o, std::to_string(reports.size()) + " reports after restart");
  for (std::size_t i = 0; i < reports.size(); ++i) {
    if (reports[i].id != static_cast<long long>(i + 1) || reports[i].body != "report " + std::to_string(i + 1)) {
      fail(o, "report " + std::to_string(i + 1) + " altered");
    }
  }
  if (reopened.append(FeedbackKind::error, std::nullopt, "after").id != kFeedbackReports + 1) fail(o, "ids restarted");
  if (o.pass) o.detail = std::to_string(kFeedbackReports) + " reports, ids 1.." + std::to_string(kFeedbackReports) + " survive restart";
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"round-trip byte stability", roundtrip},
      {"chain expansion vs oracle", chain_oracle},
      {"chain alternation and edge soundness", alternation},
      {"classifier vs degree oracle", classifier_oracle},
      {"seed lexicon reproduction", seed_reproduction},
      {"API and library equivalence", api_equivalence},
      {"feedback durability", feedback_durability},
  };
  int failures = 0;
  for (const auto& [name, check] : criteria) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += !o.pass;
    std::cout << (o.pass ? "PASS  " : "FAIL  ") << name << ": " << o.detail << std::endl;
  }
  std::cout << (failures ? "acceptance: FAILED (" + std::to_string(failures) + ")" : std::string("acceptance: all passed"))
            << std::endl;
  return failures ? 1 : 0;
}
