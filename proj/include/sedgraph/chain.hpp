#pragma once

// Chain engine: unfolds an entry from a head sense into a tree of node pairs
// whose languages alternate with depth.

#include <algorithm>
#include <compare>
#include <cstddef>
#include <deque>
#include <set>
#include <stdexcept>
#include <vector>

#include "sedgraph/errors.hpp"
#include "sedgraph/lexicon.hpp"

namespace sedgraph {

struct ExpansionConfig {
  int max_depth = 4;
  int max_branch = 8;
  bool include_closures = true;

  void check() const {
    if (max_depth < 0) throw std::invalid_argument("max_depth must be >= 0");
    if (max_branch < 1) throw std::invalid_argument("max_branch must be >= 1");
  }
};

struct NodePair {
  SenseId source;
  SenseId target;
  int edge_rank = 1;
  int depth = 1;
  bool closure = false;  // target already lies on the path from the head to source

  friend bool operator==(const NodePair&, const NodePair&) = default;
  friend auto operator<=>(const NodePair&, const NodePair&) = default;
};

struct ChainNode {
  NodePair pair;
  std::size_t parent = LexicalGraph::npos;  // npos for depth-1 pairs
  std::vector<std::size_t> children;
};

// Nodes are stored in breadth-first order: by depth, then by pre-order
// position within a depth.
struct ChainTree {
  SenseId head;
  std::vector<ChainNode> nodes;
  std::vector<std::size_t> roots;
  std::vector<SenseId> truncated;  // sorted, unique

  bool empty() const noexcept { return nodes.empty(); }
};

/// Breadth-first expansion from `head`. Children of a pair are the
/// out-equivalents of its target in rank order, cut at max_branch. A target
/// already on the current path becomes a closure pair with no children.
/// Senses whose expansion was cut by max_depth or max_branch are listed in
/// `truncated`.
inline ChainTree expand(const LexicalGraph& graph, const SenseId& head, const ExpansionConfig& config = {}) {
  config.check();
  const auto head_pos = graph.sense_pos(head);
  if (head_pos == LexicalGraph::npos) throw UnknownSense(head.str());

  ChainTree tree;
  tree.head = head;
  std::set<SenseId> truncated;

  auto on_path = [&](std::size_t node, const SenseId& sense) {
    if (sense == head) return true;
    for (auto n = node; n != LexicalGraph::npos; n = tree.nodes[n].parent) {
      if (tree.nodes[n].pair.target == sense) return true;
    }
    return false;
  };

  // Adds the children of `sense` (reached through `parent`) at `depth`.
  auto grow = [&](std::size_t parent, std::size_t sense_pos, int depth) {
    const auto& sense = graph.senses()[sense_pos].id;
    const auto& out = graph.out_edges(sense_pos);
    if (out.empty()) return;
    if (depth > config.max_depth) {
      truncated.insert(sense);
      return;
    }
    if (out.size() > static_cast<std::size_t>(config.max_branch)) truncated.insert(sense);
    const auto n = std::min(out.size(), static_cast<std::size_t>(config.max_branch));
    for (std::size_t i = 0; i < n; ++i) {
      const auto& e = graph.edges()[out[i]];
      const bool closure = on_path(parent, e.to);
      if (closure && !config.include_closures) continue;
      ChainNode node{NodePair{e.from, e.to, e.rank, depth, closure}, parent, {}};
      tree.nodes.push_back(std::move(node));
      const auto idx = tree.nodes.size() - 1;
      if (parent == LexicalGraph::npos) {
        tree.roots.push_back(idx);
      } else {
        tree.nodes[parent].children.push_back(idx);
      }
    }
  };

  grow(LexicalGraph::npos, head_pos, 1);
  for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
    if (tree.nodes[i].pair.closure) continue;
    const auto target = graph.sense_pos(tree.nodes[i].pair.target);
    grow(i, target, tree.nodes[i].pair.depth + 1);
  }
  tree.truncated.assign(truncated.begin(), truncated.end());
  return tree;
}

/// Pairs ordered by depth (center to periphery), then pre-order position.
inline std::vector<NodePair> linearize(const ChainTree& tree) {
  std::vector<NodePair> out;
  out.reserve(tree.nodes.size());
  for (const auto& n : tree.nodes) out.push_back(n.pair);
  return out;
}

inline std::vector<NodePair> closures(const ChainTree& tree) {
  std::vector<NodePair> out;
  for (const auto& n : tree.nodes) {
    if (n.pair.closure) out.push_back(n.pair);
  }
  return out;
}

}  // namespace sedgraph
