#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "hbias/types.hpp"

namespace hbias {

using NodeId = std::uint32_t;

// A taxonomy DAG (WordNet-style hypernymy graph) whose leaves carry the
// classifier's class indices 0..C-1.
//
// Nodes are numbered in order of first appearance in the edge list, and each
// node's children keep the order in which their edges first appeared. Both
// orders are observable through dfs_leaf_order().
class Hierarchy {
 public:
  using Edge = std::pair<std::string, std::string>;

  // Builds and validates a hierarchy. `class_leaves[c]` is the node id of
  // class c. Class nodes that never appear in `edges` become isolated nodes.
  // Duplicate edges are collapsed. Throws hbias::Error on a cycle, a class
  // mapped to a non-leaf, or a node used by two classes.
  static Hierarchy from_edges(std::span<const Edge> edges,
                              std::span<const std::string> class_leaves);

  std::size_t node_count() const { return names_.size(); }
  std::size_t class_count() const { return class_nodes_.size(); }
  bool is_tree() const { return is_tree_; }

  const std::string& name(NodeId n) const { return names_.at(n); }
  std::optional<NodeId> find(std::string_view name) const;
  // Like find() but throws hbias::Error naming the missing node.
  NodeId node(std::string_view name) const;

  std::span<const NodeId> children(NodeId n) const { return children_.at(n); }
  std::span<const NodeId> parents(NodeId n) const { return parents_.at(n); }
  bool is_leaf(NodeId n) const { return children_.at(n).empty(); }

  NodeId class_node(Label c) const;
  std::optional<Label> class_of(NodeId n) const;

  // Parentless nodes in first-appearance order.
  std::vector<NodeId> roots() const;

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, NodeId> ids_;
  std::vector<std::vector<NodeId>> children_;
  std::vector<std::vector<NodeId>> parents_;
  std::vector<NodeId> class_nodes_;
  std::unordered_map<NodeId, Label> node_classes_;
  bool is_tree_ = true;
};

// Reads the tab-separated edge file (`parent<TAB>child`, `#` comments) and the
// class index file (`index<TAB>node`). Errors carry the offending line number.
Hierarchy parse_hierarchy(std::istream& edge_text, std::istream& class_index_text);

// Unweighted shortest-path hop counts between class leaves, treating every
// hypernymy edge as undirected. Throws if some pair is disconnected.
DistanceMatrix graph_distance_matrix(const Hierarchy& h, std::span<const Label> classes);
DistanceMatrix graph_distance_matrix(const Hierarchy& h);

// Class indices in depth-first pre-order over the tree; siblings appear in
// edge-file order so related classes end up contiguous. Tree only.
std::vector<Label> dfs_leaf_order(const Hierarchy& h);

// Walks from the class's leaf (inclusive) toward the root and returns the
// first node contained in `targets`. Tree only.
NodeId hypernym_of(const Hierarchy& h, Label c, const std::unordered_set<NodeId>& targets);
NodeId hypernym_of(const Hierarchy& h, Label c, std::span<const std::string> targets);

}  // namespace hbias
