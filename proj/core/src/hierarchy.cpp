#include "hbias/hierarchy.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <deque>
#include <istream>
#include <limits>
#include <map>

#include "hbias/error.hpp"
#include "text.hpp"

namespace hbias {

void DistanceMatrix::validate() const {
  const auto n = static_cast<Eigen::Index>(labels.size());
  if (values.rows() != n || values.cols() != n) {
    throw Error("distance matrix: shape does not match label count");
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    if (values(i, i) != 0.0) throw Error("distance matrix: non-zero diagonal");
    for (Eigen::Index j = 0; j < n; ++j) {
      const double v = values(i, j);
      if (!std::isfinite(v) || v < 0.0) throw Error("distance matrix: entry not finite and non-negative");
      if (v != values(j, i)) throw Error("distance matrix: not symmetric");
    }
  }
}

Hierarchy Hierarchy::from_edges(std::span<const Edge> edges,
                                std::span<const std::string> class_leaves) {
  Hierarchy h;
  auto intern = [&h](const std::string& name) -> NodeId {
    if (name.empty()) throw Error("hierarchy: empty node identifier");
    auto [it, inserted] = h.ids_.try_emplace(name, static_cast<NodeId>(h.names_.size()));
    if (inserted) {
      h.names_.push_back(name);
      h.children_.emplace_back();
      h.parents_.emplace_back();
    }
    return it->second;
  };

  for (const auto& [parent, child] : edges) {
    const NodeId p = intern(parent);
    const NodeId c = intern(child);
    if (p == c) throw Error("hierarchy: cycle detected at node '" + parent + "'");
    auto& kids = h.children_[p];
    if (std::find(kids.begin(), kids.end(), c) != kids.end()) continue;
    kids.push_back(c);
    h.parents_[c].push_back(p);
  }

  // Kahn's algorithm; anything left unvisited sits on a cycle.
  {
    std::vector<std::size_t> indegree(h.names_.size());
    std::deque<NodeId> ready;
    for (NodeId n = 0; n < h.names_.size(); ++n) {
      indegree[n] = h.parents_[n].size();
      if (indegree[n] == 0) ready.push_back(n);
    }
    std::size_t visited = 0;
    while (!ready.empty()) {
      const NodeId n = ready.front();
      ready.pop_front();
      ++visited;
      for (NodeId c : h.children_[n]) {
        if (--indegree[c] == 0) ready.push_back(c);
      }
    }
    if (visited != h.names_.size()) {
      for (NodeId n = 0; n < h.names_.size(); ++n) {
        if (indegree[n] != 0) {
          throw Error("hierarchy: cycle detected through node '" + h.names_[n] + "'");
        }
      }
    }
  }

  h.class_nodes_.reserve(class_leaves.size());
  for (std::size_t c = 0; c < class_leaves.size(); ++c) {
    const NodeId n = intern(class_leaves[c]);
    if (!h.children_[n].empty()) {
      throw Error("hierarchy: class " + std::to_string(c) + " maps to non-leaf node '" +
                  class_leaves[c] + "'");
    }
    auto [it, inserted] = h.node_classes_.try_emplace(n, static_cast<Label>(c));
    if (!inserted) {
      throw Error("hierarchy: node '" + class_leaves[c] + "' assigned to classes " +
                  std::to_string(it->second) + " and " + std::to_string(c));
    }
    h.class_nodes_.push_back(n);
  }

  h.is_tree_ = std::all_of(h.parents_.begin(), h.parents_.end(),
                           [](const auto& ps) { return ps.size() <= 1; });
  return h;
}

std::optional<NodeId> Hierarchy::find(std::string_view name) const {
  auto it = ids_.find(std::string(name));
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

NodeId Hierarchy::node(std::string_view name) const {
  if (auto n = find(name)) return *n;
  throw Error("hierarchy: unknown node '" + std::string(name) + "'");
}

NodeId Hierarchy::class_node(Label c) const {
  if (c >= class_nodes_.size()) {
    throw Error("hierarchy: class " + std::to_string(c) + " out of range (C=" +
                std::to_string(class_nodes_.size()) + ")");
  }
  return class_nodes_[c];
}

std::optional<Label> Hierarchy::class_of(NodeId n) const {
  auto it = node_classes_.find(n);
  if (it == node_classes_.end()) return std::nullopt;
  return it->second;
}

std::vector<NodeId> Hierarchy::roots() const {
  std::vector<NodeId> out;
  for (NodeId n = 0; n < names_.size(); ++n) {
    if (parents_[n].empty()) out.push_back(n);
  }
  return out;
}

Hierarchy parse_hierarchy(std::istream& edge_text, std::istream& class_index_text) {
  std::vector<Hierarchy::Edge> edges;
  {
    detail::LineReader lines(edge_text, "edge file");
    while (auto line = lines.next()) {
      auto fields = detail::split(*line, '\t');
      if (fields.size() != 2 || fields[0].empty() || fields[1].empty()) {
        throw ParseError("edge file", lines.number(), "expected 'parent<TAB>child'");
      }
      edges.emplace_back(std::string(fields[0]), std::string(fields[1]));
    }
  }

  std::map<std::size_t, std::string> by_index;
  {
    detail::LineReader lines(class_index_text, "class index file");
    while (auto line = lines.next()) {
      auto fields = detail::split(*line, '\t');
      if (fields.size() != 2 || fields[1].empty()) {
        throw ParseError("class index file", lines.number(), "expected 'index<TAB>node_id'");
      }
      std::size_t index = 0;
      if (!detail::parse_uint(fields[0], index)) {
        throw ParseError("class index file", lines.number(),
                         "invalid class index '" + std::string(fields[0]) + "'");
      }
      if (!by_index.emplace(index, std::string(fields[1])).second) {
        throw ParseError("class index file", lines.number(),
                         "duplicate class index " + std::to_string(index));
      }
    }
  }
  std::vector<std::string> leaves;
  leaves.reserve(by_index.size());
  for (const auto& [index, node] : by_index) {
    if (index != leaves.size()) {
      throw ParseError("class index file", 0,
                       "class indices not contiguous: missing index " + std::to_string(leaves.size()));
    }
    leaves.push_back(node);
  }
  return Hierarchy::from_edges(edges, leaves);
}

namespace {

constexpr std::size_t kUnreached = std::numeric_limits<std::size_t>::max();

std::vector<std::size_t> bfs_hops(const Hierarchy& h, NodeId source) {
  std::vector<std::size_t> dist(h.node_count(), kUnreached);
  std::deque<NodeId> frontier{source};
  dist[source] = 0;
  while (!frontier.empty()) {
    const NodeId n = frontier.front();
    frontier.pop_front();
    auto visit = [&](NodeId m) {
      if (dist[m] == kUnreached) {
        dist[m] = dist[n] + 1;
        frontier.push_back(m);
      }
    };
    for (NodeId m : h.children(n)) visit(m);
    for (NodeId m : h.parents(n)) visit(m);
  }
  return dist;
}

}  // namespace

DistanceMatrix graph_distance_matrix(const Hierarchy& h, std::span<const Label> classes) {
  const auto n = static_cast<Eigen::Index>(classes.size());
  DistanceMatrix out{std::vector<Label>(classes.begin(), classes.end()), Matrix::Zero(n, n)};
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto dist = bfs_hops(h, h.class_node(classes[i]));
    for (Eigen::Index j = 0; j < n; ++j) {
      const std::size_t d = dist[h.class_node(classes[j])];
      if (d == kUnreached) {
        throw Error("graph distance: no path between class " + std::to_string(classes[i]) +
                    " and class " + std::to_string(classes[j]));
      }
      out.values(i, j) = static_cast<double>(d);
    }
  }
  return out;
}

DistanceMatrix graph_distance_matrix(const Hierarchy& h) {
  std::vector<Label> all(h.class_count());
  for (Label c = 0; c < all.size(); ++c) all[c] = c;
  return graph_distance_matrix(h, all);
}

std::vector<Label> dfs_leaf_order(const Hierarchy& h) {
  if (!h.is_tree()) throw Error("dfs_leaf_order: hierarchy is not a tree");
  std::vector<Label> order;
  order.reserve(h.class_count());
  std::vector<NodeId> stack;
  const auto roots = h.roots();
  stack.assign(roots.rbegin(), roots.rend());
  while (!stack.empty()) {
    const NodeId n = stack.back();
    stack.pop_back();
    if (auto c = h.class_of(n)) order.push_back(*c);
    const auto kids = h.children(n);
    stack.insert(stack.end(), kids.rbegin(), kids.rend());
  }
  return order;
}

NodeId hypernym_of(const Hierarchy& h, Label c, const std::unordered_set<NodeId>& targets) {
  if (!h.is_tree()) throw Error("hypernym_of: hierarchy is not a tree");
  NodeId n = h.class_node(c);
  for (;;) {
    if (targets.contains(n)) return n;
    const auto ps = h.parents(n);
    if (ps.empty()) break;
    n = ps.front();
  }
  throw Error("hypernym_of: no matching ancestor for class " + std::to_string(c) + " ('" +
              h.name(h.class_node(c)) + "')");
}

NodeId hypernym_of(const Hierarchy& h, Label c, std::span<const std::string> targets) {
  std::unordered_set<NodeId> ids;
  for (const auto& t : targets) {
    if (auto n = h.find(t)) ids.insert(*n);
  }
  return hypernym_of(h, c, ids);
}

}  // namespace hbias
