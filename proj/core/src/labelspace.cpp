#include "hbias/labelspace.hpp"

#include <algorithm>
#include <numeric>
#include <unordered_map>

#include "hbias/error.hpp"
#include "hbias/metrics.hpp"
#include "hbias/random.hpp"

namespace hbias {

namespace {
constexpr Label kUnassigned = static_cast<Label>(-1);
}

LabelSpace::LabelSpace(std::string name, std::vector<Superclass> superclasses,
                       std::size_t class_count)
    : name_(std::move(name)), superclasses_(std::move(superclasses)) {
  mapping_.table.assign(class_count, kUnassigned);
  for (std::size_t s = 0; s < superclasses_.size(); ++s) {
    auto& members = superclasses_[s].members;
    if (members.empty()) {
      throw Error("label space '" + name_ + "': superclass '" + superclasses_[s].name + "' is empty");
    }
    std::sort(members.begin(), members.end());
    for (Label c : members) {
      if (c >= class_count) {
        throw Error("label space '" + name_ + "': class " + std::to_string(c) +
                    " out of range (C=" + std::to_string(class_count) + ")");
      }
      if (mapping_.table[c] != kUnassigned) {
        throw Error("label space '" + name_ + "': class " + std::to_string(c) +
                    " belongs to two superclasses");
      }
      mapping_.table[c] = static_cast<Label>(s);
    }
  }
  for (std::size_t c = 0; c < class_count; ++c) {
    if (mapping_.table[c] == kUnassigned) {
      throw Error("label space '" + name_ + "': class " + std::to_string(c) +
                  " is not in any superclass");
    }
  }
}

LabelSpace LabelSpace::from_mapping(std::string name, LabelMapping mapping,
                                    std::vector<std::string> names) {
  std::size_t count = 0;
  for (Label s : mapping.table) count = std::max<std::size_t>(count, s + 1);
  if (!names.empty() && names.size() != count) {
    throw Error("label space '" + name + "': " + std::to_string(names.size()) +
                " names for " + std::to_string(count) + " superclasses");
  }
  std::vector<Superclass> supers(count);
  for (std::size_t s = 0; s < count; ++s) {
    supers[s].name = names.empty() ? std::to_string(s) : names[s];
  }
  for (Label c = 0; c < mapping.table.size(); ++c) supers[mapping.table[c]].members.push_back(c);
  return LabelSpace(std::move(name), std::move(supers), mapping.table.size());
}

LabelSpace LabelSpace::identity(std::size_t class_count, std::string name) {
  LabelMapping m;
  m.table.resize(class_count);
  std::iota(m.table.begin(), m.table.end(), Label{0});
  return from_mapping(std::move(name), std::move(m));
}

std::vector<std::size_t> LabelSpace::sizes() const {
  std::vector<std::size_t> out;
  out.reserve(superclasses_.size());
  for (const auto& s : superclasses_) out.push_back(s.members.size());
  return out;
}

LabelSpace build_labelspace(const Hierarchy& h, std::span<const GroupSpec> groups,
                            std::string name) {
  if (!h.is_tree()) throw Error("grouping: hierarchy is not a tree (some node has several parents)");
  std::unordered_map<NodeId, std::size_t> group_of;
  std::unordered_set<NodeId> targets;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    for (const auto& node : groups[g].nodes) {
      const NodeId n = h.node(node);
      auto [it, inserted] = group_of.try_emplace(n, g);
      if (!inserted) {
        throw Error("grouping: node '" + node + "' listed in groups '" + groups[it->second].name +
                    "' and '" + groups[g].name + "'");
      }
      targets.insert(n);
    }
  }
  std::vector<Superclass> supers(groups.size());
  for (std::size_t g = 0; g < groups.size(); ++g) supers[g].name = groups[g].name;
  for (Label c = 0; c < h.class_count(); ++c) {
    NodeId anchor = 0;
    try {
      anchor = hypernym_of(h, c, targets);
    } catch (const Error&) {
      throw Error("grouping: class " + std::to_string(c) + " ('" + h.name(h.class_node(c)) +
                  "') matches no group");
    }
    supers[group_of.at(anchor)].members.push_back(c);
  }
  return LabelSpace(std::move(name), std::move(supers), h.class_count());
}

LabelSpace random_isomorphic(const LabelSpace& s, std::uint64_t seed) {
  std::vector<Label> perm(s.class_count());
  std::iota(perm.begin(), perm.end(), Label{0});
  CounterRng rng(seed);
  rng.shuffle(std::span<Label>(perm));

  std::vector<Superclass> supers;
  supers.reserve(s.size());
  auto next = perm.begin();
  for (const auto& sc : s.superclasses()) {
    const auto n = static_cast<std::ptrdiff_t>(sc.members.size());
    supers.push_back({"random:" + sc.name, std::vector<Label>(next, next + n)});
    next += n;
  }
  return LabelSpace("random:" + s.name(), std::move(supers), s.class_count());
}

PredictionLog project_log(const PredictionLog& log, const LabelMapping& m) {
  if (log.label_count() > m.class_count()) {
    throw Error("project_log: log has " + std::to_string(log.label_count()) +
                " labels but mapping covers " + std::to_string(m.class_count()));
  }
  std::size_t target_count = 0;
  for (Label s : m.table) target_count = std::max<std::size_t>(target_count, s + 1);
  std::vector<PredictionRecord> out;
  out.reserve(log.size());
  for (const auto& r : log.records()) {
    out.push_back({r.epoch, r.example_id, m[r.true_label], m[r.pred_label]});
  }
  return PredictionLog(std::move(out), target_count);
}

}  // namespace hbias
