#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "hbias/hierarchy.hpp"
#include "hbias/types.hpp"

namespace hbias {

class PredictionLog;

struct Superclass {
  std::string name;
  std::vector<Label> members;  // ascending
};

// Class index -> superclass index.
struct LabelMapping {
  std::vector<Label> table;

  std::size_t class_count() const { return table.size(); }
  Label operator[](Label c) const { return table[c]; }
};

// A partition of the classes 0..C-1 into non-empty, pairwise disjoint
// superclasses. The mapping table is kept consistent with the member lists.
class LabelSpace {
 public:
  // Validates the partition. Member lists may be given in any order.
  LabelSpace(std::string name, std::vector<Superclass> superclasses, std::size_t class_count);
  // Superclass indices come from `mapping`; names default to the index.
  static LabelSpace from_mapping(std::string name, LabelMapping mapping,
                                 std::vector<std::string> names = {});
  // Every class its own superclass.
  static LabelSpace identity(std::size_t class_count, std::string name = "hyponym");

  const std::string& name() const { return name_; }
  std::size_t class_count() const { return mapping_.table.size(); }
  std::size_t size() const { return superclasses_.size(); }
  const std::vector<Superclass>& superclasses() const { return superclasses_; }
  const Superclass& operator[](std::size_t s) const { return superclasses_.at(s); }
  const LabelMapping& mapping() const { return mapping_; }
  std::vector<std::size_t> sizes() const;

 private:
  std::string name_;
  std::vector<Superclass> superclasses_;
  LabelMapping mapping_;
};

// One line of a grouping spec: a superclass made of the listed hierarchy nodes.
struct GroupSpec {
  std::string name;
  std::vector<std::string> nodes;
};

// Assigns each class to the group holding its nearest listed ancestor. Throws
// when a class matches no group or a node appears in two groups.
LabelSpace build_labelspace(const Hierarchy& h, std::span<const GroupSpec> groups,
                            std::string name = "hypernym");

// A uniformly random partition with the same superclass sizes as `s`, in the
// same order. Deterministic in `seed`.
LabelSpace random_isomorphic(const LabelSpace& s, std::uint64_t seed);

// Replaces every true and predicted label by its superclass index.
PredictionLog project_log(const PredictionLog& log, const LabelMapping& m);

}  // namespace hbias
