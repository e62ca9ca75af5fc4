#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace hbias {

// Index of a label within a label space (hyponym class or superclass).
using Label = std::uint32_t;

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Square matrix of pairwise distances between the classes listed in `labels`.
// Symmetric, zero diagonal, finite and non-negative.
struct DistanceMatrix {
  std::vector<Label> labels;
  Matrix values;

  std::size_t size() const { return labels.size(); }
  // Throws hbias::Error if an invariant does not hold.
  void validate() const;
};

}  // namespace hbias
