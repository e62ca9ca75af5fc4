#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "hbias/types.hpp"

namespace hbias {

// N feature vectors (rows of `vectors`) with their class labels in a space of
// `class_count` classes. Vectors are either raw activations or a precomputed
// low-dimensional embedding of them.
struct FeatureSet {
  Matrix vectors;
  std::vector<Label> labels;
  std::size_t class_count = 0;
  std::optional<std::int64_t> epoch;

  std::size_t size() const { return labels.size(); }
  std::size_t dim() const { return static_cast<std::size_t>(vectors.cols()); }

  // Shape, finiteness and label range. Throws hbias::Error.
  void validate() const;
  // Number of vectors per class.
  std::vector<std::size_t> class_counts() const;
  // Row indices per class, in row order.
  std::vector<std::vector<std::size_t>> rows_by_class() const;
};

}  // namespace hbias
