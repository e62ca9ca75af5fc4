#pragma once

#include <cstdint>
#include <optional>
#include <utility>

#include "hbias/features.hpp"
#include "hbias/types.hpp"

namespace hbias {

enum class Integration {
  trapezoid,  // P_r sampled on an even radius grid
  exact,      // closed form of the step-function integral
};

struct CoverConfig {
  std::size_t k = 10;             // examples per class on each side of the split
  std::optional<double> r_max;    // unset: largest query-to-class distance observed
  std::size_t grid_points = 200;
  Integration integration = Integration::trapezoid;
  std::uint64_t seed = 0;
};

// a(i, j) = rho(c_i, c_j); the diagonal holds self-cover. Not symmetric.
struct SimilarityMatrix {
  std::vector<Label> labels;
  Matrix values;
  double r_max = 0.0;  // radius actually used
};

struct CoverStats {
  double self_cover = 0.0;
  double mutual_cover = 0.0;
};

// Samples 2k rows of every class without replacement and gives k to each
// side. Output rows are grouped by class, in class order.
std::pair<FeatureSet, FeatureSet> split_query_support(const FeatureSet& f, const CoverConfig& cfg);

// For every query point of class i, the Euclidean distance to the nearest
// support point of class j. Rows follow the query set, columns are classes.
Matrix nearest_support_distances(const FeatureSet& query, const FeatureSet& support);

// rho(c_i, c_j) = (1/r_max) * integral over [0, r_max] of the fraction of
// class-i queries whose nearest class-j support point is closer than r.
SimilarityMatrix cover_similarity(const FeatureSet& query, const FeatureSet& support,
                                  const CoverConfig& cfg);

// 1 - (A + A^T)/2 with a zero diagonal.
DistanceMatrix to_distance_matrix(const SimilarityMatrix& a);

// Euclidean distances between class mean vectors.
DistanceMatrix class_mean_distances(const FeatureSet& f);

// Cophenetic correlation: Pearson correlation of the i < j entries.
double ccc(const DistanceMatrix& d1, const DistanceMatrix& d2);

// Correlation between individual query/support distances across different
// classes and the reference distance of their classes. `sample == 0` uses
// every cross-class pair; otherwise that many pairs are drawn with `seed`.
double direct_correlation(const FeatureSet& query, const FeatureSet& support,
                          const DistanceMatrix& reference, std::size_t sample, std::uint64_t seed);

CoverStats cover_stats(const SimilarityMatrix& a);

}  // namespace hbias
