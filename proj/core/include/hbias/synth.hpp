#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "hbias/features.hpp"
#include "hbias/hierarchy.hpp"
#include "hbias/labelspace.hpp"
#include "hbias/metrics.hpp"
#include "hbias/types.hpp"

namespace hbias::synth {

// C equal-norm rows of length p with pairwise cosines -1/(C-1) summing to the
// zero vector (a simplex equiangular tight frame), each of norm `scale`.
Matrix gen_etf(std::size_t c_count, std::size_t dim, double scale = 1.0);

// root -> s<k> -> g<k>_<m> -> c<k>_<m>_<j>: `superclasses` top-level groups of
// `groups_per_superclass` groups of `classes_per_group` leaves. Classes are
// numbered in depth-first order.
Hierarchy gen_tree(std::size_t superclasses, std::size_t groups_per_superclass,
                   std::size_t classes_per_group);
// The top-level groups of gen_tree as a label space.
LabelSpace top_level_labelspace(const Hierarchy& tree);

// Class means whose squared pairwise distances equal edge_length^2 times the
// tree path length: every non-root node gets an orthonormal direction and a
// class sums the directions on its root path. Tree only; needs p >= nodes - 1.
Matrix gen_hierarchy_embedded_means(const Hierarchy& tree, std::size_t dim, double edge_length,
                                    std::uint64_t seed);

// `per_class` samples per class around `means` with isotropic noise.
FeatureSet sample_features(const Matrix& means, std::size_t per_class, double noise,
                           std::uint64_t seed);

struct TrajectoryParams {
  std::vector<double> hypernym_gap;  // per epoch, scale of the superclass anchor
  std::vector<double> hyponym_gap;   // per epoch, scale of the class direction
  std::vector<double> noise;         // per epoch, within-class standard deviation
  std::size_t dim = 64;
  std::size_t examples_per_class = 20;
  std::uint64_t seed = 0;

  std::size_t epochs() const { return noise.size(); }
  void validate() const;

  // Hypernym separation saturates within a few epochs and fades toward the
  // end; hyponym separation grows slowly; noise falls linearly to zero.
  static TrajectoryParams standard(std::size_t epochs, std::uint64_t seed);
};

// Reads `key=value` lines (`#` comments). Keys: epochs, dim,
// examples_per_class, seed, and hypernym_gap / hyponym_gap / noise as comma
// separated per-epoch lists. Missing schedules come from standard().
TrajectoryParams read_trajectory_params(std::istream& in);

// One feature snapshot per epoch (epoch tags 1..T). Class c of superclass s
// has mean hypernym_gap(t) * anchor_s + hyponym_gap(t) * dir_c; anchors are
// orthonormal, class directions are isotropic unit vectors orthogonal to all
// anchors. Directions are drawn once; each epoch's noise has its own stream.
std::vector<FeatureSet> gen_hierarchical_trajectory(const LabelSpace& s, const TrajectoryParams& params);

// Nearest-class-mean predictions on each snapshot, as a hyponym prediction
// log (epoch tags and example ids "e<row>" preserved).
PredictionLog nearest_centroid_log(std::span<const FeatureSet> trajectory);

struct PredictionTrajectory {
  PredictionLog log;
  // Epochs at which some error had to fall back to a uniform draw because the
  // true superclass has a single member.
  std::vector<Epoch> fallback_epochs;
};

// Example i has true class i mod C. Per epoch t (tags 1..T) a prediction is
// correct with probability accuracy[t]; an error stays inside the true
// superclass with probability within_fraction[t] and is otherwise uniform over
// all wrong classes.
PredictionTrajectory gen_prediction_trajectory(const LabelSpace& s, std::span<const double> accuracy,
                                               std::span<const double> within_fraction,
                                               std::size_t examples, std::uint64_t seed);

struct MonteCarloEstimate {
  double estimate = 0.0;
  double standard_error = 0.0;
};

// Simulated superclass hit rate of a greedy classifier with hyponym accuracy
// p_h whose mistakes pick a superclass by its size share.
MonteCarloEstimate mc_superclass_accuracy(double p_h, std::span<const std::size_t> sizes,
                                          std::size_t trials, std::uint64_t seed);

}  // namespace hbias::synth
