#pragma once

#include <string>
#include <utility>
#include <vector>

#include "hbias/features.hpp"
#include "hbias/labelspace.hpp"
#include "hbias/types.hpp"

namespace hbias {

// First- and second-order statistics of a feature snapshot.
//   global_mean  mean of all examples
//   class_means  row c is the mean of class c
//   sigma_b      Ave_c (mu_c - mu_G)(mu_c - mu_G)^T, unweighted over classes
//   sigma_w      Ave_i (h_i - mu_{y_i})(h_i - mu_{y_i})^T, over all examples
struct ClassStats {
  Vector global_mean;
  Matrix class_means;
  Matrix sigma_w;
  Matrix sigma_b;
  std::vector<std::size_t> counts;

  std::size_t class_count() const { return counts.size(); }
  // Class means minus the global mean, one row per class.
  Matrix centered_means() const;
};

// Last linear layer: logits = W h + b.
struct ClassifierHead {
  Matrix weights;  // C x p
  Vector bias;     // C

  std::size_t class_count() const { return static_cast<std::size_t>(weights.rows()); }
};

struct Nc1 {
  double value = 0.0;
  bool degenerate = false;  // Sigma_B is zero up to rounding; value is then 0
};

struct Nc2 {
  double beta_mu = 0.0;
  double beta_w = 0.0;
  double alpha_mu = 0.0;
  double alpha_w = 0.0;
};

struct NCReport {
  std::string label_space;
  double nc1 = 0.0;
  double beta_mu = 0.0;
  double beta_w = 0.0;
  double alpha_mu = 0.0;
  double alpha_w = 0.0;
  double nc3 = 0.0;
  double nc4 = 0.0;
  // Names of metrics whose inputs were degenerate; their values are 0.
  std::vector<std::string> degenerate_flags;
};

ClassStats class_statistics(const FeatureSet& f);

// Moore-Penrose pseudoinverse via SVD. Singular values at or below
// rel_tol * sigma_max are treated as zero.
Matrix pseudo_inverse(const Matrix& m, double rel_tol, std::size_t* rank = nullptr);

// tr(Sigma_W Sigma_B^+) / C, with the pseudoinverse cutoff at
// 1e-10 * sigma_max * max(p, C).
Nc1 nc1(const ClassStats& stats);

// Norm spread (beta) and cosine spread (alpha) of centered means and weight
// rows, population standard deviations.
Nc2 nc2_metrics(const ClassStats& stats, const ClassifierHead& head);

// || W^T/||W||_F - M/||M||_F ||_F with M the p x C centered means.
double nc3_self_duality(const ClassStats& stats, const ClassifierHead& head);

// Fraction of examples on which the linear head and the nearest class mean
// disagree. Ties resolve to the lower index on both sides.
double nc4_mismatch(const FeatureSet& f, const ClassStats& stats, const ClassifierHead& head);

// Nearest class mean for every row of `f`.
std::vector<Label> nearest_centroid(const FeatureSet& f, const Matrix& class_means);

// Superclass means, weights and biases are unweighted averages over member
// classes; Sigma_W re-centers every example on its superclass mean.
std::pair<ClassStats, ClassifierHead> lift_to_superclass(const ClassStats& stats,
                                                         const ClassifierHead& head,
                                                         const LabelSpace& s);

// All four NC statistics for a snapshot. Undefined quantities (fewer than two
// classes, zero-length vectors, zero matrices) are reported as 0 and flagged.
NCReport nc_report(const FeatureSet& f, const ClassStats& stats, const ClassifierHead& head,
                   std::string label_space);

}  // namespace hbias
