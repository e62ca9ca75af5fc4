#include "hbias/collapse.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/SVD>

#include "hbias/error.hpp"

namespace hbias {

Matrix ClassStats::centered_means() const {
  return class_means.rowwise() - global_mean.transpose();
}

ClassStats class_statistics(const FeatureSet& f) {
  f.validate();
  if (f.size() == 0) throw Error("class statistics: empty feature set");
  const auto c_count = static_cast<Eigen::Index>(f.class_count);
  const Eigen::Index p = f.vectors.cols();

  ClassStats s;
  s.counts = f.class_counts();
  for (std::size_t c = 0; c < s.counts.size(); ++c) {
    if (s.counts[c] == 0) throw Error("class statistics: class " + std::to_string(c) + " has no examples");
  }
  s.global_mean = f.vectors.colwise().mean().transpose();
  s.class_means = Matrix::Zero(c_count, p);
  for (std::size_t i = 0; i < f.size(); ++i) {
    s.class_means.row(f.labels[i]) += f.vectors.row(static_cast<Eigen::Index>(i));
  }
  for (Eigen::Index c = 0; c < c_count; ++c) {
    s.class_means.row(c) /= static_cast<double>(s.counts[static_cast<std::size_t>(c)]);
  }

  Matrix within(f.vectors.rows(), p);
  for (std::size_t i = 0; i < f.size(); ++i) {
    within.row(static_cast<Eigen::Index>(i)) =
        f.vectors.row(static_cast<Eigen::Index>(i)) - s.class_means.row(f.labels[i]);
  }
  s.sigma_w = within.transpose() * within / static_cast<double>(f.size());
  const Matrix centered = s.centered_means();
  s.sigma_b = centered.transpose() * centered / static_cast<double>(c_count);
  return s;
}

Matrix pseudo_inverse(const Matrix& m, double rel_tol, std::size_t* rank) {
  Eigen::BDCSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& sv = svd.singularValues();
  const double cutoff = sv.size() ? rel_tol * sv(0) : 0.0;
  Vector inv = Vector::Zero(sv.size());
  std::size_t r = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > cutoff) {
      inv(i) = 1.0 / sv(i);
      ++r;
    }
  }
  if (rank) *rank = r;
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

namespace {

// Centered means are differences of nearly equal vectors when classes share a
// mean, so "zero" is judged against the size of the raw means.
double mean_scale(const ClassStats& stats) {
  return stats.class_means.size() ? stats.class_means.rowwise().norm().maxCoeff() : 0.0;
}

}  // namespace

Nc1 nc1(const ClassStats& stats) {
  const auto c_count = stats.class_count();
  const auto p = static_cast<std::size_t>(stats.sigma_b.rows());
  Nc1 out;
  const double scale = mean_scale(stats);
  if (stats.sigma_b.cwiseAbs().maxCoeff() <= 1e-24 * scale * scale) {
    out.degenerate = true;
    return out;
  }
  std::size_t rank = 0;
  const Matrix pinv = pseudo_inverse(stats.sigma_b, 1e-10 * static_cast<double>(std::max(p, c_count)), &rank);
  out.degenerate = rank == 0;
  out.value = (stats.sigma_w * pinv).trace() / static_cast<double>(c_count);
  return out;
}

namespace {

double population_std(const std::vector<double>& xs, double mean) {
  double acc = 0.0;
  for (double x : xs) acc += (x - mean) * (x - mean);
  return std::sqrt(acc / static_cast<double>(xs.size()));
}

double mean_of(const std::vector<double>& xs) {
  double acc = 0.0;
  for (double x : xs) acc += x;
  return acc / static_cast<double>(xs.size());
}

// (beta, alpha) for the rows of `rows`.
std::pair<double, double> spread(const Matrix& rows, const char* what, double zero) {
  if (rows.rows() < 2) throw Error(std::string("nc2: ") + what + " needs at least two classes");
  std::vector<double> norms;
  for (Eigen::Index i = 0; i < rows.rows(); ++i) {
    const double n = rows.row(i).norm();
    if (!(n > zero)) throw Error(std::string("nc2: zero-length ") + what + " for class " + std::to_string(i));
    norms.push_back(n);
  }
  const double avg = mean_of(norms);
  const double beta = population_std(norms, avg) / avg;

  std::vector<double> cosines;
  for (Eigen::Index i = 0; i < rows.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < rows.rows(); ++j) {
      cosines.push_back(rows.row(i).dot(rows.row(j)) / (norms[static_cast<std::size_t>(i)] *
                                                        norms[static_cast<std::size_t>(j)]));
    }
  }
  const double alpha = population_std(cosines, mean_of(cosines));
  return {beta, alpha};
}

void check_head(const ClassStats& stats, const ClassifierHead& head) {
  if (head.class_count() != stats.class_count() || head.bias.size() != head.weights.rows()) {
    throw Error("classifier head has " + std::to_string(head.class_count()) + " rows but the label space has " +
                std::to_string(stats.class_count()) + " labels");
  }
  if (head.weights.cols() != stats.class_means.cols()) {
    throw Error("classifier head dimension does not match the features");
  }
}

}  // namespace

Nc2 nc2_metrics(const ClassStats& stats, const ClassifierHead& head) {
  check_head(stats, head);
  const auto [beta_mu, alpha_mu] = spread(stats.centered_means(), "class mean", 1e-12 * mean_scale(stats));
  const auto [beta_w, alpha_w] = spread(head.weights, "weight row", 0.0);
  return {beta_mu, beta_w, alpha_mu, alpha_w};
}

double nc3_self_duality(const ClassStats& stats, const ClassifierHead& head) {
  check_head(stats, head);
  const Matrix means = stats.centered_means().transpose();  // p x C
  const double wn = head.weights.norm();
  const double mn = means.norm();
  if (!(wn > 0.0) || !(mn > 1e-12 * mean_scale(stats))) throw Error("nc3: zero weight or mean matrix");
  return (head.weights.transpose() / wn - means / mn).norm();
}

std::vector<Label> nearest_centroid(const FeatureSet& f, const Matrix& class_means) {
  std::vector<Label> out(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    const auto h = f.vectors.row(static_cast<Eigen::Index>(i));
    Eigen::Index best = 0;
    double best_d = (h - class_means.row(0)).squaredNorm();
    for (Eigen::Index c = 1; c < class_means.rows(); ++c) {
      const double d = (h - class_means.row(c)).squaredNorm();
      if (d < best_d) {
        best_d = d;
        best = c;
      }
    }
    out[i] = static_cast<Label>(best);
  }
  return out;
}

double nc4_mismatch(const FeatureSet& f, const ClassStats& stats, const ClassifierHead& head) {
  check_head(stats, head);
  if (f.size() == 0) return 0.0;
  if (f.vectors.cols() != head.weights.cols()) throw Error("nc4: feature dimension does not match the head");
  const auto ncc = nearest_centroid(f, stats.class_means);
  std::size_t mismatches = 0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const Vector logits = head.weights * f.vectors.row(static_cast<Eigen::Index>(i)).transpose() + head.bias;
    Eigen::Index linear = 0;
    for (Eigen::Index c = 1; c < logits.size(); ++c) {
      if (logits(c) > logits(linear)) linear = c;
    }
    mismatches += static_cast<Label>(linear) != ncc[i];
  }
  return static_cast<double>(mismatches) / static_cast<double>(f.size());
}

std::pair<ClassStats, ClassifierHead> lift_to_superclass(const ClassStats& stats,
                                                         const ClassifierHead& head,
                                                         const LabelSpace& s) {
  check_head(stats, head);
  if (s.class_count() != stats.class_count()) {
    throw Error("lift: label space covers " + std::to_string(s.class_count()) + " classes, statistics have " +
                std::to_string(stats.class_count()));
  }
  const auto s_count = static_cast<Eigen::Index>(s.size());
  const Eigen::Index p = stats.class_means.cols();

  ClassStats lifted;
  lifted.global_mean = stats.global_mean;
  lifted.class_means = Matrix::Zero(s_count, p);
  lifted.counts.assign(s.size(), 0);
  ClassifierHead lifted_head{Matrix::Zero(s_count, p), Vector::Zero(s_count)};
  for (Eigen::Index k = 0; k < s_count; ++k) {
    const auto& members = s[static_cast<std::size_t>(k)].members;
    for (Label c : members) {
      lifted.class_means.row(k) += stats.class_means.row(c);
      lifted_head.weights.row(k) += head.weights.row(c);
      lifted_head.bias(k) += head.bias(c);
      lifted.counts[static_cast<std::size_t>(k)] += stats.counts[c];
    }
    const auto n = static_cast<double>(members.size());
    lifted.class_means.row(k) /= n;
    lifted_head.weights.row(k) /= n;
    lifted_head.bias(k) /= n;
  }

  // Ave_i (h - mu_s)(h - mu_s)^T splits into the class-level Sigma_W plus the
  // count-weighted scatter of class means around their superclass mean.
  std::size_t total = 0;
  for (auto n : stats.counts) total += n;
  lifted.sigma_w = stats.sigma_w;
  for (Label c = 0; c < stats.class_count(); ++c) {
    const Vector offset = (stats.class_means.row(c) - lifted.class_means.row(s.mapping()[c])).transpose();
    lifted.sigma_w += (static_cast<double>(stats.counts[c]) / static_cast<double>(total)) * offset * offset.transpose();
  }
  const Matrix centered = lifted.centered_means();
  lifted.sigma_b = centered.transpose() * centered / static_cast<double>(s_count);
  return {std::move(lifted), std::move(lifted_head)};
}

NCReport nc_report(const FeatureSet& f, const ClassStats& stats, const ClassifierHead& head,
                   std::string label_space) {
  NCReport r;
  r.label_space = std::move(label_space);
  const Nc1 first = nc1(stats);
  r.nc1 = first.value;
  if (first.degenerate) r.degenerate_flags.push_back("nc1");
  try {
    const Nc2 second = nc2_metrics(stats, head);
    r.beta_mu = second.beta_mu;
    r.beta_w = second.beta_w;
    r.alpha_mu = second.alpha_mu;
    r.alpha_w = second.alpha_w;
  } catch (const Error&) {
    r.degenerate_flags.push_back("nc2");
  }
  try {
    r.nc3 = nc3_self_duality(stats, head);
  } catch (const Error&) {
    r.degenerate_flags.push_back("nc3");
  }
  r.nc4 = nc4_mismatch(f, stats, head);
  return r;
}

}  // namespace hbias
