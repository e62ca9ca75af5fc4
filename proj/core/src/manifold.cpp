#include "hbias/manifold.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "hbias/error.hpp"
#include "hbias/random.hpp"

namespace hbias {

void FeatureSet::validate() const {
  if (static_cast<std::size_t>(vectors.rows()) != labels.size()) {
    throw Error("feature set: " + std::to_string(vectors.rows()) + " vectors but " +
                std::to_string(labels.size()) + " labels");
  }
  if (!vectors.allFinite()) throw Error("feature set: non-finite value");
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] >= class_count) {
      throw Error("feature set: row " + std::to_string(i) + " has label " + std::to_string(labels[i]) +
                  " >= C=" + std::to_string(class_count));
    }
  }
}

std::vector<std::size_t> FeatureSet::class_counts() const {
  std::vector<std::size_t> out(class_count, 0);
  for (Label l : labels) ++out.at(l);
  return out;
}

std::vector<std::vector<std::size_t>> FeatureSet::rows_by_class() const {
  std::vector<std::vector<std::size_t>> out(class_count);
  for (std::size_t i = 0; i < labels.size(); ++i) out.at(labels[i]).push_back(i);
  return out;
}

std::pair<FeatureSet, FeatureSet> split_query_support(const FeatureSet& f, const CoverConfig& cfg) {
  f.validate();
  if (cfg.k == 0) throw Error("split: k must be positive");
  const auto rows = f.rows_by_class();
  for (std::size_t c = 0; c < rows.size(); ++c) {
    if (rows[c].size() < 2 * cfg.k) {
      throw Error("split: class " + std::to_string(c) + " has " + std::to_string(rows[c].size()) +
                  " examples, needs " + std::to_string(2 * cfg.k));
    }
  }
  const auto per_side = static_cast<Eigen::Index>(f.class_count * cfg.k);
  FeatureSet query{Matrix(per_side, f.vectors.cols()), {}, f.class_count, f.epoch};
  FeatureSet support = query;
  query.labels.reserve(per_side);
  support.labels.reserve(per_side);

  const CounterRng root(cfg.seed);
  Eigen::Index out_row = 0;
  for (std::size_t c = 0; c < rows.size(); ++c) {
    std::vector<std::size_t> pool = rows[c];
    CounterRng rng = root.substream(c);
    // Partial Fisher-Yates: the first 2k slots become a uniform sample.
    for (std::size_t i = 0; i < 2 * cfg.k; ++i) {
      std::swap(pool[i], pool[i + rng.below(pool.size() - i)]);
    }
    for (std::size_t i = 0; i < cfg.k; ++i, ++out_row) {
      query.vectors.row(out_row) = f.vectors.row(static_cast<Eigen::Index>(pool[i]));
      support.vectors.row(out_row) = f.vectors.row(static_cast<Eigen::Index>(pool[cfg.k + i]));
      query.labels.push_back(static_cast<Label>(c));
      support.labels.push_back(static_cast<Label>(c));
    }
  }
  return {std::move(query), std::move(support)};
}

Matrix nearest_support_distances(const FeatureSet& query, const FeatureSet& support) {
  query.validate();
  support.validate();
  if (query.class_count != support.class_count) {
    throw Error("cover: query and support disagree on the class count");
  }
  if (query.dim() != support.dim()) throw Error("cover: query and support dimensions differ");
  const auto counts = support.class_counts();
  for (std::size_t c = 0; c < counts.size(); ++c) {
    if (counts[c] == 0) throw Error("cover: class " + std::to_string(c) + " has no support examples");
  }
  const auto nq = static_cast<Eigen::Index>(query.size());
  const auto ns = static_cast<Eigen::Index>(support.size());
  Matrix best = Matrix::Constant(nq, static_cast<Eigen::Index>(query.class_count),
                                 std::numeric_limits<double>::infinity());
  for (Eigen::Index u = 0; u < nq; ++u) {
    for (Eigen::Index v = 0; v < ns; ++v) {
      const double d2 = (query.vectors.row(u) - support.vectors.row(v)).squaredNorm();
      double& slot = best(u, support.labels[static_cast<std::size_t>(v)]);
      slot = std::min(slot, d2);
    }
  }
  return best.cwiseSqrt();
}

SimilarityMatrix cover_similarity(const FeatureSet& query, const FeatureSet& support,
                                  const CoverConfig& cfg) {
  if (cfg.grid_points < 2) throw Error("cover: grid_points must be at least 2");
  const Matrix nearest = nearest_support_distances(query, support);
  const double r_max = cfg.r_max ? *cfg.r_max : (nearest.size() ? nearest.maxCoeff() : 0.0);
  if (!(r_max > 0.0)) throw Error("cover: r_max must be positive");

  const auto rows = query.rows_by_class();
  const auto c_count = static_cast<Eigen::Index>(query.class_count);
  SimilarityMatrix out{{}, Matrix::Zero(c_count, c_count), r_max};
  out.labels.resize(query.class_count);
  std::iota(out.labels.begin(), out.labels.end(), Label{0});

  const std::size_t g_count = cfg.grid_points;
  const double step = r_max / static_cast<double>(g_count - 1);
  std::vector<double> dists;
  for (Eigen::Index i = 0; i < c_count; ++i) {
    const auto& members = rows[static_cast<std::size_t>(i)];
    if (members.empty()) throw Error("cover: class " + std::to_string(i) + " has no query examples");
    const double inv_n = 1.0 / static_cast<double>(members.size());
    for (Eigen::Index j = 0; j < c_count; ++j) {
      dists.clear();
      for (std::size_t u : members) dists.push_back(nearest(static_cast<Eigen::Index>(u), j));
      double rho = 0.0;
      if (cfg.integration == Integration::exact) {
        // Each query contributes the length of [d, r_max] over which it is covered.
        for (double d : dists) rho += std::max(0.0, 1.0 - d / r_max);
        rho *= inv_n;
      } else {
        for (std::size_t g = 0; g < g_count; ++g) {
          const double r = static_cast<double>(g) * step;
          std::size_t covered = 0;
          for (double d : dists) covered += d < r;
          const double weight = (g == 0 || g + 1 == g_count) ? 0.5 : 1.0;
          rho += weight * static_cast<double>(covered) * inv_n;
        }
        rho /= static_cast<double>(g_count - 1);
      }
      out.values(i, j) = rho;
    }
  }
  return out;
}

DistanceMatrix to_distance_matrix(const SimilarityMatrix& a) {
  const Eigen::Index n = a.values.rows();
  DistanceMatrix out{a.labels, Matrix::Zero(n, n)};
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double d = 1.0 - 0.5 * (a.values(i, j) + a.values(j, i));
      out.values(i, j) = out.values(j, i) = d;
    }
  }
  return out;
}

DistanceMatrix class_mean_distances(const FeatureSet& f) {
  f.validate();
  const auto n = static_cast<Eigen::Index>(f.class_count);
  Matrix means = Matrix::Zero(n, f.vectors.cols());
  const auto counts = f.class_counts();
  for (std::size_t i = 0; i < f.size(); ++i) means.row(f.labels[i]) += f.vectors.row(static_cast<Eigen::Index>(i));
  for (Eigen::Index c = 0; c < n; ++c) {
    if (counts[static_cast<std::size_t>(c)] == 0) throw Error("class means: class " + std::to_string(c) + " is empty");
    means.row(c) /= static_cast<double>(counts[static_cast<std::size_t>(c)]);
  }
  DistanceMatrix out{{}, Matrix::Zero(n, n)};
  out.labels.resize(f.class_count);
  std::iota(out.labels.begin(), out.labels.end(), Label{0});
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      out.values(i, j) = out.values(j, i) = (means.row(i) - means.row(j)).norm();
    }
  }
  return out;
}

namespace {

double pearson(std::span<const double> x, std::span<const double> y, const char* what) {
  const auto n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (!(sxx > 0.0) || !(syy > 0.0)) throw Error(std::string(what) + ": zero variance, correlation undefined");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

}  // namespace

double ccc(const DistanceMatrix& d1, const DistanceMatrix& d2) {
  if (d1.labels != d2.labels) throw Error("ccc: matrices have different label orders");
  const Eigen::Index n = d1.values.rows();
  if (d1.values.cols() != n || d2.values.rows() != n || d2.values.cols() != n) {
    throw Error("ccc: matrices must be square and of equal size");
  }
  std::vector<double> x, y;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      x.push_back(d1.values(i, j));
      y.push_back(d2.values(i, j));
    }
  }
  if (x.size() < 2) throw Error("ccc: need at least three classes");
  return pearson(x, y, "ccc");
}

double direct_correlation(const FeatureSet& query, const FeatureSet& support,
                          const DistanceMatrix& reference, std::size_t sample, std::uint64_t seed) {
  query.validate();
  support.validate();
  std::vector<std::size_t> position(query.class_count, reference.size());
  for (std::size_t i = 0; i < reference.size(); ++i) {
    if (reference.labels[i] < position.size()) position[reference.labels[i]] = i;
  }
  auto ref = [&](Label a, Label b) {
    const std::size_t i = position.at(a), j = position.at(b);
    if (i == reference.size() || j == reference.size()) {
      throw Error("direct correlation: class missing from reference distances");
    }
    return reference.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  };
  std::vector<double> feature_d, ref_d;
  auto add = [&](std::size_t u, std::size_t v) {
    feature_d.push_back((query.vectors.row(static_cast<Eigen::Index>(u)) -
                         support.vectors.row(static_cast<Eigen::Index>(v))).norm());
    ref_d.push_back(ref(query.labels[u], support.labels[v]));
  };
  if (sample == 0) {
    for (std::size_t u = 0; u < query.size(); ++u) {
      for (std::size_t v = 0; v < support.size(); ++v) {
        if (query.labels[u] != support.labels[v]) add(u, v);
      }
    }
  } else {
    if (query.size() == 0 || support.size() == 0) throw Error("direct correlation: empty feature set");
    CounterRng rng(seed);
    std::size_t attempts = 0;
    while (feature_d.size() < sample) {
      if (++attempts > 1000 * sample) throw Error("direct correlation: no cross-class pairs");
      const std::size_t u = rng.below(query.size());
      const std::size_t v = rng.below(support.size());
      if (query.labels[u] != support.labels[v]) add(u, v);
    }
  }
  if (feature_d.size() < 2) throw Error("direct correlation: fewer than two cross-class pairs");
  return pearson(feature_d, ref_d, "direct correlation");
}

CoverStats cover_stats(const SimilarityMatrix& a) {
  const Eigen::Index n = a.values.rows();
  if (n == 0) throw Error("cover stats: empty similarity matrix");
  CoverStats out;
  out.self_cover = a.values.diagonal().mean();
  if (n > 1) {
    out.mutual_cover = (a.values.sum() - a.values.diagonal().sum()) / static_cast<double>(n * (n - 1));
  }
  return out;
}

}  // namespace hbias
