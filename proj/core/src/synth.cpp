#include "hbias/synth.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <numeric>

#include "hbias/collapse.hpp"
#include "hbias/error.hpp"
#include "hbias/random.hpp"
#include "text.hpp"

namespace hbias::synth {

namespace {

// Stream ids under the user seed.
constexpr std::uint64_t kDirectionStream = 1;
constexpr std::uint64_t kEpochStreamBase = 1'000'000;

Matrix gaussian(CounterRng& rng, Eigen::Index rows, Eigen::Index cols) {
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = rng.normal();
  }
  return m;
}

// Rows become orthonormal (modified Gram-Schmidt, applied twice for accuracy).
void orthonormalize_rows(Matrix& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (int pass = 0; pass < 2; ++pass) {
      for (Eigen::Index j = 0; j < i; ++j) m.row(i) -= m.row(i).dot(m.row(j)) * m.row(j);
    }
    const double n = m.row(i).norm();
    if (!(n > 1e-12)) throw Error("synth: degenerate random direction");
    m.row(i) /= n;
  }
}

std::vector<double> parse_list(std::string_view value, const std::string& key) {
  std::vector<double> out;
  for (auto field : detail::split(value, ',')) {
    double v = 0.0;
    if (!detail::parse_number(field, v)) throw Error("trajectory config: bad number in '" + key + "'");
    out.push_back(v);
  }
  return out;
}

}  // namespace

Matrix gen_etf(std::size_t c_count, std::size_t dim, double scale) {
  if (c_count < 2) throw Error("gen_etf: need at least two classes");
  if (dim + 1 < c_count) {
    throw Error("gen_etf: dimension " + std::to_string(dim) + " < C - 1 = " + std::to_string(c_count - 1));
  }
  if (!(scale > 0.0)) throw Error("gen_etf: scale must be positive");
  const auto c = static_cast<Eigen::Index>(c_count);
  // Centered standard basis, expressed in the Helmert basis of the plane
  // orthogonal to the all-ones vector, then zero-padded to `dim`.
  Matrix centered = Matrix::Identity(c, c) - Matrix::Constant(c, c, 1.0 / static_cast<double>(c));
  Matrix helmert = Matrix::Zero(c, c - 1);
  for (Eigen::Index k = 1; k < c; ++k) {
    const double norm = std::sqrt(static_cast<double>(k * (k + 1)));
    helmert.col(k - 1).head(k).setConstant(1.0 / norm);
    helmert(k, k - 1) = -static_cast<double>(k) / norm;
  }
  Matrix out = Matrix::Zero(c, static_cast<Eigen::Index>(dim));
  out.leftCols(c - 1) = centered * helmert;
  for (Eigen::Index i = 0; i < c; ++i) out.row(i) *= scale / out.row(i).norm();
  return out;
}

Hierarchy gen_tree(std::size_t superclasses, std::size_t groups_per_superclass,
                   std::size_t classes_per_group) {
  if (superclasses == 0 || groups_per_superclass == 0 || classes_per_group == 0) {
    throw Error("gen_tree: all branching factors must be positive");
  }
  std::vector<Hierarchy::Edge> edges;
  std::vector<std::string> leaves;
  for (std::size_t k = 0; k < superclasses; ++k) {
    const std::string s = "s" + std::to_string(k);
    edges.emplace_back("root", s);
    for (std::size_t m = 0; m < groups_per_superclass; ++m) {
      const std::string g = "g" + std::to_string(k) + "_" + std::to_string(m);
      edges.emplace_back(s, g);
      for (std::size_t j = 0; j < classes_per_group; ++j) {
        const std::string leaf = "c" + std::to_string(k) + "_" + std::to_string(m) + "_" + std::to_string(j);
        edges.emplace_back(g, leaf);
        leaves.push_back(leaf);
      }
    }
  }
  return Hierarchy::from_edges(edges, leaves);
}

LabelSpace top_level_labelspace(const Hierarchy& tree) {
  const auto roots = tree.roots();
  if (roots.size() != 1) throw Error("top-level label space: hierarchy must have a single root");
  std::vector<GroupSpec> groups;
  for (NodeId n : tree.children(roots.front())) groups.push_back({tree.name(n), {tree.name(n)}});
  return build_labelspace(tree, groups, "hypernym");
}

Matrix gen_hierarchy_embedded_means(const Hierarchy& tree, std::size_t dim, double edge_length,
                                    std::uint64_t seed) {
  if (!tree.is_tree()) throw Error("embedded means: hierarchy is not a tree");
  const auto nodes = static_cast<Eigen::Index>(tree.node_count());
  if (static_cast<Eigen::Index>(dim) < nodes) {
    throw Error("embedded means: need dim >= " + std::to_string(nodes) + " node directions");
  }
  CounterRng rng = CounterRng(seed).substream(kDirectionStream);
  Matrix dirs = gaussian(rng, nodes, static_cast<Eigen::Index>(dim));
  orthonormalize_rows(dirs);
  Matrix means = Matrix::Zero(static_cast<Eigen::Index>(tree.class_count()), static_cast<Eigen::Index>(dim));
  for (Label c = 0; c < tree.class_count(); ++c) {
    NodeId n = tree.class_node(c);
    while (!tree.parents(n).empty()) {
      means.row(c) += edge_length * dirs.row(n);
      n = tree.parents(n).front();
    }
  }
  return means;
}

FeatureSet sample_features(const Matrix& means, std::size_t per_class, double noise,
                           std::uint64_t seed) {
  if (noise < 0.0) throw Error("sample_features: negative noise");
  const Eigen::Index c_count = means.rows();
  FeatureSet f{Matrix(c_count * static_cast<Eigen::Index>(per_class), means.cols()), {},
               static_cast<std::size_t>(c_count), std::nullopt};
  f.labels.reserve(static_cast<std::size_t>(f.vectors.rows()));
  CounterRng rng(seed);
  Eigen::Index row = 0;
  for (Eigen::Index c = 0; c < c_count; ++c) {
    for (std::size_t j = 0; j < per_class; ++j, ++row) {
      for (Eigen::Index d = 0; d < means.cols(); ++d) {
        f.vectors(row, d) = means(c, d) + (noise > 0.0 ? noise * rng.normal() : 0.0);
      }
      f.labels.push_back(static_cast<Label>(c));
    }
  }
  return f;
}

void TrajectoryParams::validate() const {
  if (noise.empty()) throw Error("trajectory: no epochs");
  if (hypernym_gap.size() != noise.size() || hyponym_gap.size() != noise.size()) {
    throw Error("trajectory: schedules have different lengths");
  }
  auto non_negative = [](const std::vector<double>& v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return x >= 0.0 && std::isfinite(x); });
  };
  if (!non_negative(hypernym_gap) || !non_negative(hyponym_gap) || !non_negative(noise)) {
    throw Error("trajectory: schedules must be finite and non-negative");
  }
  if (examples_per_class == 0) throw Error("trajectory: examples_per_class must be positive");
}

TrajectoryParams TrajectoryParams::standard(std::size_t epochs, std::uint64_t seed) {
  if (epochs == 0) throw Error("trajectory: no epochs");
  TrajectoryParams p;
  p.seed = seed;
  const double total = static_cast<double>(epochs);
  for (std::size_t e = 1; e <= epochs; ++e) {
    const double t = static_cast<double>(e);
    const double fade = 1.0 - 0.8 * std::max(0.0, (t - 0.5 * total) / (0.5 * total));
    p.hypernym_gap.push_back((1.0 - std::exp(-t / 2.0)) * fade);
    p.hyponym_gap.push_back(1.0 - std::exp(-t / (0.3 * total)));
    p.noise.push_back(0.3 * (1.0 - t / total));
  }
  return p;
}

TrajectoryParams read_trajectory_params(std::istream& in) {
  std::map<std::string, std::string> kv;
  detail::LineReader lines(in, "trajectory config");
  while (auto line = lines.next()) {
    const auto eq = line->find('=');
    if (eq == std::string_view::npos) throw ParseError("trajectory config", lines.number(), "expected key=value");
    auto trim = [](std::string_view s) {
      while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
      while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
      return std::string(s);
    };
    const std::string key = trim(line->substr(0, eq));
    static const std::vector<std::string> known{"epochs", "dim", "examples_per_class", "seed",
                                                "hypernym_gap", "hyponym_gap", "noise"};
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw ParseError("trajectory config", lines.number(), "unknown key '" + key + "'");
    }
    kv[key] = trim(line->substr(eq + 1));
  }
  auto get_uint = [&](const std::string& key, std::size_t fallback) {
    auto it = kv.find(key);
    if (it == kv.end()) return fallback;
    std::size_t v = 0;
    if (!detail::parse_uint(it->second, v)) throw Error("trajectory config: bad integer for '" + key + "'");
    return v;
  };
  std::size_t epochs = get_uint("epochs", 0);
  for (const char* key : {"noise", "hypernym_gap", "hyponym_gap"}) {
    if (epochs == 0 && kv.contains(key)) epochs = parse_list(kv[key], key).size();
  }
  if (epochs == 0) epochs = 40;
  std::uint64_t seed = 0;
  if (auto it = kv.find("seed"); it != kv.end() && !detail::parse_number(it->second, seed)) {
    throw Error("trajectory config: bad integer for 'seed'");
  }
  TrajectoryParams p = TrajectoryParams::standard(epochs, seed);
  p.dim = get_uint("dim", p.dim);
  p.examples_per_class = get_uint("examples_per_class", p.examples_per_class);
  if (kv.contains("hypernym_gap")) p.hypernym_gap = parse_list(kv["hypernym_gap"], "hypernym_gap");
  if (kv.contains("hyponym_gap")) p.hyponym_gap = parse_list(kv["hyponym_gap"], "hyponym_gap");
  if (kv.contains("noise")) p.noise = parse_list(kv["noise"], "noise");
  p.validate();
  return p;
}

std::vector<FeatureSet> gen_hierarchical_trajectory(const LabelSpace& s, const TrajectoryParams& params) {
  params.validate();
  const auto s_count = static_cast<Eigen::Index>(s.size());
  const auto c_count = static_cast<Eigen::Index>(s.class_count());
  const auto dim = static_cast<Eigen::Index>(params.dim);
  if (dim <= s_count) throw Error("trajectory: dim must exceed the number of superclasses");

  const CounterRng root(params.seed);
  CounterRng dir_rng = root.substream(kDirectionStream);
  Matrix anchors = gaussian(dir_rng, s_count, dim);
  orthonormalize_rows(anchors);
  Matrix class_dirs = gaussian(dir_rng, c_count, dim);
  for (Eigen::Index c = 0; c < c_count; ++c) {
    for (Eigen::Index k = 0; k < s_count; ++k) {
      class_dirs.row(c) -= class_dirs.row(c).dot(anchors.row(k)) * anchors.row(k);
    }
    class_dirs.row(c).normalize();
  }

  std::vector<FeatureSet> out;
  out.reserve(params.epochs());
  for (std::size_t e = 0; e < params.epochs(); ++e) {
    Matrix means(c_count, dim);
    for (Eigen::Index c = 0; c < c_count; ++c) {
      means.row(c) = params.hypernym_gap[e] * anchors.row(s.mapping()[static_cast<Label>(c)]) +
                     params.hyponym_gap[e] * class_dirs.row(c);
    }
    CounterRng noise_rng = root.substream(kEpochStreamBase + e);
    FeatureSet f = sample_features(means, params.examples_per_class, params.noise[e], noise_rng.next_u64());
    f.epoch = static_cast<std::int64_t>(e + 1);
    out.push_back(std::move(f));
  }
  return out;
}

PredictionLog nearest_centroid_log(std::span<const FeatureSet> trajectory) {
  std::vector<PredictionRecord> records;
  std::size_t label_count = 0;
  for (std::size_t e = 0; e < trajectory.size(); ++e) {
    const FeatureSet& f = trajectory[e];
    label_count = std::max(label_count, f.class_count);
    const ClassStats stats = class_statistics(f);
    const auto pred = nearest_centroid(f, stats.class_means);
    const Epoch epoch = f.epoch ? *f.epoch : static_cast<Epoch>(e + 1);
    for (std::size_t i = 0; i < f.size(); ++i) {
      records.push_back({epoch, "e" + std::to_string(i), f.labels[i], pred[i]});
    }
  }
  return PredictionLog(std::move(records), label_count);
}

PredictionTrajectory gen_prediction_trajectory(const LabelSpace& s, std::span<const double> accuracy,
                                               std::span<const double> within_fraction,
                                               std::size_t examples, std::uint64_t seed) {
  if (accuracy.size() != within_fraction.size()) throw Error("prediction trajectory: schedule lengths differ");
  auto in_unit = [](double x) { return x >= 0.0 && x <= 1.0; };
  if (!std::all_of(accuracy.begin(), accuracy.end(), in_unit) ||
      !std::all_of(within_fraction.begin(), within_fraction.end(), in_unit)) {
    throw Error("prediction trajectory: schedules must lie in [0, 1]");
  }
  const std::size_t c_count = s.class_count();
  if (c_count < 2) throw Error("prediction trajectory: need at least two classes");

  PredictionTrajectory out;
  std::vector<PredictionRecord> records;
  records.reserve(accuracy.size() * examples);
  const CounterRng root(seed);
  for (std::size_t e = 0; e < accuracy.size(); ++e) {
    const auto epoch = static_cast<Epoch>(e + 1);
    CounterRng rng = root.substream(kEpochStreamBase + e);
    bool fell_back = false;
    for (std::size_t i = 0; i < examples; ++i) {
      const auto truth = static_cast<Label>(i % c_count);
      Label pred = truth;
      if (!rng.bernoulli(accuracy[e])) {
        const auto& members = s[s.mapping()[truth]].members;
        bool uniform = true;
        if (rng.bernoulli(within_fraction[e])) {
          if (members.size() > 1) {
            const auto pick = rng.below(members.size() - 1);
            const auto pos = static_cast<std::size_t>(
                std::lower_bound(members.begin(), members.end(), truth) - members.begin());
            pred = members[pick < pos ? pick : pick + 1];
            uniform = false;
          } else {
            fell_back = true;
          }
        }
        if (uniform) {
          const auto pick = static_cast<Label>(rng.below(c_count - 1));
          pred = pick < truth ? pick : pick + 1;
        }
      }
      records.push_back({epoch, "x" + std::to_string(i), truth, pred});
    }
    if (fell_back) out.fallback_epochs.push_back(epoch);
  }
  out.log = PredictionLog(std::move(records), c_count);
  return out;
}

MonteCarloEstimate mc_superclass_accuracy(double p_h, std::span<const std::size_t> sizes,
                                          std::size_t trials, std::uint64_t seed) {
  if (!(p_h >= 0.0 && p_h <= 1.0)) throw Error("monte carlo: p_h outside [0, 1]");
  if (trials == 0) throw Error("monte carlo: trials must be positive");
  std::vector<std::size_t> cumulative;
  std::size_t total = 0;
  for (auto n : sizes) cumulative.push_back(total += n);
  if (total == 0) throw Error("monte carlo: superclass sizes sum to zero");
  CounterRng rng(seed);
  auto draw = [&] {
    const auto u = rng.below(total);
    return std::upper_bound(cumulative.begin(), cumulative.end(), u) - cumulative.begin();
  };
  std::size_t hits = 0;
  for (std::size_t t = 0; t < trials; ++t) {
    const auto truth = draw();
    if (rng.bernoulli(p_h)) {
      ++hits;
    } else {
      hits += draw() == truth;
    }
  }
  const double est = static_cast<double>(hits) / static_cast<double>(trials);
  return {est, std::sqrt(est * (1.0 - est) / static_cast<double>(trials))};
}

}  // namespace hbias::synth
