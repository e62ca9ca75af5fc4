#include <cmath>
#include <numeric>

#include "doctest.h"
#include "helpers.hpp"
#include "hbias/error.hpp"
#include "hbias/manifold.hpp"
#include "hbias/random.hpp"
#include "hbias/synth.hpp"

using namespace hbias;

namespace {

FeatureSet points_1d(const std::vector<std::pair<double, Label>>& pts, std::size_t classes) {
  FeatureSet f;
  f.vectors.resize(static_cast<Eigen::Index>(pts.size()), 1);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    f.vectors(static_cast<Eigen::Index>(i), 0) = pts[i].first;
    f.labels.push_back(pts[i].second);
  }
  f.class_count = classes;
  return f;
}

// Class 0 queries at {0, 1}; class 1 support at {0, 2}. The other side is a
// far-away filler so both sets cover both classes.
std::pair<FeatureSet, FeatureSet> hand_example() {
  return {points_1d({{0.0, 0}, {1.0, 0}, {50.0, 1}}, 2), points_1d({{100.0, 0}, {0.0, 1}, {2.0, 1}}, 2)};
}

DistanceMatrix dm(Matrix values) {
  DistanceMatrix d;
  d.labels.resize(static_cast<std::size_t>(values.rows()));
  std::iota(d.labels.begin(), d.labels.end(), Label{0});
  d.values = std::move(values);
  return d;
}

DistanceMatrix from_pairs(double d01, double d02, double d12) {
  Matrix m(3, 3);
  m << 0, d01, d02, d01, 0, d12, d02, d12, 0;
  return dm(m);
}

SimilarityMatrix sim(Matrix values) {
  SimilarityMatrix a;
  a.labels.resize(static_cast<std::size_t>(values.rows()));
  std::iota(a.labels.begin(), a.labels.end(), Label{0});
  a.values = std::move(values);
  a.r_max = 1.0;
  return a;
}

}  // namespace

TEST_SUITE_BEGIN("manifold");

TEST_CASE("split is disjoint, class ordered and deterministic") {
  const auto means = synth::gen_etf(5, 6, 3.0);
  const auto f = synth::sample_features(means, 30, 0.5, 2);
  CoverConfig cfg;
  cfg.k = 10;
  cfg.seed = 9;
  const auto [q, s] = split_query_support(f, cfg);
  CHECK(q.size() == 50);
  CHECK(s.size() == 50);
  for (std::size_t i = 0; i < q.size(); ++i) CHECK(q.labels[i] == i / 10);
  for (std::size_t i = 0; i < q.size(); ++i) {
    for (std::size_t j = 0; j < s.size(); ++j) CHECK(q.vectors.row(static_cast<Eigen::Index>(i)) != s.vectors.row(static_cast<Eigen::Index>(j)));
  }
  const auto [q2, s2] = split_query_support(f, cfg);
  CHECK(q2.vectors == q.vectors);
  CHECK(s2.vectors == s.vectors);
  cfg.seed = 10;
  CHECK(split_query_support(f, cfg).first.vectors != q.vectors);
}

TEST_CASE("split with exactly 2k examples uses all of them") {
  const auto f = synth::sample_features(synth::gen_etf(3, 2, 1.0), 4, 0.1, 5);
  CoverConfig cfg;
  cfg.k = 2;
  const auto [q, s] = split_query_support(f, cfg);
  std::vector<double> seen, all;
  for (Eigen::Index i = 0; i < 6; ++i) {
    seen.push_back(q.vectors(i, 0));
    seen.push_back(s.vectors(i, 0));
  }
  for (Eigen::Index i = 0; i < 12; ++i) all.push_back(f.vectors(i, 0));
  std::sort(seen.begin(), seen.end());
  std::sort(all.begin(), all.end());
  CHECK(seen == all);
  cfg.k = 3;
  CHECK_THROWS_WITH_AS(split_query_support(f, cfg), doctest::Contains("class 0"), Error);
}

TEST_CASE("mutual cover of the 1-D hand example") {
  const auto [q, s] = hand_example();
  CoverConfig cfg;
  cfg.r_max = 2.0;
  const auto a = cover_similarity(q, s, cfg);
  CHECK(std::abs(a.values(0, 1) - 0.75) <= 0.01);
  CHECK(a.r_max == 2.0);
  cfg.integration = Integration::exact;
  CHECK(cover_similarity(q, s, cfg).values(0, 1) == doctest::Approx(0.75).epsilon(1e-15));
}

TEST_CASE("trapezoid error shrinks like 1/grid_points") {
  const auto [q, s] = hand_example();
  CoverConfig cfg;
  cfg.r_max = 2.0;
  for (std::size_t g : {3u, 11u, 51u, 200u, 1001u, 5000u}) {
    cfg.grid_points = g;
    const double err = std::abs(cover_similarity(q, s, cfg).values(0, 1) - 0.75);
    CHECK(err <= 1.0 / static_cast<double>(g - 1) + 1e-12);
  }
}

TEST_CASE("trapezoid agrees with the exact integral on random data") {
  const auto f = synth::sample_features(synth::gen_etf(6, 8, 2.0), 20, 1.0, 77);
  CoverConfig cfg;
  const auto [q, s] = split_query_support(f, cfg);
  cfg.grid_points = 200;
  const auto trap = cover_similarity(q, s, cfg);
  cfg.integration = Integration::exact;
  const auto exact = cover_similarity(q, s, cfg);
  CHECK(trap.r_max == exact.r_max);
  CHECK((trap.values - exact.values).cwiseAbs().maxCoeff() <= 1.0 / 199.0 + 1e-12);
  CHECK(exact.values.minCoeff() >= 0.0);
  CHECK(exact.values.maxCoeff() <= 1.0);
}

TEST_CASE("identical and distant sets") {
  const auto pts = points_1d({{0.0, 0}, {1.0, 0}, {5.0, 1}, {6.0, 1}}, 2);
  CoverConfig cfg;
  cfg.r_max = 2.0;
  const auto a = cover_similarity(pts, pts, cfg);
  CHECK(a.values(0, 0) >= 1.0 - 1.0 / 199.0);
  CHECK(a.values(1, 1) >= 1.0 - 1.0 / 199.0);
  CHECK(a.values(0, 1) == 0.0);
  CHECK(a.values(1, 0) == 0.0);
}

TEST_CASE("default r_max is the largest nearest distance") {
  const auto [q, s] = hand_example();
  const auto a = cover_similarity(q, s, {});
  CHECK(a.r_max == doctest::Approx(100.0));
}

TEST_CASE("cover errors") {
  const auto [q, s] = hand_example();
  CoverConfig cfg;
  cfg.grid_points = 1;
  CHECK_THROWS_AS(cover_similarity(q, s, cfg), Error);
  cfg = {};
  cfg.r_max = 0.0;
  CHECK_THROWS_AS(cover_similarity(q, s, cfg), Error);
  auto missing = points_1d({{0.0, 0}}, 2);
  CHECK_THROWS_AS(cover_similarity(q, missing, {}), Error);
}

TEST_CASE("distance from similarity") {
  Matrix m(2, 2);
  m << 1, 0.25, 0.25, 1;
  CHECK(to_distance_matrix(sim(m)).values(0, 1) == doctest::Approx(0.75));
  m << 1, 0.2, 0.4, 1;
  const auto d = to_distance_matrix(sim(m));
  CHECK(d.values(0, 1) == doctest::Approx(0.7));
  CHECK(d.values(1, 0) == doctest::Approx(0.7));
  CHECK(d.values(0, 0) == 0.0);
  const auto id = to_distance_matrix(sim(Matrix::Identity(4, 4)));
  CHECK(id.values == Matrix::Ones(4, 4) - Matrix::Identity(4, 4));
}

TEST_CASE("class mean distances") {
  SUBCASE("1-D means 0, 1, 2") {
    const auto f = points_1d({{-1, 0}, {1, 0}, {1, 1}, {0.5, 2}, {3.5, 2}}, 3);
    Matrix expect(3, 3);
    expect << 0, 1, 2, 1, 0, 1, 2, 1, 0;
    CHECK((class_mean_distances(f).values - expect).cwiseAbs().maxCoeff() < 1e-15);
  }
  SUBCASE("point masses 3 apart") {
    const auto f = points_1d({{2, 0}, {2, 0}, {5, 1}}, 2);
    CHECK(class_mean_distances(f).values(0, 1) == 3.0);
  }
  SUBCASE("coinciding classes") {
    const auto f = points_1d({{1, 0}, {1, 1}}, 2);
    CHECK(class_mean_distances(f).values(0, 1) == 0.0);
  }
}

TEST_CASE("cophenetic correlation") {
  const auto d = from_pairs(1, 2, 1);
  CHECK(ccc(d, d) == 1.0);
  CHECK(ccc(d, from_pairs(7, 9, 7)) == 1.0);
  CHECK(ccc(d, from_pairs(-1, -3, -1)) == -1.0);
  CHECK(ccc(d, from_pairs(0.2, 0.9, 0.3)) == doctest::Approx(0.9912).epsilon(0.001 / 0.9912));
  CHECK_THROWS_AS(ccc(d, from_pairs(1, 1, 1)), Error);
  CHECK_THROWS_AS(ccc(dm(Matrix::Zero(2, 2)), dm(Matrix::Zero(2, 2))), Error);
  auto relabeled = d;
  relabeled.labels = {2, 1, 0};
  CHECK_THROWS_AS(ccc(d, relabeled), Error);
}

TEST_CASE("ccc is symmetric and bounded on random matrices") {
  CounterRng rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const auto n = static_cast<Eigen::Index>(3 + rng.below(10));
    Matrix a = Matrix::Zero(n, n), b = Matrix::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = i + 1; j < n; ++j) {
        a(i, j) = a(j, i) = rng.uniform();
        b(i, j) = b(j, i) = rng.uniform();
      }
    }
    const double ab = ccc(dm(a), dm(b));
    CHECK(ab == doctest::Approx(ccc(dm(b), dm(a))).epsilon(1e-14));
    CHECK(std::abs(ab) <= 1.0);
    Matrix affine = 3.0 * a;
    affine.array() += 2.0;
    affine.diagonal().setZero();
    CHECK(ccc(dm(a), dm(affine)) == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("direct correlation") {
  SUBCASE("single-point classes on a line") {
    const auto pts = points_1d({{0, 0}, {1, 1}, {2, 2}}, 3);
    CHECK(direct_correlation(pts, pts, from_pairs(1, 2, 1), 0, 0) == doctest::Approx(1.0));
  }
  SUBCASE("constant reference") {
    const auto pts = points_1d({{0, 0}, {1, 1}, {2, 2}}, 3);
    CHECK_THROWS_AS(direct_correlation(pts, pts, from_pairs(1, 1, 1), 0, 0), Error);
  }
  SUBCASE("shuffled reference on well separated clusters") {
    // Class c sits at c * 10 on a line; the reference distances are randomized.
    FeatureSet f;
    f.class_count = 8;
    f.vectors.resize(8 * 20, 1);
    CounterRng rng(4);
    for (Eigen::Index i = 0; i < 160; ++i) {
      f.labels.push_back(static_cast<Label>(i / 20));
      f.vectors(i, 0) = 10.0 * static_cast<double>(i / 20) + 0.1 * rng.normal();
    }
    Matrix ref = Matrix::Zero(8, 8);
    for (Eigen::Index i = 0; i < 8; ++i) {
      for (Eigen::Index j = i + 1; j < 8; ++j) ref(i, j) = ref(j, i) = rng.uniform();
    }
    CHECK(std::abs(direct_correlation(f, f, dm(ref), 10'000, 1)) < 0.3);
    Matrix truth = Matrix::Zero(8, 8);
    for (Eigen::Index i = 0; i < 8; ++i) {
      for (Eigen::Index j = 0; j < 8; ++j) truth(i, j) = 10.0 * std::abs(static_cast<double>(i - j));
    }
    CHECK(direct_correlation(f, f, dm(truth), 10'000, 1) > 0.99);
  }
}

TEST_CASE("cover statistics") {
  auto stats = cover_stats(sim(Matrix::Identity(3, 3)));
  CHECK(stats.self_cover == 1.0);
  CHECK(stats.mutual_cover == 0.0);
  stats = cover_stats(sim(Matrix::Constant(3, 3, 0.5)));
  CHECK(stats.self_cover == 0.5);
  CHECK(stats.mutual_cover == 0.5);
  Matrix m(2, 2);
  m << 1, 0.2, 0.4, 0.9;
  stats = cover_stats(sim(m));
  CHECK(stats.self_cover == doctest::Approx(0.95));
  CHECK(stats.mutual_cover == doctest::Approx(0.3));
}

TEST_CASE("cover pipeline recovers the hierarchy of embedded means") {
  const auto tree = synth::gen_tree(3, 2, 4);
  const auto means = synth::gen_hierarchy_embedded_means(tree, tree.node_count(), 1.0, 5);
  const auto f = synth::sample_features(means, 20, 0.0, 6);
  CoverConfig cfg;
  const auto [q, s] = split_query_support(f, cfg);
  const auto d_f = to_distance_matrix(cover_similarity(q, s, cfg));
  const auto d_w = graph_distance_matrix(tree);
  CHECK(ccc(d_w, d_f) >= 0.9);
  CHECK(ccc(d_w, class_mean_distances(f)) >= 0.9);
}

TEST_SUITE_END();
