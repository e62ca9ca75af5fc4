#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "doctest.h"
#include "helpers.hpp"
#include "hbias/error.hpp"
#include "hbias/io.hpp"
#include "hbias/synth.hpp"

using namespace hbias;
using hbias::test::TempDir;

namespace {

// Float32 values survive a float32 round trip unchanged.
FeatureSet float_features(std::size_t classes, std::size_t per_class, std::size_t dim, std::uint64_t seed) {
  auto f = synth::sample_features(Matrix::Random(classes, dim), per_class, 0.5, seed);
  f.vectors = f.vectors.cast<float>().cast<double>();
  return f;
}

}  // namespace

TEST_SUITE_BEGIN("io");

TEST_CASE("binary features round-trip byte-exactly") {
  TempDir dir("feat");
  const auto f = float_features(4, 5, 3, 1);
  io::write_features(f, dir / "a.bin");
  const auto back = io::read_features(dir / "a.bin");
  CHECK(back.vectors == f.vectors);
  CHECK(back.labels == f.labels);
  CHECK(back.class_count == 4);
  io::write_features(back, dir / "b.bin");
  CHECK(io::read_file(dir / "a.bin") == io::read_file(dir / "b.bin"));
  const auto bytes = io::read_file(dir / "a.bin");
  CHECK(bytes.substr(0, 8) == "HBFEAT01");
  CHECK(bytes.size() == 8 + 24 + 20 * 4 + 20 * 3 * 4);
  CHECK(static_cast<unsigned char>(bytes[8]) == 20);  // little-endian N
}

TEST_CASE("csv features round-trip") {
  TempDir dir("featcsv");
  const auto f = float_features(3, 2, 2, 2);
  io::write_features(f, dir / "f.csv");
  const auto back = io::read_features(dir / "f.csv");
  CHECK(back.labels == f.labels);
  CHECK((back.vectors - f.vectors).cwiseAbs().maxCoeff() < 1e-6);
  CHECK(io::read_file(dir / "f.csv").rfind("label,f0,f1\n", 0) == 0);
}

TEST_CASE("corrupt binary files") {
  TempDir dir("corrupt");
  const auto f = float_features(2, 3, 2, 3);
  io::write_features(f, dir / "f.bin");
  auto bytes = io::read_file(dir / "f.bin");

  SUBCASE("bad magic") {
    auto bad = bytes;
    bad.replace(0, 8, "XXFEAT01");
    io::write_file(dir / "bad.bin", bad);
    CHECK_THROWS_WITH_AS(io::read_features(dir / "bad.bin"), doctest::Contains("unknown format 'XXFEAT01'"), Error);
  }
  SUBCASE("truncated payload") {
    io::write_file(dir / "short.bin", bytes.substr(0, bytes.size() - 5));
    CHECK_THROWS_WITH_AS(io::read_features(dir / "short.bin"), doctest::Contains("truncated payload"), Error);
  }
  SUBCASE("trailing bytes") {
    io::write_file(dir / "long.bin", bytes + "xx");
    CHECK_THROWS_WITH_AS(io::read_features(dir / "long.bin"), doctest::Contains("trailing"), Error);
  }
  SUBCASE("wrong kind of file") {
    CHECK_THROWS_WITH_AS(io::read_head(dir / "f.bin"), doctest::Contains("expected HBHEAD01 data but file is HBFEAT01"), Error);
    CHECK_THROWS_AS(io::read_distance_matrix(dir / "f.bin"), Error);
  }
  SUBCASE("label out of range") {
    auto bad = bytes;
    bad[8 + 24] = 7;
    io::write_file(dir / "label.bin", bad);
    CHECK_THROWS_AS(io::read_features(dir / "label.bin"), Error);
  }
  SUBCASE("missing file") {
    CHECK_THROWS_AS(io::read_features(dir / "nope.bin"), Error);
  }
}

TEST_CASE("classifier head round-trip") {
  TempDir dir("head");
  ClassifierHead head{Matrix::Random(3, 4).cast<float>().cast<double>(), Vector::Random(3).cast<float>().cast<double>()};
  io::write_head(head, dir / "h.bin");
  const auto back = io::read_head(dir / "h.bin");
  CHECK(back.weights == head.weights);
  CHECK(back.bias == head.bias);
  io::write_head(back, dir / "h2.bin");
  CHECK(io::read_file(dir / "h.bin") == io::read_file(dir / "h2.bin"));
}

TEST_CASE("distance matrix round-trips") {
  TempDir dir("dmat");
  DistanceMatrix d{{0, 1, 2}, Matrix::Zero(3, 3)};
  d.values << 0, 1.0 / 3.0, 2, 1.0 / 3.0, 0, 1e-20, 2, 1e-20, 0;
  io::write_distance_matrix(d, dir / "d.bin");
  const auto back = io::read_distance_matrix(dir / "d.bin");
  CHECK(back.values == d.values);
  CHECK(back.labels == d.labels);
  io::write_distance_matrix(back, dir / "d2.bin");
  CHECK(io::read_file(dir / "d.bin") == io::read_file(dir / "d2.bin"));

  d.labels = {4, 7, 9};
  io::write_distance_matrix(d, dir / "d.csv");
  const auto csv = io::read_distance_matrix(dir / "d.csv");
  CHECK(csv.labels == d.labels);
  CHECK((csv.values - d.values).cwiseAbs().maxCoeff() < 1e-9);
  CHECK(io::read_file(dir / "d.csv").rfind("class,4,7,9\n", 0) == 0);
}

TEST_CASE("prediction logs") {
  TempDir dir("pred");
  SUBCASE("round-trip") {
    const PredictionLog log({{1, "a", 0, 1}, {1, "b", 2, 2}, {3, "a", 1, 1}}, 3);
    io::write_predictions(log, dir / "p.csv");
    CHECK(io::read_file(dir / "p.csv").rfind("epoch,example_id,true_label,pred_label\n", 0) == 0);
    const auto back = io::read_predictions(dir / "p.csv", 3);
    CHECK(back.records() == log.records());
    io::write_predictions(back, dir / "q.csv");
    CHECK(io::read_file(dir / "p.csv") == io::read_file(dir / "q.csv"));
  }
  SUBCASE("columns in any order") {
    io::write_file(dir / "p.csv", "pred_label,epoch,true_label,example_id\n1,2,0,x\n");
    const auto log = io::read_predictions(dir / "p.csv");
    REQUIRE(log.size() == 1);
    CHECK(log.records()[0] == PredictionRecord{2, "x", 0, 1});
    CHECK(log.label_count() == 2);
  }
  SUBCASE("missing column") {
    io::write_file(dir / "p.csv", "epoch,example_id,true_label\n1,a,0\n");
    CHECK_THROWS_WITH_AS(io::read_predictions(dir / "p.csv"), doctest::Contains("pred_label"), ParseError);
  }
  SUBCASE("duplicate rows name both lines") {
    io::write_file(dir / "p.csv", "epoch,example_id,true_label,pred_label\n1,a,0,0\n1,b,0,0\n1,a,0,1\n");
    try {
      io::read_predictions(dir / "p.csv");
      FAIL("expected a duplicate error");
    } catch (const ParseError& e) {
      CHECK(e.line() == 4);
      CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }
  }
  SUBCASE("label beyond the label count") {
    io::write_file(dir / "p.csv", "epoch,example_id,true_label,pred_label\n1,a,0,5\n");
    CHECK_THROWS_AS(io::read_predictions(dir / "p.csv", 3), ParseError);
  }
  SUBCASE("bad epoch") {
    io::write_file(dir / "p.csv", "epoch,example_id,true_label,pred_label\n-1,a,0,0\n");
    CHECK_THROWS_AS(io::read_predictions(dir / "p.csv"), ParseError);
  }
}

TEST_CASE("hierarchy and label space files") {
  TempDir dir("hier");
  const auto tree = synth::gen_tree(2, 2, 2);
  io::write_hierarchy(tree, dir / "e.tsv", dir / "c.tsv");
  const auto back = io::read_hierarchy(dir / "e.tsv", dir / "c.tsv");
  CHECK(back.class_count() == tree.class_count());
  CHECK(back.node_count() == tree.node_count());
  for (Label c = 0; c < tree.class_count(); ++c) CHECK(back.name(back.class_node(c)) == tree.name(tree.class_node(c)));
  CHECK(graph_distance_matrix(back).values == graph_distance_matrix(tree).values);

  const auto s = synth::top_level_labelspace(tree);
  io::write_labelspace(s, dir / "s.tsv");
  const auto sb = io::read_labelspace(dir / "s.tsv");
  CHECK(sb.name() == s.name());
  CHECK(sb.mapping().table == s.mapping().table);
  CHECK(sb[1].name == s[1].name);

  std::istringstream bare("0\t1\n1\t0\n2\t1\n");
  const auto plain = io::read_labelspace(bare);
  CHECK(plain.sizes() == std::vector<std::size_t>{1, 2});
  std::istringstream dup("0\t0\n0\t1\n");
  CHECK_THROWS_AS(io::read_labelspace(dup), ParseError);

  std::istringstream groups("artifact\tartifact\n# comment\nliving\tanimal,plant\n");
  const auto g = io::read_groups(groups);
  REQUIRE(g.size() == 2);
  CHECK(g[1].name == "living");
  CHECK(g[1].nodes == std::vector<std::string>{"animal", "plant"});
}

TEST_CASE("tables are deterministic") {
  TempDir dir("tables");
  MetricSeries s{{{1, 50.0}, {2, 100.0 / 3.0}}, Scale::percent};
  io::write_table(s, dir / "a.csv");
  CHECK(io::read_file(dir / "a.csv") == "epoch,value\n1,50.000000\n2,33.333333\n");
  io::write_table(s, dir / "a.json", io::TableFormat::json);
  const auto j = nlohmann::json::parse(io::read_file(dir / "a.json"));
  CHECK(j["scale"] == "percent");
  CHECK(j["series"][1]["value"] == 33.333333);
  io::write_table(s, dir / "b.json", io::TableFormat::json);
  CHECK(io::read_file(dir / "a.json") == io::read_file(dir / "b.json"));
}

TEST_CASE("collapse report keys") {
  NCReport r;
  r.label_space = "hypernym";
  r.nc1 = 0.5;
  r.degenerate_flags = {"nc3"};
  const auto j = nlohmann::ordered_json::parse(io::to_json(r));
  std::vector<std::string> keys;
  for (const auto& [k, v] : j.items()) keys.push_back(k);
  CHECK(keys == std::vector<std::string>{"nc1", "beta_mu", "beta_w", "alpha_mu", "alpha_w", "nc3", "nc4",
                                         "label_space", "degenerate_flags"});
  CHECK(j["nc1"] == 0.5);
  CHECK(j["degenerate_flags"][0] == "nc3");
}

TEST_SUITE_END();
