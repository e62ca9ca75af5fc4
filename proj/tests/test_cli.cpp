#include <sstream>

#include <nlohmann/json.hpp>

#include "doctest.h"
#include "helpers.hpp"
#include "hbias/cli.hpp"
#include "hbias/io.hpp"
#include "hbias/synth.hpp"

using namespace hbias;
using hbias::test::TempDir;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result call(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string p(const std::filesystem::path& path) { return path.string(); }

}  // namespace

TEST_SUITE_BEGIN("cli");

TEST_CASE("usage errors exit 2") {
  CHECK(call({}).code == 2);
  CHECK(call({"frobnicate"}).code == 2);
  CHECK(call({"metrics"}).code == 2);
  TempDir dir("usage");
  const auto r = call({"labelspace", "random", "--labelspace", "nowhere.tsv", "--out", p(dir.path())});
  CHECK(r.code == 2);

  const auto s = synth::top_level_labelspace(synth::gen_tree(2, 1, 2));
  io::write_labelspace(s, dir / "s.tsv");
  const auto no_seed = call({"labelspace", "random", "--labelspace", p(dir / "s.tsv"), "--out", p(dir / "o")});
  CHECK(no_seed.code == 2);
  CHECK(no_seed.err.find("--seed") != std::string::npos);
  CHECK(no_seed.err.find("Usage") != std::string::npos);
  CHECK_FALSE(std::filesystem::exists(dir / "o"));
}

TEST_CASE("help and version exit 0") {
  const auto h = call({"metrics", "curves", "--help"});
  CHECK(h.code == 0);
  CHECK(h.out.find("--random-iso") != std::string::npos);
  CHECK(call({"--version"}).code == 0);
}

TEST_CASE("data errors exit 1 with context") {
  TempDir dir("data");
  io::write_file(dir / "bad.csv", "epoch,example_id,true_label\n1,a,0\n");
  io::write_file(dir / "s.tsv", "0\t0\n1\t0\n");
  const auto r = call({"metrics", "curves", "--log", p(dir / "bad.csv"), "--labelspace", p(dir / "s.tsv"), "--out", p(dir / "o")});
  CHECK(r.code == 1);
  CHECK(r.err.find("bad.csv") != std::string::npos);
  CHECK(r.err.find("pred_label") != std::string::npos);
}

TEST_CASE("oracle prints the analytic and simulated values") {
  const auto r = call({"oracle", "superclass-acc", "--p", "0.79", "--sizes", "522,398,80", "--trials", "200000"});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("analytic 0.881830") != std::string::npos);
  CHECK(r.out.find("monte_carlo 0.88") != std::string::npos);
}

TEST_CASE("curves match the library and reruns are byte-identical") {
  TempDir dir("curves");
  const auto s = synth::top_level_labelspace(synth::gen_tree(3, 2, 2));
  io::write_labelspace(s, dir / "s.tsv");
  REQUIRE(call({"synth", "predictions", "--labelspace", p(dir / "s.tsv"), "--accuracy", "0.2,0.5,0.7,0.8", "--within",
                "0.6", "--examples", "600", "--seed", "3", "--out", p(dir / "synth")})
              .code == 0);
  const std::vector<std::string> args{"metrics", "curves", "--log", p(dir / "synth/predictions.csv"), "--labelspace",
                                      p(dir / "s.tsv"), "--random-iso", "--seed", "7", "--out", p(dir / "out")};
  const auto r = call(args);
  REQUIRE(r.code == 0);
  for (const char* space : {"hyponym", "hypernym", "random"}) {
    for (const char* what : {"accuracy", "relative_accuracy", "relative_gain", "residual_error"}) {
      CHECK(std::filesystem::exists(dir / "out" / (std::string(space) + "_" + what + ".csv")));
    }
  }

  const auto log = io::read_predictions(dir / "synth/predictions.csv", s.class_count());
  const auto a = accuracy_series(project_log(log, s.mapping()));
  io::write_table(relative_gain(a, baseline(s, uniform_priors(s.class_count()))), dir / "direct.csv");
  CHECK(io::read_file(dir / "direct.csv") == io::read_file(dir / "out/hypernym_relative_gain.csv"));

  const auto manifest = nlohmann::json::parse(io::read_file(dir / "out/run.json"));
  CHECK(manifest["seed"] == 7);
  CHECK(manifest["command"] == "metrics curves");

  std::map<std::string, std::string> first;
  for (const auto& e : std::filesystem::directory_iterator(dir / "out")) first[e.path().filename().string()] = io::read_file(e.path());
  REQUIRE(call(args).code == 0);
  for (const auto& [name, bytes] : first) CHECK(io::read_file(dir / "out" / name) == bytes);
}

TEST_CASE("random iso needs a seed") {
  TempDir dir("iso");
  io::write_file(dir / "s.tsv", "0\t0\n1\t0\n");
  io::write_file(dir / "p.csv", "epoch,example_id,true_label,pred_label\n1,a,0,0\n");
  CHECK(call({"metrics", "curves", "--log", p(dir / "p.csv"), "--labelspace", p(dir / "s.tsv"), "--random-iso", "--out",
              p(dir / "o")})
            .code == 2);
}

TEST_CASE("collapse report on an exact ETF") {
  TempDir dir("nc");
  REQUIRE(call({"synth", "etf", "--classes", "6", "--per-class", "2", "--out", p(dir.path())}).code == 0);
  io::write_file(dir / "s.tsv", "0\t0\n1\t0\n2\t0\n3\t1\n4\t1\n5\t1\n");
  REQUIRE(call({"nc", "compute", "--features", p(dir / "features.bin"), "--head", p(dir / "head.bin"), "--labelspace",
                p(dir / "s.tsv"), "--out", p(dir / "nc")})
              .code == 0);
  const auto hypo = nlohmann::json::parse(io::read_file(dir / "nc/nc_hyponym.json"));
  CHECK(std::abs(hypo["nc1"].get<double>()) < 1e-9);
  CHECK(hypo["nc4"] == 0.0);
  const auto hyper = nlohmann::json::parse(io::read_file(dir / "nc/nc_hypernym.json"));
  CHECK(hyper["label_space"] == "labelspace");
}

TEST_CASE("hierarchy pipeline: build, cover, ccc, confusion") {
  TempDir dir("pipe");
  REQUIRE(call({"synth", "features", "--tree", "3,2,3", "--noise", "0.05", "--seed", "4", "--out", p(dir.path())}).code == 0);
  io::write_file(dir / "groups.tsv", "first\ts0\nsecond\ts1\nthird\ts2\n");
  const auto b = call({"labelspace", "build", "--edges", p(dir / "edges.tsv"), "--classes", p(dir / "classes.tsv"),
                       "--groups", p(dir / "groups.tsv"), "--out", p(dir / "ls")});
  REQUIRE(b.code == 0);
  CHECK(io::read_labelspace(dir / "ls/labelspace.tsv").sizes() == std::vector<std::size_t>{6, 6, 6});

  REQUIRE(call({"manifold", "cover", "--features", p(dir / "features.bin"), "--k", "5", "--seed", "1", "--out",
                p(dir / "cover")})
              .code == 0);
  CHECK(io::read_distance_matrix(dir / "cover/distance.csv").size() == 18);

  const auto c = call({"manifold", "ccc", "--features", p(dir / "features.bin"), "--edges", p(dir / "edges.tsv"),
                       "--classes", p(dir / "classes.tsv"), "--k", "5", "--seed", "1", "--out", p(dir / "ccc")});
  REQUIRE(c.code == 0);
  const auto manifest = nlohmann::json::parse(io::read_file(dir / "ccc/run.json"));
  CHECK(manifest["results"]["ccc_cover"].get<double>() > 0.9);

  REQUIRE(call({"synth", "features", "--tree", "3,2,3", "--trajectory", "--epochs", "6", "--seed", "4", "--out",
                p(dir / "traj")})
              .code == 0);
  CHECK(std::filesystem::exists(dir / "traj/features_e6.bin"));
  const auto f = call({"metrics", "confusion", "--log", p(dir / "traj/predictions.csv"), "--epoch", "6", "--edges",
                       p(dir / "edges.tsv"), "--classes", p(dir / "classes.tsv"), "--out", p(dir / "conf")});
  REQUIRE(f.code == 0);
  CHECK(f.out.find("360 of 360 correct") != std::string::npos);
  const auto v = call({"metrics", "converge", "--log", p(dir / "traj/predictions.csv"), "--labelspace",
                       p(dir / "ls/labelspace.tsv"), "--out", p(dir / "conv")});
  CHECK(v.code == 0);
  CHECK(io::read_file(dir / "conv/converge.csv").rfind("space,epoch\nhyponym,", 0) == 0);
}

TEST_SUITE_END();
