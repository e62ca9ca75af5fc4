#include <benchmark/benchmark.h>

#include "hbias/collapse.hpp"
#include "hbias/hierarchy.hpp"
#include "hbias/manifold.hpp"
#include "hbias/synth.hpp"

using namespace hbias;

namespace {

void bm_cover_similarity(benchmark::State& state) {
  const auto c = static_cast<std::size_t>(state.range(0));
  const auto f = synth::sample_features(synth::gen_etf(c, 128, 4.0), 20, 1.0, 1);
  CoverConfig cfg;
  const auto [q, s] = split_query_support(f, cfg);
  for (auto _ : state) benchmark::DoNotOptimize(cover_similarity(q, s, cfg));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(bm_cover_similarity)->Arg(10)->Arg(50)->Arg(100)->Unit(benchmark::kMillisecond)->Complexity();

void bm_graph_distances(benchmark::State& state) {
  const auto g = static_cast<std::size_t>(state.range(0));
  const auto tree = synth::gen_tree(4, g, 10);
  for (auto _ : state) benchmark::DoNotOptimize(graph_distance_matrix(tree));
  state.counters["classes"] = static_cast<double>(tree.class_count());
}
BENCHMARK(bm_graph_distances)->Arg(2)->Arg(10)->Arg(25)->Unit(benchmark::kMillisecond);

void bm_nc1(benchmark::State& state) {
  const auto c = static_cast<std::size_t>(state.range(0));
  const auto f = synth::sample_features(synth::gen_etf(c, 128, 4.0), 10, 1.0, 2);
  const auto stats = class_statistics(f);
  for (auto _ : state) benchmark::DoNotOptimize(nc1(stats));
}
BENCHMARK(bm_nc1)->Arg(10)->Arg(60)->Arg(120)->Unit(benchmark::kMillisecond);

void bm_trajectory(benchmark::State& state) {
  const auto s = synth::top_level_labelspace(synth::gen_tree(3, 4, 5));
  const auto params = synth::TrajectoryParams::standard(static_cast<std::size_t>(state.range(0)), 3);
  for (auto _ : state) {
    const auto traj = synth::gen_hierarchical_trajectory(s, params);
    benchmark::DoNotOptimize(synth::nearest_centroid_log(traj));
  }
}
BENCHMARK(bm_trajectory)->Arg(40)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
