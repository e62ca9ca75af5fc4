#pragma once

#include <unistd.h>

#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "hbias/hierarchy.hpp"
#include "hbias/random.hpp"

namespace hbias::test {

inline Hierarchy parse(const std::string& edges, const std::string& classes) {
  std::istringstream e(edges), c(classes);
  return parse_hierarchy(e, c);
}

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("hbias_test_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

// Random rooted tree on `nodes` nodes (node i hangs under a uniformly chosen
// earlier node); leaves receive class indices in a shuffled order. With
// `extra_parents` > 0, that many additional parent links are added pointing
// to strictly earlier nodes, which keeps the graph acyclic.
inline Hierarchy random_hierarchy(CounterRng& rng, std::size_t nodes, std::size_t extra_parents = 0) {
  std::vector<Hierarchy::Edge> edges;
  std::vector<bool> has_child(nodes, false);
  auto name = [](std::size_t i) { return "n" + std::to_string(i); };
  for (std::size_t i = 1; i < nodes; ++i) {
    const std::size_t p = rng.below(i);
    edges.emplace_back(name(p), name(i));
    has_child[p] = true;
  }
  std::vector<std::string> leaves;
  for (std::size_t i = 0; i < nodes; ++i) {
    if (!has_child[i]) leaves.push_back(name(i));
  }
  for (std::size_t k = 0; k < extra_parents; ++k) {
    // only internal nodes may gain parents; leaves must stay leaves
    const std::size_t child = 1 + rng.below(nodes - 1);
    const std::size_t parent = rng.below(child);
    if (!has_child[parent]) continue;
    edges.emplace_back(name(parent), name(child));
  }
  rng.shuffle(std::span<std::string>(leaves));
  return Hierarchy::from_edges(edges, leaves);
}

}  // namespace hbias::test
