#pragma once

// Independent oracles shared by the unit and acceptance tests.

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "rdo/graph.hpp"

namespace oracle {

// Definition-level robustness: walk all 3^N assignments of nodes to (S1, S2, neither).
inline bool robust_by_enumeration(const rdo::DirectedGraph& g, std::size_t r) {
  const std::size_t n = g.node_count();
  if (r == 0 || n < 2) return true;
  std::vector<int> side(n, 0);
  auto reachable = [&](int which) {
    for (std::size_t i = 0; i < n; ++i) {
      if (side[i] != which) continue;
      std::size_t outside = 0;
      for (auto j : g.in_neighbors(i))
        if (side[j] != which) ++outside;
      if (outside >= r) return true;
    }
    return false;
  };
  std::uint64_t total = 1;
  for (std::size_t i = 0; i < n; ++i) total *= 3;
  for (std::uint64_t code = 0; code < total; ++code) {
    std::uint64_t c = code;
    bool has1 = false, has2 = false;
    for (std::size_t i = 0; i < n; ++i) {
      side[i] = static_cast<int>(c % 3);
      c /= 3;
      has1 = has1 || side[i] == 1;
      has2 = has2 || side[i] == 2;
    }
    if (!has1 || !has2) continue;
    if (!reachable(1) && !reachable(2)) return false;
  }
  return true;
}

inline rdo::DirectedGraph random_digraph(std::size_t n, double p, std::uint64_t seed) {
  std::mt19937_64 eng(seed);
  std::bernoulli_distribution coin(p);
  rdo::DirectedGraph g(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j && coin(eng)) g.add_edge(j, i);
  return g;
}

}  // namespace oracle
