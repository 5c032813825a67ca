#pragma once

// Directed communication graphs and exact r-robustness certification.

#include <algorithm>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <ostream>
#include <random>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "rdo/errors.hpp"
#include "rdo/rng.hpp"

namespace rdo {

using NodeId = std::size_t;

/// Directed graph on dense node ids [0, N), stored as sorted in-neighbor lists.
/// Self-loops are rejected; a node's own value is handled explicitly by the algorithms.
class DirectedGraph {
 public:
  DirectedGraph() = default;
  explicit DirectedGraph(std::size_t node_count) : in_(node_count) {}

  static DirectedGraph from_in_neighbors(std::vector<std::vector<NodeId>> in) {
    DirectedGraph g(in.size());
    for (NodeId i = 0; i < in.size(); ++i)
      for (NodeId j : in[i]) g.add_edge(j, i);
    return g;
  }

  static DirectedGraph complete(std::size_t n) {
    DirectedGraph g(n);
    for (NodeId i = 0; i < n; ++i) {
      g.in_[i].reserve(n - 1);
      for (NodeId j = 0; j < n; ++j)
        if (j != i) g.in_[i].push_back(j);
    }
    return g;
  }

  // Directed cycle 0 -> 1 -> ... -> n-1 -> 0.
  static DirectedGraph cycle(std::size_t n) {
    DirectedGraph g(n);
    for (NodeId i = 0; i < n; ++i) g.add_edge(i, (i + 1) % n);
    return g;
  }

  std::size_t node_count() const noexcept { return in_.size(); }

  std::size_t edge_count() const noexcept {
    std::size_t m = 0;
    for (const auto& v : in_) m += v.size();
    return m;
  }

  std::span<const NodeId> in_neighbors(NodeId i) const {
    check_node(i);
    return in_[i];
  }

  std::size_t in_degree(NodeId i) const { return in_neighbors(i).size(); }

  /// Exact transpose of the in-neighbor lists, each list sorted ascending.
  std::vector<std::vector<NodeId>> out_neighbors() const {
    std::vector<std::vector<NodeId>> out(in_.size());
    for (NodeId i = 0; i < in_.size(); ++i)
      for (NodeId j : in_[i]) out[j].push_back(i);
    return out;
  }

  bool has_edge(NodeId from, NodeId to) const {
    check_node(from);
    const auto& v = in_neighbors(to);
    return std::binary_search(v.begin(), v.end(), from);
  }

  /// Adds from -> to. Duplicate edges are ignored.
  void add_edge(NodeId from, NodeId to) {
    check_node(from);
    check_node(to);
    if (from == to) throw InvalidArgument("self-loop on node " + std::to_string(from));
    auto& v = in_[to];
    auto it = std::lower_bound(v.begin(), v.end(), from);
    if (it == v.end() || *it != from) v.insert(it, from);
  }

  void remove_edge(NodeId from, NodeId to) {
    check_node(from);
    check_node(to);
    auto& v = in_[to];
    auto it = std::lower_bound(v.begin(), v.end(), from);
    if (it != v.end() && *it == from) v.erase(it);
  }

  friend bool operator==(const DirectedGraph&, const DirectedGraph&) = default;

 private:
  void check_node(NodeId i) const {
    if (i >= in_.size())
      throw InvalidArgument("node index " + std::to_string(i) + " out of range [0, " +
                            std::to_string(in_.size()) + ")");
  }

  std::vector<std::vector<NodeId>> in_;
};

/// True iff some node of `s` has at least `r` in-neighbors outside `s`.
inline bool is_r_reachable(const DirectedGraph& g, std::span<const NodeId> s, std::size_t r) {
  if (s.empty()) throw InvalidArgument("is_r_reachable: empty node set");
  std::vector<bool> member(g.node_count(), false);
  for (NodeId i : s) {
    if (i >= g.node_count()) throw InvalidArgument("is_r_reachable: node index out of range");
    member[i] = true;
  }
  if (r == 0) return true;
  for (NodeId i : s) {
    std::size_t outside = 0;
    for (NodeId j : g.in_neighbors(i))
      if (!member[j]) ++outside;
    if (outside >= r) return true;
  }
  return false;
}

inline bool is_r_reachable(const DirectedGraph& g, std::initializer_list<NodeId> s, std::size_t r) {
  return is_r_reachable(g, std::span<const NodeId>(s.begin(), s.size()), r);
}

struct RobustnessOptions {
  // Exhaustive checks above this many nodes throw SizeLimitError.
  std::size_t max_nodes = 16;
};

namespace detail {

// Largest node count the bitmask tables can address.
inline constexpr std::size_t kBitmaskLimit = 26;

inline std::vector<std::uint32_t> in_masks(const DirectedGraph& g) {
  std::vector<std::uint32_t> mask(g.node_count(), 0);
  for (NodeId i = 0; i < g.node_count(); ++i)
    for (NodeId j : g.in_neighbors(i)) mask[i] |= std::uint32_t{1} << j;
  return mask;
}

}  // namespace detail

/// Exact r-robustness: every pair of disjoint nonempty node sets has an r-reachable member.
///
/// Rather than walking all 3^N (S1, S2, neither) assignments, this marks every subset that
/// is *not* r-reachable, then takes a subset-OR closure so that "does T contain a
/// non-reachable nonempty subset" is a table lookup. The graph fails iff some
/// non-reachable S1 has a non-reachable subset inside its complement. O(N 2^N).
inline bool is_r_robust(const DirectedGraph& g, std::size_t r, const RobustnessOptions& opts = {}) {
  const std::size_t n = g.node_count();
  if (n > opts.max_nodes || n > detail::kBitmaskLimit)
    throw SizeLimitError("is_r_robust: " + std::to_string(n) + " nodes exceeds exhaustive ceiling of " +
                         std::to_string(std::min(opts.max_nodes, detail::kBitmaskLimit)));
  if (r == 0 || n < 2) return true;

  const auto mask = detail::in_masks(g);
  const std::uint32_t full = (std::uint32_t{1} << n) - 1;
  const std::size_t subsets = std::size_t{1} << n;

  // bad[S] = 1 iff S is nonempty and not r-reachable.
  std::vector<std::uint8_t> bad(subsets, 0);
  for (std::uint32_t s = 1; s <= full; ++s) {
    bool reachable = false;
    for (std::uint32_t rest = s; rest != 0 && !reachable; rest &= rest - 1) {
      const int i = std::countr_zero(rest);
      if (static_cast<std::size_t>(std::popcount(mask[i] & ~s)) >= r) reachable = true;
    }
    bad[s] = reachable ? 0 : 1;
  }

  std::vector<std::uint8_t> bad_below(bad);
  for (std::size_t b = 0; b < n; ++b) {
    const std::uint32_t bit = std::uint32_t{1} << b;
    for (std::uint32_t s = 1; s <= full; ++s)
      if ((s & bit) && bad_below[s ^ bit]) bad_below[s] = 1;
  }

  for (std::uint32_t s1 = 1; s1 < full; ++s1)
    if (bad[s1] && bad_below[full & ~s1]) return false;
  return true;
}

/// Largest r for which `g` is r-robust. Capped at ceil(N/2), which no N-node graph exceeds.
inline std::size_t max_robustness(const DirectedGraph& g, const RobustnessOptions& opts = {}) {
  const std::size_t cap = (g.node_count() + 1) / 2;
  std::size_t best = 0;
  for (std::size_t r = 1; r <= cap; ++r) {
    if (!is_r_robust(g, r, opts)) break;
    best = r;
  }
  return best;
}

/// Complete core on 2r-1 nodes, then every further node is attached with bidirectional
/// edges to r distinct, uniformly chosen earlier nodes. Each attachment gives the new
/// node r in-neighbors in an r-robust graph, which keeps the graph r-robust.
inline DirectedGraph grow_robust_graph(std::size_t n, std::size_t r, Seed seed) {
  if (r < 1) throw InvalidArgument("grow_robust_graph: r must be >= 1");
  const std::size_t core = 2 * r - 1;
  if (n < core)
    throw InvalidArgument("grow_robust_graph: n=" + std::to_string(n) + " < 2r-1=" + std::to_string(core));

  DirectedGraph g(n);
  for (NodeId i = 0; i < core; ++i)
    for (NodeId j = 0; j < core; ++j)
      if (i != j) g.add_edge(j, i);

  Engine eng = make_engine(seed);
  std::vector<NodeId> pool;
  for (NodeId v = core; v < n; ++v) {
    pool.resize(v);
    for (NodeId j = 0; j < v; ++j) pool[j] = j;
    // partial Fisher-Yates: first r entries become the sample
    for (std::size_t t = 0; t < r; ++t) {
      std::uniform_int_distribution<std::size_t> pick(t, v - 1);
      std::swap(pool[t], pool[pick(eng)]);
      g.add_edge(pool[t], v);
      g.add_edge(v, pool[t]);
    }
  }
  return g;
}

/// True iff some node reaches every other node along directed paths.
inline bool is_rooted(const DirectedGraph& g) {
  const std::size_t n = g.node_count();
  if (n <= 1) return true;
  const auto out = g.out_neighbors();
  std::vector<NodeId> stack;
  std::vector<bool> seen(n);
  for (NodeId root = 0; root < n; ++root) {
    std::fill(seen.begin(), seen.end(), false);
    seen[root] = true;
    std::size_t count = 1;
    stack.assign(1, root);
    while (!stack.empty()) {
      const NodeId u = stack.back();
      stack.pop_back();
      for (NodeId v : out[u])
        if (!seen[v]) {
          seen[v] = true;
          ++count;
          stack.push_back(v);
        }
    }
    if (count == n) return true;
  }
  return false;
}

/// Each node independently drops a uniformly chosen set of min(budget, in-degree) in-edges.
inline DirectedGraph remove_random_in_edges(const DirectedGraph& g, std::size_t budget_per_node, Seed seed) {
  DirectedGraph out = g;
  if (budget_per_node == 0) return out;
  Engine eng = make_engine(seed);
  for (NodeId i = 0; i < g.node_count(); ++i) {
    std::vector<NodeId> nbrs(g.in_neighbors(i).begin(), g.in_neighbors(i).end());
    const std::size_t drop = std::min(budget_per_node, nbrs.size());
    for (std::size_t t = 0; t < drop; ++t) {
      std::uniform_int_distribution<std::size_t> pick(t, nbrs.size() - 1);
      std::swap(nbrs[t], nbrs[pick(eng)]);
      out.remove_edge(nbrs[t], i);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Adjacency-list text format:
//   nodes=N
//   i: j,k,l        (in-neighbors of i)

inline void write_graph(std::ostream& os, const DirectedGraph& g) {
  os << "nodes=" << g.node_count() << '\n';
  for (NodeId i = 0; i < g.node_count(); ++i) {
    os << i << ':';
    const auto nb = g.in_neighbors(i);
    for (std::size_t t = 0; t < nb.size(); ++t) os << (t == 0 ? " " : ",") << nb[t];
    os << '\n';
  }
}

inline DirectedGraph read_graph(std::istream& is) {
  std::string line;
  std::size_t line_no = 0;
  auto fail = [&](const std::string& what) {
    throw InvalidArgument("graph file line " + std::to_string(line_no) + ": " + what);
  };
  auto next_line = [&]() -> bool {
    while (std::getline(is, line)) {
      ++line_no;
      const auto first = line.find_first_not_of(" \t\r");
      if (first == std::string::npos || line[first] == '#') continue;
      return true;
    }
    return false;
  };
  if (!next_line()) fail("missing header");
  std::size_t n = 0;
  {
    const auto eq = line.find('=');
    if (eq == std::string::npos || line.substr(0, eq).find("nodes") == std::string::npos)
      fail("expected header 'nodes=N'");
    try {
      n = std::stoul(line.substr(eq + 1));
    } catch (const std::exception&) {
      fail("bad node count");
    }
  }
  DirectedGraph g(n);
  while (next_line()) {
    const auto colon = line.find(':');
    if (colon == std::string::npos) fail("expected 'i: j,k,l'");
    std::size_t target = 0;
    try {
      target = std::stoul(line.substr(0, colon));
    } catch (const std::exception&) {
      fail("bad node index");
    }
    if (target >= n) fail("node index out of range");
    std::stringstream rest(line.substr(colon + 1));
    std::string tok;
    while (std::getline(rest, tok, ',')) {
      const auto a = tok.find_first_not_of(" \t\r");
      if (a == std::string::npos) continue;
      std::size_t src = 0;
      try {
        src = std::stoul(tok.substr(a));
      } catch (const std::exception&) {
        fail("bad neighbor '" + tok + "'");
      }
      if (src >= n) fail("neighbor index out of range");
      if (src == target) fail("self-loop");
      g.add_edge(src, target);
    }
  }
  return g;
}

}  // namespace rdo
