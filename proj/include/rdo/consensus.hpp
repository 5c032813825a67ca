#pragma once

// Coordinate-wise W-MSR consensus for the auxiliary point.

#include <algorithm>
#include <cstdio>
#include <map>
#include <ostream>
#include <span>
#include <utility>
#include <vector>

#include "rdo/adversary.hpp"
#include "rdo/convex.hpp"
#include "rdo/graph.hpp"

namespace rdo {

struct ScalarMessage {
  NodeId sender;
  double value;
};

/// Drops up to F received values strictly above `own` (largest first) and up to F strictly
/// below (smallest first), then averages the survivors together with `own`.
inline double wmsr_scalar_step(double own, std::span<const ScalarMessage> received, std::size_t f) {
  std::vector<ScalarMessage> above, below;
  double sum = own;
  std::size_t count = 1;
  for (const auto& m : received) {
    if (m.value > own)
      above.push_back(m);
    else if (m.value < own)
      below.push_back(m);
    else {
      sum += m.value;
      ++count;
    }
  }
  std::sort(above.begin(), above.end(), [](const ScalarMessage& a, const ScalarMessage& b) {
    return a.value != b.value ? a.value > b.value : a.sender < b.sender;
  });
  std::sort(below.begin(), below.end(), [](const ScalarMessage& a, const ScalarMessage& b) {
    return a.value != b.value ? a.value < b.value : a.sender < b.sender;
  });
  for (std::size_t t = std::min(f, above.size()); t < above.size(); ++t, ++count) sum += above[t].value;
  for (std::size_t t = std::min(f, below.size()); t < below.size(); ++t, ++count) sum += below[t].value;
  return sum / static_cast<double>(count);
}

struct ConsensusTraceRow {
  std::size_t iteration = 0;
  double diameter = 0.0;
  Vector lo;  // per-coordinate min over regular nodes
  Vector hi;  // per-coordinate max over regular nodes
};

struct AuxiliaryPointResult {
  std::map<NodeId, Vector> per_node_aux;  // regular nodes only
  double diameter = 0.0;
  std::size_t iterations_used = 0;
  bool converged = false;
  Vector hyperrect_lo;
  Vector hyperrect_hi;
  std::vector<ConsensusTraceRow> trace;

  /// Estimate of the lowest-indexed regular node; the shared point in `common` mode.
  const Vector& lead_estimate() const { return per_node_aux.begin()->second; }
};

struct ConsensusParams {
  std::size_t max_iters = 1000;
  double tol = 1e-8;

  friend bool operator==(const ConsensusParams&, const ConsensusParams&) = default;
};

/// Largest pairwise Euclidean distance among the listed states.
inline double diameter_of(std::span<const Vector> states, std::span<const NodeId> ids) {
  double best = 0.0;
  for (std::size_t a = 0; a < ids.size(); ++a)
    for (std::size_t b = a + 1; b < ids.size(); ++b)
      best = std::max(best, (states[ids[a]] - states[ids[b]]).norm());
  return best;
}

namespace detail {

inline ConsensusTraceRow consensus_row(std::size_t it, std::span<const Vector> states, std::span<const NodeId> regular) {
  ConsensusTraceRow row;
  row.iteration = it;
  row.diameter = diameter_of(states, regular);
  row.lo = states[regular.front()];
  row.hi = states[regular.front()];
  for (NodeId i : regular) {
    row.lo = row.lo.cwiseMin(states[i]);
    row.hi = row.hi.cwiseMax(states[i]);
  }
  return row;
}

}  // namespace detail

/// Runs d independent scalar W-MSR instances synchronously, starting each regular node
/// at `initial[i]`. Byzantine nodes send `adversary`-crafted per-edge vectors each round;
/// the adversary's randomness is drawn from `seed`. Stops once the regular diameter is
/// at most `tol` or after `max_iters` rounds.
inline AuxiliaryPointResult compute_auxiliary_point(const DirectedGraph& g, std::span<const Vector> initial,
                                                    const std::vector<bool>& byzantine,
                                                    const AdversaryStrategy& adversary, std::size_t f,
                                                    const ConsensusParams& params, Seed seed) {
  if (initial.size() != g.node_count()) throw InvalidArgument("initial states must cover every node");
  if (params.max_iters < 1) throw InvalidArgument("max_iters must be >= 1");
  if (auto v = f_local_violations(g, byzantine, f); !v.empty()) throw ConfigError(std::move(v));

  std::vector<NodeId> regular;
  for (NodeId i = 0; i < g.node_count(); ++i)
    if (!byzantine[i]) regular.push_back(i);
  if (regular.empty()) throw ConfigError({"no regular nodes"});

  AdversaryStrategy adv = adversary;
  adv.seed = seed;

  std::vector<Vector> cur(initial.begin(), initial.end());
  std::vector<Vector> next = cur;
  AuxiliaryPointResult res;
  {
    auto first = detail::consensus_row(0, cur, regular);
    res.hyperrect_lo = first.lo;
    res.hyperrect_hi = first.hi;
    res.trace.push_back(std::move(first));
  }

  std::vector<ScalarMessage> inbox;
  std::size_t it = 0;
  while (res.trace.back().diameter > params.tol && it < params.max_iters) {
    const MessageMap msgs = craft_messages(adv, it, NetworkView{g, cur, {}, byzantine, f});
    for (NodeId i : regular) {
      const auto nbrs = g.in_neighbors(i);
      for (Eigen::Index p = 0; p < cur[i].size(); ++p) {
        inbox.clear();
        for (NodeId j : nbrs) {
          const double v = byzantine[j] ? msgs.at({j, i})(p) : cur[j](p);
          inbox.push_back({j, v});
        }
        next[i](p) = wmsr_scalar_step(cur[i](p), inbox, f);
      }
    }
    for (NodeId i : regular) cur[i] = next[i];
    ++it;
    res.trace.push_back(detail::consensus_row(it, cur, regular));
  }

  res.iterations_used = it;
  res.diameter = res.trace.back().diameter;
  res.converged = res.diameter <= params.tol;
  for (NodeId i : regular) res.per_node_aux.emplace(i, cur[i]);
  return res;
}

/// CSV: iteration, diameter, then lo_p, hi_p for each coordinate p.
inline void write_consensus_trace(std::ostream& os, const std::vector<ConsensusTraceRow>& trace) {
  if (trace.empty()) return;
  const auto d = trace.front().lo.size();
  os << "iteration,diameter";
  for (Eigen::Index p = 0; p < d; ++p) os << ",lo_" << p << ",hi_" << p;
  os << '\n';
  char buf[64];
  for (const auto& row : trace) {
    os << row.iteration;
    std::snprintf(buf, sizeof buf, ",%.17g", row.diameter);
    os << buf;
    for (Eigen::Index p = 0; p < d; ++p) {
      std::snprintf(buf, sizeof buf, ",%.17g,%.17g", row.lo(p), row.hi(p));
      os << buf;
    }
    os << '\n';
  }
}

}  // namespace rdo
