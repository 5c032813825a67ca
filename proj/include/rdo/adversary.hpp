#pragma once

// Byzantine message strategies and F-local placement.

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "rdo/convex.hpp"
#include "rdo/graph.hpp"
#include "rdo/rng.hpp"

namespace rdo {

enum class AdversaryKind { evasive_uniform, constant_point, large_noise, coordinate_spike };

inline std::string to_string(AdversaryKind k) {
  switch (k) {
    case AdversaryKind::evasive_uniform: return "evasive_uniform";
    case AdversaryKind::constant_point: return "constant_point";
    case AdversaryKind::large_noise: return "large_noise";
    case AdversaryKind::coordinate_spike: return "coordinate_spike";
  }
  return "unknown";
}

inline AdversaryKind adversary_kind_from_string(const std::string& s) {
  if (s == "evasive_uniform") return AdversaryKind::evasive_uniform;
  if (s == "constant_point") return AdversaryKind::constant_point;
  if (s == "large_noise") return AdversaryKind::large_noise;
  if (s == "coordinate_spike") return AdversaryKind::coordinate_spike;
  throw InvalidArgument("unknown adversary kind '" + s + "'");
}

struct AdversaryStrategy {
  AdversaryKind kind = AdversaryKind::evasive_uniform;
  std::vector<double> target;     // constant_point
  double noise_scale = 10.0;      // large_noise
  double magnitude = 1000.0;      // coordinate_spike
  std::size_t coordinate = 0;     // coordinate_spike
  std::size_t max_resample = 100;  // evasive_uniform
  Seed seed = 0;

  friend bool operator==(const AdversaryStrategy&, const AdversaryStrategy&) = default;
};

/// What an omniscient adversary sees in one round. `aux` may be empty, in which case
/// strategies that reason about the auxiliary point fall back to coordinate-wise bounds.
struct NetworkView {
  const DirectedGraph& graph;
  std::span<const Vector> states;
  std::span<const Vector> aux;
  const std::vector<bool>& byzantine;
  std::size_t f;
};

using MessageKey = std::pair<NodeId, NodeId>;  // (sender, target)
using MessageMap = std::map<MessageKey, Vector>;

namespace detail {

inline Vector evasive_sample(const AdversaryStrategy& s, const NetworkView& view, NodeId target, Engine& eng) {
  const Vector& own = view.states[target];
  std::vector<NodeId> regular;
  for (NodeId j : view.graph.in_neighbors(target))
    if (!view.byzantine[j]) regular.push_back(j);
  const std::size_t f = view.f;
  if (regular.size() < f + 1) return own;

  const auto d = own.size();
  Vector lo(d), hi(d);
  std::vector<double> vals(regular.size());
  for (Eigen::Index p = 0; p < d; ++p) {
    for (std::size_t t = 0; t < regular.size(); ++t) vals[t] = view.states[regular[t]](p);
    std::sort(vals.begin(), vals.end());
    lo(p) = vals[f];
    hi(p) = vals[vals.size() - 1 - f];
    if (lo(p) > hi(p)) return own;
  }

  const bool use_aux = !view.aux.empty();
  double radius = 0.0;
  if (use_aux) {
    std::vector<double> dist(regular.size());
    for (std::size_t t = 0; t < regular.size(); ++t)
      dist[t] = (view.states[regular[t]] - view.aux[target]).norm();
    std::sort(dist.begin(), dist.end(), std::greater<>());
    radius = dist[f];
  }

  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Vector y(d);
  const std::size_t tries = use_aux ? s.max_resample : 1;
  for (std::size_t attempt = 0; attempt < tries; ++attempt) {
    for (Eigen::Index p = 0; p < d; ++p) y(p) = lo(p) + (hi(p) - lo(p)) * unit(eng);
    if (!use_aux || (y - view.aux[target]).norm() <= radius) return y;
  }
  return own;
}

}  // namespace detail

/// One vector per (Byzantine sender, regular out-neighbor) pair. Output depends only on
/// (strategy.seed, round, view): a fresh engine is derived for every round.
///
/// evasive_uniform samples uniformly from the box spanned, per coordinate, by the
/// (F+1)-th smallest and largest values among the target's regular in-neighbors, and
/// resamples until the point is no further from the target's auxiliary estimate than the
/// (F+1)-th largest regular distance. If no sample qualifies it sends the target's own state.
inline MessageMap craft_messages(const AdversaryStrategy& s, std::uint64_t round, const NetworkView& view) {
  MessageMap out;
  Engine eng = make_engine(derive_seed(s.seed, round));
  std::normal_distribution<double> normal(0.0, 1.0);
  std::bernoulli_distribution coin(0.5);
  const auto outs = view.graph.out_neighbors();
  for (NodeId sender = 0; sender < view.graph.node_count(); ++sender) {
    if (!view.byzantine[sender]) continue;
    for (NodeId target : outs[sender]) {
      if (view.byzantine[target]) continue;
      const Vector& own = view.states[target];
      Vector msg;
      switch (s.kind) {
        case AdversaryKind::constant_point:
          if (s.target.size() != static_cast<std::size_t>(own.size()))
            throw InvalidArgument("constant_point target has wrong dimension");
          msg = Eigen::Map<const Vector>(s.target.data(), static_cast<Eigen::Index>(s.target.size()));
          break;
        case AdversaryKind::large_noise:
          msg = own;
          for (Eigen::Index p = 0; p < msg.size(); ++p) msg(p) += s.noise_scale * normal(eng);
          break;
        case AdversaryKind::coordinate_spike: {
          msg = own;
          const auto c = static_cast<Eigen::Index>(s.coordinate % static_cast<std::size_t>(own.size()));
          msg(c) = coin(eng) ? s.magnitude : -s.magnitude;
          break;
        }
        case AdversaryKind::evasive_uniform:
          msg = detail::evasive_sample(s, view, target, eng);
          break;
      }
      out.emplace(MessageKey{sender, target}, std::move(msg));
    }
  }
  return out;
}

/// Regular nodes with more than F Byzantine in-neighbors, one message each.
inline std::vector<std::string> f_local_violations(const DirectedGraph& g, const std::vector<bool>& byzantine,
                                                   std::size_t f) {
  std::vector<std::string> v;
  if (byzantine.size() != g.node_count()) {
    v.push_back("byzantine mask size does not match node count");
    return v;
  }
  for (NodeId i = 0; i < g.node_count(); ++i) {
    if (byzantine[i]) continue;
    std::size_t count = 0;
    for (NodeId j : g.in_neighbors(i))
      if (byzantine[j]) ++count;
    if (count > f)
      v.push_back("regular node " + std::to_string(i) + " has " + std::to_string(count) +
                  " Byzantine in-neighbors (F=" + std::to_string(f) + ")");
  }
  return v;
}

inline bool is_f_local(const DirectedGraph& g, const std::vector<bool>& byzantine, std::size_t f) {
  return f_local_violations(g, byzantine, f).empty();
}

/// Greedy seeded placement of up to `count` Byzantine nodes keeping the set F-local.
/// Candidates are tried in increasing out-degree, ties in seeded random order.
inline std::vector<NodeId> place_byzantine(const DirectedGraph& g, std::size_t count, std::size_t f, Seed seed) {
  std::vector<NodeId> order(g.node_count());
  for (NodeId i = 0; i < order.size(); ++i) order[i] = i;
  Engine eng = make_engine(seed);
  std::shuffle(order.begin(), order.end(), eng);

  const auto outs = g.out_neighbors();
  std::stable_sort(order.begin(), order.end(),
                   [&](NodeId a, NodeId b) { return outs[a].size() < outs[b].size(); });
  std::vector<std::size_t> byz_in(g.node_count(), 0);
  std::vector<bool> chosen(g.node_count(), false);
  std::vector<NodeId> picked;
  for (NodeId cand : order) {
    if (picked.size() >= count) break;
    // cand stops being regular, so only its regular out-neighbors constrain it
    bool ok = true;
    for (NodeId t : outs[cand])
      if (!chosen[t] && byz_in[t] + 1 > f) ok = false;
    if (!ok) continue;
    chosen[cand] = true;
    picked.push_back(cand);
    for (NodeId t : outs[cand]) ++byz_in[t];
  }
  std::sort(picked.begin(), picked.end());
  return picked;
}

}  // namespace rdo
