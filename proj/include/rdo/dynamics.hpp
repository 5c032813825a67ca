#pragma once

// Distance / min-max filtered subgradient dynamics for the regular agents.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rdo/adversary.hpp"
#include "rdo/consensus.hpp"
#include "rdo/convex.hpp"
#include "rdo/graph.hpp"

namespace rdo {

enum class Role { regular, byzantine };

struct AgentState {
  NodeId id = 0;
  Role role = Role::regular;
  Vector x;
  Vector aux;
};

struct InboxEntry {
  NodeId sender;
  Vector value;
};

/// Received set minus the receiver's own state, plus that own state kept separately.
/// Filters only ever remove from `entries`.
struct InboxView {
  std::vector<InboxEntry> entries;
  Vector own;
};

/// Removes the min(F, |entries|) entries furthest from `aux`; among equal distances the
/// larger sender id goes first.
inline InboxView dist_filter(std::size_t f, const Vector& aux, const InboxView& inbox) {
  const std::size_t n = inbox.entries.size();
  const std::size_t drop = std::min(f, n);
  if (drop == 0) return inbox;
  std::vector<double> dist(n);
  for (std::size_t t = 0; t < n; ++t) dist[t] = (inbox.entries[t].value - aux).norm();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (dist[a] != dist[b]) return dist[a] > dist[b];
    return inbox.entries[a].sender > inbox.entries[b].sender;
  });
  std::vector<bool> removed(n, false);
  for (std::size_t t = 0; t < drop; ++t) removed[order[t]] = true;

  InboxView out;
  out.own = inbox.own;
  for (std::size_t t = 0; t < n; ++t)
    if (!removed[t]) out.entries.push_back(inbox.entries[t]);
  return out;
}

/// For every coordinate, marks the entries holding the F highest and the F lowest values
/// (ties: larger id first among highest, smaller id first among lowest), then removes the
/// union of all marks at once.
inline InboxView minmax_filter(std::size_t f, const InboxView& inbox) {
  const std::size_t n = inbox.entries.size();
  if (f == 0 || n == 0) return inbox;
  const std::size_t k = std::min(f, n);
  std::vector<bool> removed(n, false);
  std::vector<std::size_t> order(n);
  const auto d = inbox.entries.front().value.size();
  for (Eigen::Index p = 0; p < d; ++p) {
    auto val = [&](std::size_t t) { return inbox.entries[t].value(p); };
    auto id = [&](std::size_t t) { return inbox.entries[t].sender; };
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return val(a) != val(b) ? val(a) > val(b) : id(a) > id(b);
    });
    for (std::size_t t = 0; t < k; ++t) removed[order[t]] = true;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return val(a) != val(b) ? val(a) < val(b) : id(a) < id(b);
    });
    for (std::size_t t = 0; t < k; ++t) removed[order[t]] = true;
  }
  InboxView out;
  out.own = inbox.own;
  for (std::size_t t = 0; t < n; ++t)
    if (!removed[t]) out.entries.push_back(inbox.entries[t]);
  return out;
}

/// Equal-weight mean of the surviving entries and the own state.
inline Vector filtered_average(const InboxView& inbox) {
  Vector sum = inbox.own;
  for (const auto& e : inbox.entries) sum += e.value;
  return sum / static_cast<double>(inbox.entries.size() + 1);
}

template <LocalObjective Objective>
Vector gradient_step(const Objective& f, const Vector& z, double eta) {
  if (!(eta > 0.0)) throw InvalidArgument("gradient_step: eta must be positive");
  return z - eta * f.subgradient(z);
}

enum class ScheduleKind { harmonic, power };

/// eta[k] = eta0 / (k+1)^gamma. `harmonic` pins gamma = 1.
struct StepSchedule {
  ScheduleKind kind = ScheduleKind::harmonic;
  double eta0 = 1.0;
  double gamma = 1.0;

  friend bool operator==(const StepSchedule&, const StepSchedule&) = default;
};

inline void validate(const StepSchedule& s) {
  if (!(s.eta0 > 0.0)) throw InvalidArgument("step schedule: eta0 must be positive");
  if (s.kind == ScheduleKind::power && !(s.gamma > 0.0 && s.gamma <= 1.0))
    throw InvalidArgument("step schedule: gamma must lie in (0, 1]");
}

inline double step_size(const StepSchedule& s, std::size_t k) {
  const double gamma = s.kind == ScheduleKind::harmonic ? 1.0 : s.gamma;
  return s.eta0 / std::pow(static_cast<double>(k) + 1.0, gamma);
}

/// Smallest k with step_size(s, k) <= bound.
inline std::size_t first_step_below(const StepSchedule& s, double bound) {
  if (!(bound > 0.0)) return static_cast<std::size_t>(-1);
  const double gamma = s.kind == ScheduleKind::harmonic ? 1.0 : s.gamma;
  double k = std::ceil(std::pow(s.eta0 / bound, 1.0 / gamma) - 1.0);
  if (k < 0.0) k = 0.0;
  auto kk = static_cast<std::size_t>(k);
  while (kk > 0 && step_size(s, kk - 1) <= bound) --kk;
  while (step_size(s, kk) > bound) ++kk;
  return kk;
}

enum class AuxMode { common, per_node };

/// Fully resolved simulation input: concrete graph, one objective per node (entries of
/// Byzantine nodes are unused except as their initial state), and the attack.
template <LocalObjective Objective>
struct Scenario {
  DirectedGraph graph;
  std::vector<Objective> functions;
  std::vector<bool> byzantine;
  AdversaryStrategy adversary;
  std::size_t f = 0;
  StepSchedule schedule;
  std::size_t iterations = 500;
  AuxMode aux_mode = AuxMode::common;
  ConsensusParams aux_params;
  Seed consensus_seed = 0;
  // Replaces x_i[0] = x_i* for every node when set.
  std::optional<std::vector<Vector>> initial_states;
};

struct IterationRecord {
  std::size_t k = 0;
  double eta = 0.0;
  double f_bar = 0.0;
  double f_min = 0.0;
  double f_max = 0.0;
  double consensus_diameter = 0.0;
  double max_dist_to_aux = 0.0;
  std::size_t filters_removed_total = 0;

  friend bool operator==(const IterationRecord&, const IterationRecord&) = default;
};

struct Prop1Violation {
  std::size_t k;
  NodeId node;
  double lhs;  // ||z_i - aux_i||
  double rhs;  // max over regular in-neighbors and self of ||x_j - aux_i||
};

/// Per-step data for the regular nodes, indexed [k][r] where r indexes `regular`.
struct Trajectory {
  std::vector<NodeId> regular;
  std::vector<std::vector<Vector>> x;   // k = 0..K
  std::vector<std::vector<Vector>> z;   // k = 0..K-1
  std::vector<std::vector<double>> g_norm;  // k = 0..K-1, saturated subgradient norm at z
  std::vector<double> eta;              // k = 0..K-1

  std::size_t steps() const { return z.size(); }
};

struct SimulationResult {
  std::vector<IterationRecord> records;
  AuxiliaryPointResult aux;
  AuxMode aux_mode = AuxMode::common;  // effective mode after any fallback
  std::vector<AgentState> final_states;
  Trajectory trajectory;
  std::vector<Prop1Violation> prop1_violations;
  std::size_t filter_deficit_nodes = 0;  // regular nodes with fewer than (2d+1)F in-neighbors
  std::size_t byzantine_received = 0;    // Byzantine entries entering filters, all rounds
  std::size_t byzantine_discarded = 0;   // of those, removed by either filter
  std::vector<std::string> warnings;

  /// The auxiliary point analysis is anchored to: exact in `common` mode.
  const Vector& aux_point() const { return aux.lead_estimate(); }
  /// Slack every "distance to x-hat" check must absorb in `per_node` mode.
  double aux_slack() const { return aux_mode == AuxMode::common ? 0.0 : aux.diameter; }

  double byzantine_discard_rate() const {
    return byzantine_received == 0 ? 0.0
                                   : static_cast<double>(byzantine_discarded) / static_cast<double>(byzantine_received);
  }
};

/// Mean of the regular functions.
template <LocalObjective Objective>
double average_objective(const std::vector<Objective>& functions, std::span<const NodeId> regular, const Vector& x) {
  double s = 0.0;
  for (NodeId i : regular) s += functions[i].value(x);
  return s / static_cast<double>(regular.size());
}

template <LocalObjective Objective>
std::vector<std::string> scenario_violations(const Scenario<Objective>& sc) {
  std::vector<std::string> v;
  const std::size_t n = sc.graph.node_count();
  if (n == 0) v.push_back("graph has no nodes");
  if (sc.functions.size() != n)
    v.push_back("expected " + std::to_string(n) + " functions, got " + std::to_string(sc.functions.size()));
  if (sc.byzantine.size() != n) v.push_back("byzantine mask size does not match node count");
  if (!sc.functions.empty()) {
    const auto d = sc.functions.front().dim();
    for (std::size_t i = 0; i < sc.functions.size(); ++i)
      if (sc.functions[i].dim() != d) v.push_back("function " + std::to_string(i) + " has inconsistent dimension");
    if (sc.initial_states) {
      if (sc.initial_states->size() != n) v.push_back("initial_states must list every node");
      for (const auto& x : *sc.initial_states)
        if (static_cast<std::size_t>(x.size()) != d) {
          v.push_back("initial state with wrong dimension");
          break;
        }
    }
    if (sc.adversary.kind == AdversaryKind::constant_point && sc.adversary.target.size() != d &&
        std::count(sc.byzantine.begin(), sc.byzantine.end(), true) > 0)
      v.push_back("constant_point target dimension does not match d");
  }
  if (sc.byzantine.size() == n) {
    if (std::count(sc.byzantine.begin(), sc.byzantine.end(), false) == 0) v.push_back("no regular nodes");
    auto fl = f_local_violations(sc.graph, sc.byzantine, sc.f);
    v.insert(v.end(), fl.begin(), fl.end());
  }
  if (sc.aux_params.max_iters < 1) v.push_back("aux max_iters must be >= 1");
  try {
    validate(sc.schedule);
  } catch (const InvalidArgument& e) {
    v.emplace_back(e.what());
  }
  return v;
}

namespace detail {

template <LocalObjective Objective>
IterationRecord make_record(std::size_t k, double eta, const std::vector<Objective>& functions,
                            std::span<const NodeId> regular, std::span<const Vector> x, std::span<const Vector> aux) {
  IterationRecord rec;
  rec.k = k;
  rec.eta = eta;
  Vector mean = Vector::Zero(x[regular.front()].size());
  for (NodeId i : regular) mean += x[i];
  mean /= static_cast<double>(regular.size());
  rec.f_bar = average_objective(functions, regular, mean);
  rec.f_min = std::numeric_limits<double>::infinity();
  rec.f_max = -std::numeric_limits<double>::infinity();
  for (NodeId i : regular) {
    const double fi = average_objective(functions, regular, x[i]);
    rec.f_min = std::min(rec.f_min, fi);
    rec.f_max = std::max(rec.f_max, fi);
    rec.max_dist_to_aux = std::max(rec.max_dist_to_aux, (x[i] - aux[i]).norm());
  }
  rec.consensus_diameter = diameter_of(x, regular);
  return rec;
}

}  // namespace detail

/// Local minimization, auxiliary-point consensus, then `iterations` synchronous rounds of
/// broadcast / dist_filter / minmax_filter / average / subgradient step for every regular
/// node. Emits records for k = 0..K; the row for k = K carries no filter activity.
template <LocalObjective Objective>
SimulationResult simulate(const Scenario<Objective>& sc) {
  if (auto v = scenario_violations(sc); !v.empty()) throw ConfigError(std::move(v));

  const DirectedGraph& g = sc.graph;
  const std::size_t n = g.node_count();
  const std::size_t d = sc.functions.front().dim();
  SimulationResult res;

  std::vector<NodeId> regular;
  for (NodeId i = 0; i < n; ++i)
    if (!sc.byzantine[i]) regular.push_back(i);

  std::vector<Vector> minimizers(n);
  for (NodeId i = 0; i < n; ++i) minimizers[i] = minimizer(sc.functions[i]);

  res.aux = compute_auxiliary_point(g, minimizers, sc.byzantine, sc.adversary, sc.f, sc.aux_params, sc.consensus_seed);
  res.aux_mode = sc.aux_mode;
  if (!res.aux.converged && sc.aux_mode == AuxMode::common) {
    res.warnings.push_back("auxiliary consensus did not reach tol " + std::to_string(sc.aux_params.tol) +
                           " (diameter " + std::to_string(res.aux.diameter) + "); falling back to per_node mode");
    res.aux_mode = AuxMode::per_node;
  }

  std::vector<Vector> aux(n, Vector::Zero(static_cast<Eigen::Index>(d)));
  for (NodeId i : regular)
    aux[i] = res.aux_mode == AuxMode::common ? res.aux.lead_estimate() : res.aux.per_node_aux.at(i);

  std::vector<Vector> x = sc.initial_states ? *sc.initial_states : minimizers;
  std::vector<Vector> next = x;
  const double prop1_slack = 1e-12 + res.aux_slack();
  const std::size_t need = (2 * d + 1) * sc.f;

  Trajectory& tr = res.trajectory;
  tr.regular = regular;
  auto snapshot = [&] {
    std::vector<Vector> row;
    row.reserve(regular.size());
    for (NodeId i : regular) row.push_back(x[i]);
    return row;
  };
  tr.x.push_back(snapshot());

  for (NodeId i : regular)
    if (g.in_degree(i) < need) ++res.filter_deficit_nodes;
  if (res.filter_deficit_nodes > 0)
    res.warnings.push_back(std::to_string(res.filter_deficit_nodes) + " regular node(s) have fewer than (2d+1)F=" +
                           std::to_string(need) + " in-neighbors; filters remove what is available");

  InboxView inbox;
  for (std::size_t k = 0; k < sc.iterations; ++k) {
    const double eta = step_size(sc.schedule, k);
    IterationRecord rec = detail::make_record(k, eta, sc.functions, regular, x, aux);
    const MessageMap msgs = craft_messages(sc.adversary, k, NetworkView{g, x, aux, sc.byzantine, sc.f});

    std::vector<Vector> z_row;
    std::vector<double> g_row;
    z_row.reserve(regular.size());
    g_row.reserve(regular.size());
    for (NodeId i : regular) {
      inbox.own = x[i];
      inbox.entries.clear();
      double reach = (x[i] - aux[i]).norm();
      for (NodeId j : g.in_neighbors(i)) {
        if (sc.byzantine[j]) {
          inbox.entries.push_back({j, msgs.at({j, i})});
          ++res.byzantine_received;
          ++res.byzantine_discarded;
        } else {
          inbox.entries.push_back({j, x[j]});
          reach = std::max(reach, (x[j] - aux[i]).norm());
        }
      }
      const InboxView kept = minmax_filter(sc.f, dist_filter(sc.f, aux[i], inbox));
      rec.filters_removed_total += inbox.entries.size() - kept.entries.size();
      for (const auto& e : kept.entries)
        if (sc.byzantine[e.sender]) --res.byzantine_discarded;
      const Vector z = filtered_average(kept);

      const double zdist = (z - aux[i]).norm();
      if (zdist > reach + prop1_slack) res.prop1_violations.push_back({k, i, zdist, reach});

      next[i] = gradient_step(sc.functions[i], z, eta);
      g_row.push_back(sc.functions[i].subgradient(z).norm());
      z_row.push_back(z);
    }
    for (NodeId i : regular) x[i] = next[i];
    res.records.push_back(rec);
    tr.z.push_back(std::move(z_row));
    tr.g_norm.push_back(std::move(g_row));
    tr.eta.push_back(eta);
    tr.x.push_back(snapshot());
  }
  res.records.push_back(
      detail::make_record(sc.iterations, step_size(sc.schedule, sc.iterations), sc.functions, regular, x, aux));

  res.final_states.reserve(n);
  for (NodeId i = 0; i < n; ++i)
    res.final_states.push_back({i, sc.byzantine[i] ? Role::byzantine : Role::regular, x[i], aux[i]});
  return res;
}

}  // namespace rdo
