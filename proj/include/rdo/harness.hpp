#pragma once

// Scenario configuration, orchestration, and output emission.

#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "rdo/adversary.hpp"
#include "rdo/analysis.hpp"
#include "rdo/consensus.hpp"
#include "rdo/convex.hpp"
#include "rdo/dynamics.hpp"
#include "rdo/graph.hpp"
#include "rdo/io.hpp"
#include "rdo/rng.hpp"

namespace rdo {

enum class GraphSourceKind { generated, file };

struct GraphSource {
  GraphSourceKind kind = GraphSourceKind::generated;
  std::optional<std::size_t> r;  // default (2d+1)F+1
  std::optional<Seed> seed;      // default: "graph" stream of the master seed
  std::string path;              // kind == file

  friend bool operator==(const GraphSource&, const GraphSource&) = default;
};

struct AnalysisParams {
  double eps_min = 1e-4;
  double eps_max = 1e2;
  std::size_t eps_count = 200;
  double tail_fraction = 0.25;

  friend bool operator==(const AnalysisParams&, const AnalysisParams&) = default;
};

struct OutputPaths {
  std::string trajectory;
  std::string summary;
  std::string consensus_trace;
  std::string functions;

  friend bool operator==(const OutputPaths&, const OutputPaths&) = default;
};

struct ScenarioConfig {
  std::size_t n = 100;
  std::size_t d = 3;
  std::size_t f = 2;
  GraphSource graph;
  std::optional<Seed> function_seed;
  double saturation_bound = 100.0;
  std::string functions_file;  // overrides generated functions when set
  std::vector<NodeId> byzantine_ids;
  std::optional<std::size_t> byzantine_count;  // seeded F-local placement when ids are empty
  AdversaryStrategy adversary;                 // adversary.seed is unused; see adversary_seed
  std::optional<Seed> adversary_seed;
  std::optional<Seed> consensus_seed;
  StepSchedule schedule;
  std::size_t iterations = 500;
  AuxMode aux_mode = AuxMode::common;
  ConsensusParams aux;
  AnalysisParams analysis;
  Seed master_seed = 0;
  std::optional<std::vector<std::vector<double>>> initial_states;
  OutputPaths output;

  friend bool operator==(const ScenarioConfig&, const ScenarioConfig&) = default;
};

inline std::size_t default_robustness(std::size_t d, std::size_t f) { return (2 * d + 1) * f + 1; }

// ---------------------------------------------------------------------------
// JSON encoding. Unset optionals are omitted, so parse(serialize(cfg)) == cfg.

namespace detail {

template <typename T>
void put_opt(Json& j, const char* key, const std::optional<T>& v) {
  if (v) j[key] = *v;
}

inline std::string aux_mode_name(AuxMode m) { return m == AuxMode::common ? "common" : "per_node"; }

}  // namespace detail

inline Json config_to_json(const ScenarioConfig& c) {
  Json j;
  j["n"] = c.n;
  j["d"] = c.d;
  j["f"] = c.f;
  Json g;
  g["source"] = c.graph.kind == GraphSourceKind::generated ? "generated" : "file";
  detail::put_opt(g, "r", c.graph.r);
  detail::put_opt(g, "seed", c.graph.seed);
  if (c.graph.kind == GraphSourceKind::file) g["path"] = c.graph.path;
  j["graph"] = g;
  detail::put_opt(j, "function_seed", c.function_seed);
  j["L"] = c.saturation_bound;
  if (!c.functions_file.empty()) j["functions_file"] = c.functions_file;
  j["byzantine_ids"] = c.byzantine_ids;
  detail::put_opt(j, "byzantine_count", c.byzantine_count);
  Json a;
  a["kind"] = to_string(c.adversary.kind);
  a["target"] = c.adversary.target;
  a["noise_scale"] = c.adversary.noise_scale;
  a["magnitude"] = c.adversary.magnitude;
  a["coordinate"] = c.adversary.coordinate;
  a["max_resample"] = c.adversary.max_resample;
  detail::put_opt(a, "seed", c.adversary_seed);
  j["adversary"] = a;
  detail::put_opt(j, "consensus_seed", c.consensus_seed);
  j["schedule"] = {{"kind", c.schedule.kind == ScheduleKind::harmonic ? "harmonic" : "power"},
                   {"eta0", c.schedule.eta0},
                   {"gamma", c.schedule.gamma}};
  j["iterations"] = c.iterations;
  j["aux_mode"] = detail::aux_mode_name(c.aux_mode);
  j["aux"] = {{"max_iters", c.aux.max_iters}, {"tol", c.aux.tol}};
  j["analysis"] = {{"eps_min", c.analysis.eps_min},
                   {"eps_max", c.analysis.eps_max},
                   {"eps_count", c.analysis.eps_count},
                   {"tail_fraction", c.analysis.tail_fraction}};
  j["master_seed"] = c.master_seed;
  detail::put_opt(j, "initial_states", c.initial_states);
  Json o = Json::object();
  if (!c.output.trajectory.empty()) o["trajectory"] = c.output.trajectory;
  if (!c.output.summary.empty()) o["summary"] = c.output.summary;
  if (!c.output.consensus_trace.empty()) o["consensus_trace"] = c.output.consensus_trace;
  if (!c.output.functions.empty()) o["functions"] = c.output.functions;
  j["output"] = o;
  return j;
}

namespace detail {

class JsonReader {
 public:
  explicit JsonReader(std::vector<std::string>& errors) : errors_(errors) {}

  template <typename T>
  void get(const Json& j, const char* key, T& out, const std::string& where) {
    if (!j.contains(key)) return;
    try {
      out = j.at(key).get<T>();
    } catch (const Json::exception&) {
      errors_.push_back(where + key + ": wrong type");
    }
  }

  template <typename T>
  void get_opt(const Json& j, const char* key, std::optional<T>& out, const std::string& where) {
    if (!j.contains(key)) return;
    T v{};
    get(j, key, v, where);
    out = v;
  }

  void allow_keys(const Json& j, std::initializer_list<const char*> keys, const std::string& where) {
    if (!j.is_object()) {
      errors_.push_back(where + " must be an object");
      return;
    }
    std::set<std::string> ok(keys.begin(), keys.end());
    for (const auto& [k, v] : j.items())
      if (!ok.count(k)) errors_.push_back("unknown key '" + where + k + "'");
  }

  void error(std::string msg) { errors_.push_back(std::move(msg)); }

 private:
  std::vector<std::string>& errors_;
};

}  // namespace detail

/// Parses a scenario; every malformed or unknown field is reported in one ConfigError.
inline ScenarioConfig config_from_json(const Json& j) {
  std::vector<std::string> errors;
  detail::JsonReader rd(errors);
  ScenarioConfig c;
  rd.allow_keys(j,
                {"n", "d", "f", "graph", "function_seed", "L", "functions_file", "byzantine_ids", "byzantine_count",
                 "adversary", "consensus_seed", "schedule", "iterations", "aux_mode", "aux", "analysis", "master_seed",
                 "initial_states", "output"},
                "");
  if (!errors.empty()) throw ConfigError(errors);
  rd.get(j, "n", c.n, "");
  rd.get(j, "d", c.d, "");
  rd.get(j, "f", c.f, "");
  if (j.contains("graph")) {
    const auto& g = j["graph"];
    rd.allow_keys(g, {"source", "r", "seed", "path"}, "graph.");
    std::string src = "generated";
    rd.get(g, "source", src, "graph.");
    if (src == "generated")
      c.graph.kind = GraphSourceKind::generated;
    else if (src == "file")
      c.graph.kind = GraphSourceKind::file;
    else
      rd.error("graph.source must be 'generated' or 'file'");
    rd.get_opt(g, "r", c.graph.r, "graph.");
    rd.get_opt(g, "seed", c.graph.seed, "graph.");
    rd.get(g, "path", c.graph.path, "graph.");
  }
  rd.get_opt(j, "function_seed", c.function_seed, "");
  rd.get(j, "L", c.saturation_bound, "");
  rd.get(j, "functions_file", c.functions_file, "");
  rd.get(j, "byzantine_ids", c.byzantine_ids, "");
  rd.get_opt(j, "byzantine_count", c.byzantine_count, "");
  if (j.contains("adversary")) {
    const auto& a = j["adversary"];
    rd.allow_keys(a, {"kind", "target", "noise_scale", "magnitude", "coordinate", "max_resample", "seed"}, "adversary.");
    std::string kind = to_string(c.adversary.kind);
    rd.get(a, "kind", kind, "adversary.");
    try {
      c.adversary.kind = adversary_kind_from_string(kind);
    } catch (const InvalidArgument& e) {
      rd.error(e.what());
    }
    rd.get(a, "target", c.adversary.target, "adversary.");
    rd.get(a, "noise_scale", c.adversary.noise_scale, "adversary.");
    rd.get(a, "magnitude", c.adversary.magnitude, "adversary.");
    rd.get(a, "coordinate", c.adversary.coordinate, "adversary.");
    rd.get(a, "max_resample", c.adversary.max_resample, "adversary.");
    rd.get_opt(a, "seed", c.adversary_seed, "adversary.");
  }
  rd.get_opt(j, "consensus_seed", c.consensus_seed, "");
  if (j.contains("schedule")) {
    const auto& s = j["schedule"];
    rd.allow_keys(s, {"kind", "eta0", "gamma"}, "schedule.");
    std::string kind = "harmonic";
    rd.get(s, "kind", kind, "schedule.");
    if (kind == "harmonic")
      c.schedule.kind = ScheduleKind::harmonic;
    else if (kind == "power")
      c.schedule.kind = ScheduleKind::power;
    else
      rd.error("schedule.kind must be 'harmonic' or 'power'");
    rd.get(s, "eta0", c.schedule.eta0, "schedule.");
    rd.get(s, "gamma", c.schedule.gamma, "schedule.");
  }
  rd.get(j, "iterations", c.iterations, "");
  if (j.contains("aux_mode")) {
    std::string m;
    rd.get(j, "aux_mode", m, "");
    if (m == "common")
      c.aux_mode = AuxMode::common;
    else if (m == "per_node")
      c.aux_mode = AuxMode::per_node;
    else
      rd.error("aux_mode must be 'common' or 'per_node'");
  }
  if (j.contains("aux")) {
    rd.allow_keys(j["aux"], {"max_iters", "tol"}, "aux.");
    rd.get(j["aux"], "max_iters", c.aux.max_iters, "aux.");
    rd.get(j["aux"], "tol", c.aux.tol, "aux.");
  }
  if (j.contains("analysis")) {
    const auto& a = j["analysis"];
    rd.allow_keys(a, {"eps_min", "eps_max", "eps_count", "tail_fraction"}, "analysis.");
    rd.get(a, "eps_min", c.analysis.eps_min, "analysis.");
    rd.get(a, "eps_max", c.analysis.eps_max, "analysis.");
    rd.get(a, "eps_count", c.analysis.eps_count, "analysis.");
    rd.get(a, "tail_fraction", c.analysis.tail_fraction, "analysis.");
  }
  rd.get(j, "master_seed", c.master_seed, "");
  rd.get_opt(j, "initial_states", c.initial_states, "");
  if (j.contains("output")) {
    const auto& o = j["output"];
    rd.allow_keys(o, {"trajectory", "summary", "consensus_trace", "functions"}, "output.");
    rd.get(o, "trajectory", c.output.trajectory, "output.");
    rd.get(o, "summary", c.output.summary, "output.");
    rd.get(o, "consensus_trace", c.output.consensus_trace, "output.");
    rd.get(o, "functions", c.output.functions, "output.");
  }
  if (!errors.empty()) throw ConfigError(errors);
  return c;
}

struct LoadedConfig {
  ScenarioConfig config;
  std::filesystem::path base_dir;  // input paths in the config resolve against this
};

inline LoadedConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError({"cannot open config '" + path.string() + "'"});
  Json j;
  try {
    in >> j;
  } catch (const Json::exception& e) {
    throw ConfigError({std::string("config is not valid JSON: ") + e.what()});
  }
  return {config_from_json(j), path.parent_path()};
}

/// Fills every defaulted seed and the default robustness request, so the result fully
/// determines the run on its own.
inline ScenarioConfig resolve(ScenarioConfig c) {
  if (!c.graph.seed) c.graph.seed = derive_seed(c.master_seed, "graph");
  if (!c.graph.r && c.graph.kind == GraphSourceKind::generated) c.graph.r = default_robustness(c.d, c.f);
  if (!c.function_seed) c.function_seed = derive_seed(c.master_seed, "functions");
  if (!c.adversary_seed) c.adversary_seed = derive_seed(c.master_seed, "adversary");
  if (!c.consensus_seed) c.consensus_seed = derive_seed(c.master_seed, "consensus");
  return c;
}

struct PreparedScenario {
  ScenarioConfig config;  // resolved
  Scenario<QuadraticFunction> scenario;
  std::vector<NodeId> byzantine_ids;
  std::vector<std::string> warnings;

  std::vector<QuadraticFunction> regular_functions() const {
    std::vector<QuadraticFunction> out;
    for (NodeId i = 0; i < scenario.functions.size(); ++i)
      if (!scenario.byzantine[i]) out.push_back(scenario.functions[i]);
    return out;
  }
};

namespace detail {

inline std::filesystem::path resolve_input(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  return path.is_absolute() || base.empty() ? path : base / path;
}

}  // namespace detail

/// Builds graph, functions, Byzantine set and attack from a config and validates the lot.
inline PreparedScenario prepare(const ScenarioConfig& raw, const std::filesystem::path& base_dir = {}) {
  PreparedScenario ps;
  ps.config = resolve(raw);
  const ScenarioConfig& c = ps.config;
  std::vector<std::string> v;

  if (c.n == 0) v.push_back("n must be >= 1");
  if (c.d == 0) v.push_back("d must be >= 1");
  if (!(c.saturation_bound > 0.0)) v.push_back("L must be positive");
  if (c.iterations == 0) v.push_back("iterations must be >= 1");
  if (!(c.analysis.eps_min > 0.0 && c.analysis.eps_max >= c.analysis.eps_min && c.analysis.eps_count >= 1))
    v.push_back("analysis eps grid must satisfy 0 < eps_min <= eps_max and eps_count >= 1");
  if (!(c.analysis.tail_fraction > 0.0 && c.analysis.tail_fraction <= 1.0))
    v.push_back("analysis.tail_fraction must lie in (0, 1]");
  if (!v.empty()) throw ConfigError(v);

  // graph
  Scenario<QuadraticFunction>& sc = ps.scenario;
  if (c.graph.kind == GraphSourceKind::generated) {
    try {
      sc.graph = grow_robust_graph(c.n, *c.graph.r, *c.graph.seed);
    } catch (const InvalidArgument& e) {
      v.emplace_back(e.what());
    }
  } else {
    const auto path = detail::resolve_input(base_dir, c.graph.path);
    std::ifstream in(path);
    if (!in) {
      v.push_back("cannot open graph file '" + path.string() + "'");
    } else {
      try {
        sc.graph = read_graph(in);
        if (sc.graph.node_count() != c.n)
          v.push_back("graph file has " + std::to_string(sc.graph.node_count()) + " nodes, config says n=" +
                      std::to_string(c.n));
      } catch (const InvalidArgument& e) {
        v.emplace_back(e.what());
      }
    }
  }
  if (!v.empty()) throw ConfigError(v);

  // functions
  if (!c.functions_file.empty()) {
    const auto path = detail::resolve_input(base_dir, c.functions_file);
    std::ifstream in(path);
    if (!in) throw ConfigError({"cannot open functions file '" + path.string() + "'"});
    try {
      Json j;
      in >> j;
      sc.functions = functions_from_json(j);
    } catch (const std::exception& e) {
      throw ConfigError({std::string("functions file: ") + e.what()});
    }
    if (sc.functions.size() != c.n) v.push_back("functions file must list one function per node");
    for (const auto& f : sc.functions)
      if (f.dim() != c.d) {
        v.push_back("functions file dimension does not match d");
        break;
      }
  } else {
    Engine eng = make_engine(*c.function_seed);
    RandomQuadraticParams p;
    p.saturation_bound = c.saturation_bound;
    sc.functions.reserve(c.n);
    for (std::size_t i = 0; i < c.n; ++i) sc.functions.push_back(random_quadratic(c.d, eng, p));
  }

  // adversary placement
  if (!c.byzantine_ids.empty()) {
    ps.byzantine_ids = c.byzantine_ids;
    if (c.byzantine_count && *c.byzantine_count != c.byzantine_ids.size())
      v.push_back("byzantine_count disagrees with byzantine_ids");
  } else if (c.byzantine_count) {
    ps.byzantine_ids = place_byzantine(sc.graph, *c.byzantine_count, c.f, derive_seed(c.master_seed, "byzantine"));
    if (ps.byzantine_ids.size() < *c.byzantine_count)
      ps.warnings.push_back("placed only " + std::to_string(ps.byzantine_ids.size()) + " of " +
                            std::to_string(*c.byzantine_count) + " Byzantine nodes under the F-local constraint");
  }
  sc.byzantine.assign(c.n, false);
  for (NodeId b : ps.byzantine_ids) {
    if (b >= c.n)
      v.push_back("byzantine id " + std::to_string(b) + " out of range");
    else
      sc.byzantine[b] = true;
  }

  sc.adversary = c.adversary;
  sc.adversary.seed = *c.adversary_seed;
  sc.f = c.f;
  sc.schedule = c.schedule;
  sc.iterations = c.iterations;
  sc.aux_mode = c.aux_mode;
  sc.aux_params = c.aux;
  sc.consensus_seed = *c.consensus_seed;
  if (c.initial_states) {
    std::vector<Vector> init;
    for (const auto& row : *c.initial_states)
      init.push_back(Eigen::Map<const Vector>(row.data(), static_cast<Eigen::Index>(row.size())));
    sc.initial_states = std::move(init);
  }

  auto more = scenario_violations(sc);
  v.insert(v.end(), more.begin(), more.end());
  if (!v.empty()) throw ConfigError(v);
  return ps;
}

struct Verdicts {
  std::size_t prop1_violations = 0;
  std::size_t descent_violations = 0;
  std::optional<Theorem2Report> theorem2;  // absent when K < 100
  MinimizerInBall minimizer_in_ball;
  double consensus_ratio = 0.0;  // diameter[K] / diameter[0]

  bool all_passed() const {
    return prop1_violations == 0 && descent_violations == 0 && (!theorem2 || theorem2->holds) &&
           minimizer_in_ball.inside;
  }
};

struct ScenarioOutcome {
  PreparedScenario prepared;
  SimulationResult sim;
  RadiusReport radius;
  Verdicts verdicts;
  double f_star = 0.0;
  std::string trajectory_csv;
  Json summary;
};

inline RadiusReport radius_for(const PreparedScenario& ps, const Vector& aux) {
  const auto& a = ps.config.analysis;
  return convergence_radius(ps.regular_functions(), aux, log_grid(a.eps_min, a.eps_max, a.eps_count));
}

/// Auxiliary point of a prepared scenario without running the main loop.
inline AuxiliaryPointResult auxiliary_point_for(const PreparedScenario& ps) {
  const auto& sc = ps.scenario;
  std::vector<Vector> mins;
  for (const auto& f : sc.functions) mins.push_back(f.minimizer());
  return compute_auxiliary_point(sc.graph, mins, sc.byzantine, sc.adversary, sc.f, sc.aux_params, sc.consensus_seed);
}

namespace detail {

inline Json theorem2_json(const Theorem2Report& t) {
  Json j = {{"holds", t.holds}, {"bound", t.bound}, {"max_tail_distance", t.max_tail_distance},
            {"tail_start", t.tail_start}, {"margin", t.bound - t.max_tail_distance}};
  j["first_entry"] = t.first_entry ? Json(*t.first_entry) : Json(nullptr);
  return j;
}

}  // namespace detail

/// graph -> functions -> adversary -> consensus -> dynamics -> analysis.
inline ScenarioOutcome run_scenario(PreparedScenario ps) {
  ScenarioOutcome out;
  out.sim = simulate(ps.scenario);
  const auto& sim = out.sim;
  const auto regular_fns = ps.regular_functions();
  const Vector& aux = sim.aux_point();
  const double slack = sim.aux_slack();

  out.radius = radius_for(ps, aux);
  auto& vd = out.verdicts;
  vd.prop1_violations = sim.prop1_violations.size();
  vd.descent_violations =
      verify_descent_inequality(sim.trajectory, ps.scenario.functions, aux, out.radius.argmin_eps).size();
  if (ps.scenario.iterations >= 100) {
    const auto dists = max_distances(sim.trajectory, aux);
    vd.theorem2 = verify_theorem2(dists, out.radius, ps.config.analysis.tail_fraction, slack + 1e-6);
  }
  vd.minimizer_in_ball = verify_minimizer_in_ball(regular_fns, aux, out.radius);
  const double d0 = sim.records.front().consensus_diameter;
  vd.consensus_ratio = d0 > 0.0 ? sim.records.back().consensus_diameter / d0 : 0.0;

  const Vector& x_star = vd.minimizer_in_ball.x_star;
  std::vector<NodeId> regular = sim.trajectory.regular;
  out.f_star = average_objective(ps.scenario.functions, regular, x_star);
  const double gap0 = sim.records.front().f_bar - out.f_star;
  const double gapK = sim.records.back().f_bar - out.f_star;

  std::ostringstream csv;
  write_records_csv(csv, sim.records);
  out.trajectory_csv = csv.str();

  const double xi = 1e-2 * out.radius.r_star;
  const auto diag = proof_diagnostics(regular_fns, aux, out.radius.argmin_eps, xi, ps.scenario.schedule);
  auto opt_json = [](const std::optional<std::size_t>& v) { return v ? Json(*v) : Json(nullptr); };

  Json s;
  s["config"] = config_to_json(ps.config);
  s["byzantine_ids"] = ps.byzantine_ids;
  s["f_star"] = out.f_star;
  s["x_star"] = to_json(x_star);
  s["aux_point"] = to_json(aux);
  s["aux"] = {{"mode", detail::aux_mode_name(sim.aux_mode)},
              {"converged", sim.aux.converged},
              {"diameter", sim.aux.diameter},
              {"iterations", sim.aux.iterations_used},
              {"hyperrect_lo", to_json(sim.aux.hyperrect_lo)},
              {"hyperrect_hi", to_json(sim.aux.hyperrect_hi)}};
  s["final"] = {{"f_bar", sim.records.back().f_bar},
                {"gap", gapK},
                {"relative_gap", gap0 > 0.0 ? gapK / gap0 : 0.0},
                {"aux_gap", average_objective(ps.scenario.functions, regular, aux) - out.f_star},
                {"consensus_diameter", sim.records.back().consensus_diameter}};
  s["radius"] = {{"R_star", out.radius.r_star}, {"argmin_eps", out.radius.argmin_eps}};
  s["byzantine_messages"] = {{"received", sim.byzantine_received},
                             {"discarded", sim.byzantine_discarded},
                             {"discard_rate", sim.byzantine_discard_rate()}};
  Json v = {{"prop1_violations", vd.prop1_violations},
            {"descent_violations", vd.descent_violations},
            {"minimizer_in_ball", {{"inside", vd.minimizer_in_ball.inside}, {"margin", vd.minimizer_in_ball.margin}}},
            {"consensus_ratio", vd.consensus_ratio},
            {"all_passed", vd.all_passed()}};
  v["theorem2"] = vd.theorem2 ? detail::theorem2_json(*vd.theorem2) : Json(nullptr);
  s["verdicts"] = v;
  s["proof_diagnostics"] = {{"eps", diag.eps},
                            {"xi", diag.xi},
                            {"s_star_xi", diag.s_star_xi},
                            {"k1", opt_json(diag.thresholds.k1)},
                            {"k2", opt_json(diag.thresholds.k2)},
                            {"k3", opt_json(diag.thresholds.k3)}};
  std::vector<std::string> warnings = ps.warnings;
  warnings.insert(warnings.end(), sim.warnings.begin(), sim.warnings.end());
  s["warnings"] = warnings;
  Json finals = Json::array();
  for (const auto& a : sim.final_states)
    finals.push_back({{"id", a.id},
                      {"role", a.role == Role::regular ? "regular" : "byzantine"},
                      {"x", to_json(a.x)},
                      {"aux", to_json(a.aux)}});
  s["final_states"] = finals;
  out.summary = std::move(s);
  out.prepared = std::move(ps);
  return out;
}

inline ScenarioOutcome run_scenario(const ScenarioConfig& cfg, const std::filesystem::path& base_dir = {}) {
  return run_scenario(prepare(cfg, base_dir));
}

/// Writes every output named in the config. Returns the paths written.
inline std::vector<std::string> write_outputs(const ScenarioOutcome& o) {
  std::vector<std::string> written;
  const auto& out = o.prepared.config.output;
  auto emit = [&](const std::string& path, const auto& writer) {
    if (path.empty()) return;
    std::ofstream f(path, std::ios::binary);
    if (!f) throw DataError("cannot write '" + path + "'");
    writer(f);
    written.push_back(path);
  };
  emit(out.trajectory, [&](std::ostream& f) { f << o.trajectory_csv; });
  emit(out.summary, [&](std::ostream& f) { f << o.summary.dump(2) << '\n'; });
  emit(out.consensus_trace, [&](std::ostream& f) { write_consensus_trace(f, o.sim.aux.trace); });
  emit(out.functions, [&](std::ostream& f) { f << functions_to_json(o.prepared.scenario.functions).dump(2) << '\n'; });
  return written;
}

}  // namespace rdo
