// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include "rdo/harness.hpp"
#include "support.hpp"

namespace fs = std::filesystem;
using rdo::NodeId;
using rdo::Vector;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

int failures = 0;

void report(int id, bool ok, const std::string& detail) {
  std::printf("%s criterion %d: %s\n", ok ? "PASS" : "FAIL", id, detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

rdo::ScenarioConfig reproduction_config() {
  return rdo::load_config(fs::path(RDO_SOURCE_DIR) / "scenarios" / "reproduction.json").config;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

struct ScenarioSummary {
  std::string label;
  std::size_t prop1 = 0;
  std::size_t descent = 0;
  bool theorem2 = false;
  double t2_margin = 0.0;
  bool in_ball = false;
  double ball_margin = 0.0;
  bool common = false;
};

ScenarioSummary summarise(const std::string& label, const rdo::ScenarioOutcome& o) {
  ScenarioSummary s;
  s.label = label;
  s.prop1 = o.verdicts.prop1_violations;
  s.descent = o.verdicts.descent_violations;
  s.theorem2 = o.verdicts.theorem2 && o.verdicts.theorem2->holds;
  if (o.verdicts.theorem2) s.t2_margin = o.verdicts.theorem2->bound - o.verdicts.theorem2->max_tail_distance;
  s.in_ball = o.verdicts.minimizer_in_ball.inside;
  s.ball_margin = o.verdicts.minimizer_in_ball.margin;
  s.common = o.sim.aux_mode == rdo::AuxMode::common;
  return s;
}

// Plain-loop subgradient descent on one quadratic with norm clipping at L.
std::vector<std::vector<double>> centralized_descent(const rdo::QuadraticFunction& f, std::vector<double> x,
                                                     std::size_t steps) {
  const auto d = x.size();
  const auto& q = f.q();
  const auto& b = f.b();
  const double l = f.saturation_bound();
  std::vector<std::vector<double>> out{x};
  for (std::size_t k = 0; k < steps; ++k) {
    std::vector<double> g(d);
    double norm2 = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      double s = b(static_cast<Eigen::Index>(i));
      for (std::size_t j = 0; j < d; ++j) s += q(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) * x[j];
      g[i] = s;
      norm2 += s * s;
    }
    const double norm = std::sqrt(norm2);
    const double scale = norm > l ? l / norm : 1.0;
    const double eta = 1.0 / static_cast<double>(k + 1);
    for (std::size_t i = 0; i < d; ++i) x[i] -= eta * scale * g[i];
    out.push_back(x);
  }
  return out;
}

}  // namespace

int main() {
  const auto t_all = Clock::now();

  // 1. reproduction run
  const auto t1 = Clock::now();
  const auto base = rdo::run_scenario(reproduction_config());
  const double run_time = seconds_since(t1);
  {
    const auto& rec = base.sim.records;
    const double gap0 = rec.front().f_bar - base.f_star;
    double worst = 0.0;
    for (std::size_t k = 100; k < rec.size(); ++k) worst = std::max(worst, (rec[k].f_bar - base.f_star) / gap0);
    const double ratio = rec.back().consensus_diameter / rec.front().consensus_diameter;
    const bool ok = rec.size() == 501 && gap0 > 0.0 && worst <= 0.1 && ratio <= 0.01 && run_time < 60.0;
    report(1, ok,
           fmt("max relative gap for k>=100 = %.4g (<= 0.1), diameter[K]/diameter[0] = %.3g (<= 0.01), %.2f s (< 60)",
               worst, ratio, run_time));
  }

  // acceptance scenarios: 4 strategies x 3 seeds on the reproduction setup
  std::vector<ScenarioSummary> scenarios;
  const auto t_sc = Clock::now();
  for (auto kind : {rdo::AdversaryKind::evasive_uniform, rdo::AdversaryKind::constant_point,
                    rdo::AdversaryKind::large_noise, rdo::AdversaryKind::coordinate_spike}) {
    for (rdo::Seed seed : {2024ULL, 7ULL, 99ULL}) {
      auto cfg = reproduction_config();
      cfg.adversary.kind = kind;
      cfg.adversary.target = {50.0, -50.0, 50.0};
      cfg.master_seed = seed;
      cfg.output = {};
      const auto o = rdo::run_scenario(cfg);
      scenarios.push_back(summarise(rdo::to_string(kind) + "/seed" + std::to_string(seed), o));
    }
  }
  const double sc_time = seconds_since(t_sc);

  {
    std::size_t total = 0, runs = 0;
    bool modes = true;
    for (const auto& s : scenarios) {
      total += s.prop1;
      modes = modes && s.common;
      ++runs;
    }
    report(2, total == 0 && modes,
           fmt("%zu violations across %zu common-mode runs (tolerance 1e-12)", total, runs));
  }
  {
    bool ok = scenarios.size() >= 9;
    double min_margin = std::numeric_limits<double>::infinity();
    std::string bad;
    for (const auto& s : scenarios) {
      ok = ok && s.theorem2;
      min_margin = std::min(min_margin, s.t2_margin);
      if (!s.theorem2) bad += " " + s.label;
    }
    report(3, ok,
           fmt("tail containment in %zu runs, smallest margin %.4g (%.1f s)%s", scenarios.size(), min_margin, sc_time,
               bad.empty() ? "" : (", failing:" + bad).c_str()));
  }
  {
    bool ok = true;
    double min_margin = std::numeric_limits<double>::infinity();
    for (const auto& s : scenarios) {
      ok = ok && s.in_ball;
      min_margin = std::min(min_margin, s.ball_margin);
    }
    report(4, ok, fmt("x* within R* of the auxiliary point in %zu runs, smallest margin %.4g", scenarios.size(),
                      min_margin));
  }

  // 5. generator vs brute-force checker
  {
    const auto t0 = Clock::now();
    std::size_t graphs = 0, mismatches = 0;
    for (std::size_t r = 1; r <= 3; ++r)
      for (std::size_t n = 2 * r - 1; n <= 12; ++n)
        for (rdo::Seed seed = 0; seed < 10; ++seed) {
          const auto g = rdo::grow_robust_graph(n, r, seed);
          ++graphs;
          if (!rdo::is_r_robust(g, r)) ++mismatches;
        }
    const double t = seconds_since(t0);
    report(5, mismatches == 0 && t < 30.0,
           fmt("%zu generated graphs, %zu not r-robust, %.2f s (< 30)", graphs, mismatches, t));
  }

  // 6. rootedness after in-edge removal
  {
    rdo::DirectedGraph g;
    bool certified = false;
    for (rdo::Seed seed = 0; seed < 10 && !certified; ++seed) {
      g = rdo::grow_robust_graph(12, 4, seed);
      certified = rdo::is_r_robust(g, 4) && oracle::robust_by_enumeration(g, 4);
    }
    std::size_t rooted = 0;
    for (rdo::Seed seed = 0; seed < 100; ++seed)
      if (rdo::is_rooted(rdo::remove_random_in_edges(g, 3, seed))) ++rooted;
    report(6, certified && rooted == 100,
           fmt("12-node graph certified 4-robust: %s, %zu/100 reduced graphs rooted", certified ? "yes" : "no",
               rooted));
  }

  // 7. angle bound sampling
  {
    rdo::Engine eng = rdo::make_engine(77);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::size_t samples = 0, violations = 0;
    double worst_excess = -std::numeric_limits<double>::infinity();
    for (int t = 0; t < 10; ++t) {
      const auto f = rdo::random_quadratic(3, eng);
      for (double eps : {0.1, 1.0, 10.0}) {
        const double delta = f.sublevel_radius(eps);
        const double theta = rdo::angle_bound(f, eps);
        std::size_t outside = 0;
        while (outside < 1000) {
          Vector u(3);
          for (Eigen::Index p = 0; p < 3; ++p) u(p) = normal(eng);
          const Vector x = f.minimizer() + 10.0 * delta * unit(eng) * u.normalized();
          if (f.value(x) <= f.min_value() + eps) continue;
          ++outside;
          const double angle = rdo::angle_between(-f.subgradient(x), f.minimizer() - x);
          worst_excess = std::max(worst_excess, angle - theta);
          if (angle > theta + 1e-9) ++violations;
        }
        samples += outside;
      }
    }
    report(7, violations == 0,
           fmt("%zu violations in %zu samples, largest angle - theta = %.4g", violations, samples, worst_excess));
  }

  {
    std::size_t total = 0;
    for (const auto& s : scenarios) total += s.descent;
    report(8, total == 0 && base.verdicts.descent_violations == 0,
           fmt("%zu descent violations across %zu trajectories (tolerance 1e-9)", total + base.verdicts.descent_violations,
               scenarios.size() + 1));
  }

  // 9. determinism
  {
    const auto root = fs::temp_directory_path() / "rdo_acceptance";
    fs::remove_all(root);
    fs::create_directories(root);
    std::vector<std::vector<std::string>> contents;
    for (int run = 0; run < 2; ++run) {
      auto cfg = reproduction_config();
      cfg.output = {(root / "t.csv").string(), (root / "s.json").string(), (root / "c.csv").string(),
                    (root / "f.json").string()};
      const auto o = rdo::run_scenario(cfg);
      std::vector<std::string> files;
      for (const auto& p : rdo::write_outputs(o)) files.push_back(slurp(p));
      contents.push_back(std::move(files));
    }
    const bool same = contents[0].size() == 4 && contents[0] == contents[1];
    std::size_t bytes = 0;
    for (const auto& s : contents[0]) bytes += s.size();
    report(9, same, fmt("two runs wrote %zu files, %zu bytes, %s", contents[0].size(), bytes,
                        same ? "byte-identical" : "DIFFERENT"));
    fs::remove_all(root);
  }

  // 10. single agent vs centralized descent
  {
    rdo::ScenarioConfig cfg;
    cfg.n = 1;
    cfg.d = 3;
    cfg.f = 0;
    cfg.saturation_bound = 5.0;
    cfg.iterations = 100;
    cfg.master_seed = 4;
    cfg.initial_states = std::vector<std::vector<double>>{{8.0, -6.0, 3.0}};
    const auto ps = rdo::prepare(cfg);
    const auto sim = rdo::simulate(ps.scenario);
    const auto ref = centralized_descent(ps.scenario.functions[0], {8.0, -6.0, 3.0}, 100);
    double worst = 0.0;
    bool shape = sim.trajectory.x.size() == 101;
    for (std::size_t k = 0; shape && k <= 100; ++k)
      for (Eigen::Index p = 0; p < 3; ++p)
        worst = std::max(worst, std::abs(sim.trajectory.x[k][0](p) - ref[k][static_cast<std::size_t>(p)]));
    bool saturated = false;
    for (std::size_t k = 0; shape && k < 100; ++k)
      saturated = saturated || ps.scenario.functions[0].raw_gradient(sim.trajectory.z[k][0]).norm() > 5.0;
    report(10, shape && worst <= 1e-12,
           fmt("max per-iterate deviation over 100 steps = %.3g (<= 1e-12), clipping %s", worst,
               saturated ? "exercised" : "not exercised"));
  }

  std::printf("%d of 10 criteria failed, total %.1f s\n", failures, seconds_since(t_all));
  return failures == 0 ? 0 : 1;
}
