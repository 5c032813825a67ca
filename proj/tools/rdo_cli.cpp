// rdo: command-line front end for scenario runs, graph tools, and trajectory checks.

#include <atomic>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "rdo/harness.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kInvalid = 1;
constexpr int kVerifyFailed = 2;

void print_violations(const rdo::ConfigError& e) {
  std::cerr << "invalid configuration:\n";
  for (const auto& v : e.violations()) std::cerr << "  - " << v << '\n';
}

rdo::LoadedConfig load_or_throw(const std::string& path) { return rdo::load_config(path); }

std::string with_seed_suffix(const std::string& path, rdo::Seed seed) {
  if (path.empty()) return path;
  const auto dot = path.find_last_of('.');
  const auto slash = path.find_last_of('/');
  const std::string tag = ".seed" + std::to_string(seed);
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) return path + tag;
  return path.substr(0, dot) + tag + path.substr(dot);
}

void print_brief(const rdo::ScenarioOutcome& o, std::ostream& os) {
  const auto& s = o.summary;
  os << "master_seed=" << o.prepared.config.master_seed << " f*=" << rdo::format_double(o.f_star)
     << " final_gap=" << rdo::format_double(s["final"]["gap"].get<double>())
     << " R*=" << rdo::format_double(o.radius.r_star)
     << " verdicts=" << (o.verdicts.all_passed() ? "pass" : "FAIL") << '\n';
  for (const auto& w : s["warnings"]) os << "warning: " << w.get<std::string>() << '\n';
}

int cmd_simulate(const std::string& config_path, const std::vector<rdo::Seed>& sweep, unsigned jobs) {
  auto loaded = load_or_throw(config_path);
  if (sweep.empty()) {
    auto outcome = rdo::run_scenario(loaded.config, loaded.base_dir);
    for (const auto& p : rdo::write_outputs(outcome)) std::cout << "wrote " << p << '\n';
    print_brief(outcome, std::cout);
    return kOk;
  }

  // Validate once up front so a bad config fails before any worker starts.
  rdo::prepare(loaded.config, loaded.base_dir);
  std::vector<std::string> reports(sweep.size());
  std::vector<std::string> errors(sweep.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t t = next++; t < sweep.size(); t = next++) {
      try {
        rdo::ScenarioConfig cfg = loaded.config;
        cfg.master_seed = sweep[t];
        cfg.graph.seed.reset();
        cfg.function_seed.reset();
        cfg.adversary_seed.reset();
        cfg.consensus_seed.reset();
        auto& out = cfg.output;
        for (std::string* p : {&out.trajectory, &out.summary, &out.consensus_trace, &out.functions})
          *p = with_seed_suffix(*p, sweep[t]);
        auto outcome = rdo::run_scenario(cfg, loaded.base_dir);
        rdo::write_outputs(outcome);
        std::ostringstream os;
        print_brief(outcome, os);
        reports[t] = os.str();
      } catch (const std::exception& e) {
        errors[t] = e.what();
      }
    }
  };
  std::vector<std::thread> pool;
  const unsigned n = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(sweep.size())));
  for (unsigned t = 0; t < n; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();

  int rc = kOk;
  for (std::size_t t = 0; t < sweep.size(); ++t) {
    if (!errors[t].empty()) {
      std::cerr << "seed " << sweep[t] << ": " << errors[t] << '\n';
      rc = kInvalid;
    } else {
      std::cout << reports[t];
    }
  }
  return rc;
}

int cmd_gen_graph(std::size_t n, std::size_t r, rdo::Seed seed, const std::string& out) {
  const auto g = rdo::grow_robust_graph(n, r, seed);
  if (out.empty() || out == "-") {
    rdo::write_graph(std::cout, g);
  } else {
    std::ofstream f(out);
    if (!f) throw rdo::DataError("cannot write '" + out + "'");
    rdo::write_graph(f, g);
  }
  return kOk;
}

int cmd_check_robust(const std::string& in, std::size_t r, std::size_t max_nodes) {
  std::ifstream f(in);
  if (!f) throw rdo::DataError("cannot open '" + in + "'");
  const auto g = rdo::read_graph(f);
  const bool ok = rdo::is_r_robust(g, r, {max_nodes});
  std::cout << (ok ? "robust" : "not robust") << " r=" << r << " nodes=" << g.node_count() << '\n';
  return ok ? kOk : kVerifyFailed;
}

int cmd_radius(const std::string& config_path) {
  auto loaded = load_or_throw(config_path);
  auto ps = rdo::prepare(loaded.config, loaded.base_dir);
  const auto aux = rdo::auxiliary_point_for(ps);
  const auto rep = rdo::radius_for(ps, aux.lead_estimate());
  auto j = rdo::radius_report_to_json(rep);
  j["aux_point"] = rdo::to_json(aux.lead_estimate());
  j["aux_converged"] = aux.converged;
  std::cout << j.dump(2) << '\n';
  return kOk;
}

int cmd_verify(const std::string& trajectory_path, const std::string& config_path) {
  std::ifstream tf(trajectory_path);
  if (!tf) throw rdo::DataError("cannot open '" + trajectory_path + "'");
  std::stringstream buf;
  buf << tf.rdbuf();
  const std::string csv = buf.str();
  std::istringstream parse(csv);
  const auto records = rdo::read_records_csv(parse);

  auto loaded = load_or_throw(config_path);
  auto outcome = rdo::run_scenario(loaded.config, loaded.base_dir);

  rdo::Json report;
  report["trajectory_matches_replay"] = csv == outcome.trajectory_csv;

  bool eta_ok = true;
  for (const auto& r : records)
    if (r.eta != rdo::step_size(outcome.prepared.scenario.schedule, r.k)) eta_ok = false;
  report["eta_matches_schedule"] = eta_ok;

  std::optional<rdo::Theorem2Report> t2;
  if (records.size() >= 101) {
    std::vector<double> dist;
    for (const auto& r : records) dist.push_back(r.max_dist_to_aux);
    t2 = rdo::verify_theorem2(dist, outcome.radius, outcome.prepared.config.analysis.tail_fraction,
                              outcome.sim.aux_slack() + 1e-6);
    report["theorem2"] = rdo::detail::theorem2_json(*t2);
  } else {
    report["theorem2"] = nullptr;
  }
  const auto& v = outcome.verdicts;
  report["prop1_violations"] = v.prop1_violations;
  report["descent_violations"] = v.descent_violations;
  report["minimizer_in_ball"] = {{"inside", v.minimizer_in_ball.inside}, {"margin", v.minimizer_in_ball.margin}};
  report["R_star"] = outcome.radius.r_star;

  const bool pass = report["trajectory_matches_replay"].get<bool>() && eta_ok && (!t2 || t2->holds) &&
                    v.prop1_violations == 0 && v.descent_violations == 0 && v.minimizer_in_ball.inside;
  report["pass"] = pass;
  std::cout << report.dump(2) << '\n';
  return pass ? kOk : kVerifyFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Resilient distributed optimization simulator"};
  app.require_subcommand(1);

  std::string config, trajectory, graph_in, graph_out;
  std::vector<rdo::Seed> sweep;
  unsigned jobs = std::max(1u, std::thread::hardware_concurrency());
  std::size_t n = 0, r = 0, max_nodes = 16;
  rdo::Seed seed = 0;

  auto* sim = app.add_subcommand("simulate", "Run a scenario and write its outputs");
  sim->add_option("--config", config, "Scenario JSON")->required();
  sim->add_option("--sweep", sweep, "Master seeds to run instead of the configured one")->delimiter(',');
  sim->add_option("--jobs", jobs, "Worker threads for --sweep");

  auto* gen = app.add_subcommand("gen-graph", "Generate an r-robust digraph");
  gen->add_option("--n", n, "Node count")->required();
  gen->add_option("--r", r, "Robustness")->required();
  gen->add_option("--seed", seed, "RNG seed")->required();
  gen->add_option("--out", graph_out, "Output file ('-' for stdout)");

  auto* chk = app.add_subcommand("check-robust", "Certify r-robustness by exhaustive search");
  chk->add_option("--in", graph_in, "Graph file")->required();
  chk->add_option("--r", r, "Robustness")->required();
  chk->add_option("--max-nodes", max_nodes, "Refuse graphs larger than this");

  auto* rad = app.add_subcommand("radius", "Print the convergence-radius report");
  rad->add_option("--config", config, "Scenario JSON")->required();

  auto* ver = app.add_subcommand("verify", "Check a trajectory CSV against its scenario");
  ver->add_option("--trajectory", trajectory, "Trajectory CSV")->required();
  ver->add_option("--config", config, "Scenario JSON")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::cerr << app.help();
    return kInvalid;
  }

  try {
    if (*sim) return cmd_simulate(config, sweep, jobs);
    if (*gen) return cmd_gen_graph(n, r, seed, graph_out);
    if (*chk) return cmd_check_robust(graph_in, r, max_nodes);
    if (*rad) return cmd_radius(config);
    if (*ver) return cmd_verify(trajectory, config);
  } catch (const rdo::ConfigError& e) {
    print_violations(e);
    return kInvalid;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInvalid;
  }
  return kInvalid;
}
