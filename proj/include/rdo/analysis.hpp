#pragma once

// Convergence-region radius and trajectory checks for the filtered dynamics.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rdo/convex.hpp"
#include "rdo/dynamics.hpp"

namespace rdo {

/// `count` log-spaced points from lo to hi inclusive.
inline std::vector<double> log_grid(double lo, double hi, std::size_t count) {
  if (!(lo > 0.0) || !(hi >= lo) || count == 0) throw InvalidArgument("log_grid: need 0 < lo <= hi, count >= 1");
  std::vector<double> g(count);
  if (count == 1) {
    g[0] = lo;
    return g;
  }
  const double a = std::log(lo), b = std::log(hi);
  for (std::size_t t = 0; t < count; ++t)
    g[t] = std::exp(a + (b - a) * static_cast<double>(t) / static_cast<double>(count - 1));
  g.front() = lo;
  g.back() = hi;
  return g;
}

inline std::vector<double> default_eps_grid() { return log_grid(1e-4, 1e2, 200); }

struct RadiusReport {
  std::vector<double> r_tilde;   // ||x_i* - aux|| per function, in input order
  std::vector<double> eps_grid;
  std::vector<double> s_star;    // s*(0, eps) per grid point
  double r_star = 0.0;           // refined infimum, <= min(s_star)
  double argmin_eps = 0.0;
};

/// max_i max{ R_i sec(theta_i(eps)), R_i + delta_i(eps) }
template <LocalObjective Objective>
double s_star_at(const std::vector<Objective>& functions, std::span<const double> r_tilde, double eps) {
  double s = 0.0;
  for (std::size_t i = 0; i < functions.size(); ++i) {
    const double delta = functions[i].sublevel_radius(eps);
    const double cos_theta = std::cos(angle_bound(functions[i], eps));
    const double sec_term = r_tilde[i] == 0.0 ? 0.0 : r_tilde[i] / cos_theta;
    s = std::max({s, sec_term, r_tilde[i] + delta});
  }
  return s;
}

/// Grid scan of s*(0, eps) followed by golden-section refinement in log(eps) over the
/// bracket around the grid minimizer.
template <LocalObjective Objective>
RadiusReport convergence_radius(const std::vector<Objective>& functions, const Vector& aux,
                                std::vector<double> eps_grid = default_eps_grid()) {
  if (functions.empty()) throw InvalidArgument("convergence_radius: no functions");
  if (eps_grid.empty()) throw InvalidArgument("convergence_radius: empty eps grid");
  for (double e : eps_grid)
    if (!(e > 0.0)) throw InvalidArgument("convergence_radius: eps grid must be positive");
  std::sort(eps_grid.begin(), eps_grid.end());

  RadiusReport rep;
  for (const auto& f : functions) rep.r_tilde.push_back((minimizer(f) - aux).norm());
  rep.eps_grid = eps_grid;
  for (double e : eps_grid) rep.s_star.push_back(s_star_at(functions, rep.r_tilde, e));

  const auto best = static_cast<std::size_t>(
      std::min_element(rep.s_star.begin(), rep.s_star.end()) - rep.s_star.begin());
  rep.r_star = rep.s_star[best];
  rep.argmin_eps = eps_grid[best];
  if (eps_grid.size() < 2) return rep;

  auto obj = [&](double log_eps) { return s_star_at(functions, rep.r_tilde, std::exp(log_eps)); };
  double a = std::log(eps_grid[best == 0 ? 0 : best - 1]);
  double b = std::log(eps_grid[std::min(best + 1, eps_grid.size() - 1)]);
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a), d = a + inv_phi * (b - a);
  double fc = obj(c), fd = obj(d);
  for (int it = 0; it < 200 && (b - a) > 1e-10; ++it) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = obj(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = obj(d);
    }
  }
  const double mid = 0.5 * (a + b);
  const double fm = obj(mid);
  if (fm < rep.r_star) {
    rep.r_star = fm;
    rep.argmin_eps = std::exp(mid);
  }
  return rep;
}

/// Largest angle at x subtended by the ball B(center, R), for a point at distance `dist`.
inline double max_angle(double radius, double dist) {
  if (!(radius >= 0.0)) throw DomainError("max_angle: radius must be nonnegative");
  if (!(dist > radius)) throw DomainError("max_angle: point must lie outside the ball");
  return std::asin(radius / dist);
}

inline double delta_fn(double r_tilde, double theta, double p, double l) {
  if (!(p >= r_tilde)) throw DomainError("delta_fn: p must be >= R_tilde");
  if (!(l >= 0.0)) throw DomainError("delta_fn: l must be nonnegative");
  return 2.0 * l * (std::sqrt(p * p - r_tilde * r_tilde) * std::cos(theta) - r_tilde * std::sin(theta)) - l * l;
}

/// Upper bound on the squared post-step distance to the auxiliary point.
inline double gamma_fn(double r_tilde, double theta, double p, double l) {
  return p * p - delta_fn(r_tilde, theta, p, l);
}

struct DescentViolation {
  std::size_t k;
  NodeId node;
  double lhs;  // ||x_i[k+1] - aux||^2
  double rhs;  // Gamma_i(||z_i[k] - aux||, eta[k] ||g_i[k]||)
};

/// Whenever ||z_i[k] - aux|| > R_i + delta_i(eps), checks that the step lands within
/// sqrt(Gamma_i) of aux. `functions` is indexed by node id.
template <LocalObjective Objective>
std::vector<DescentViolation> verify_descent_inequality(const Trajectory& tr, const std::vector<Objective>& functions,
                                                        const Vector& aux, double eps, double tol = 1e-9) {
  const std::size_t steps = tr.steps();
  if (tr.x.size() != steps + 1 || tr.g_norm.size() != steps || tr.eta.size() != steps)
    throw DataError("trajectory is missing recorded z / subgradient norms / step sizes");
  std::vector<DescentViolation> out;
  const std::size_t m = tr.regular.size();
  std::vector<double> r_tilde(m), theta(m), delta(m);
  for (std::size_t r = 0; r < m; ++r) {
    const auto& f = functions.at(tr.regular[r]);
    r_tilde[r] = (minimizer(f) - aux).norm();
    theta[r] = angle_bound(f, eps);
    delta[r] = f.sublevel_radius(eps);
  }
  for (std::size_t k = 0; k < steps; ++k) {
    if (tr.z[k].size() != m || tr.g_norm[k].size() != m || tr.x[k + 1].size() != m)
      throw DataError("trajectory row " + std::to_string(k) + " has the wrong number of agents");
    for (std::size_t r = 0; r < m; ++r) {
      const double p = (tr.z[k][r] - aux).norm();
      if (!(p > r_tilde[r] + delta[r])) continue;
      const double l = tr.eta[k] * tr.g_norm[k][r];
      const double lhs = (tr.x[k + 1][r] - aux).squaredNorm();
      const double rhs = gamma_fn(r_tilde[r], theta[r], p, l);
      if (lhs > rhs + tol) out.push_back({k, tr.regular[r], lhs, rhs});
    }
  }
  return out;
}

struct Theorem2Report {
  bool holds = false;
  double bound = 0.0;  // R* + slack
  double max_tail_distance = 0.0;
  std::size_t tail_start = 0;
  std::optional<std::size_t> first_entry;  // first k with max distance <= bound
};

/// Tail-window version of limsup_k max_i ||x_i[k] - aux|| <= R*: every k in the last
/// `tail_fraction` of the run must satisfy the bound. `max_dist[k]` is over regular agents.
inline Theorem2Report verify_theorem2(std::span<const double> max_dist, const RadiusReport& rep,
                                      double tail_fraction = 0.25, double slack = 1e-6) {
  if (max_dist.size() < 101) throw InvalidArgument("verify_theorem2: need a trajectory with K >= 100");
  if (!(tail_fraction > 0.0 && tail_fraction <= 1.0)) throw InvalidArgument("verify_theorem2: tail_fraction in (0,1]");
  Theorem2Report out;
  out.bound = rep.r_star + slack;
  const std::size_t len = max_dist.size();
  const auto tail = static_cast<std::size_t>(std::ceil(tail_fraction * static_cast<double>(len)));
  out.tail_start = len - std::min(len, std::max<std::size_t>(tail, 1));
  out.holds = true;
  for (std::size_t k = 0; k < len; ++k) {
    if (!out.first_entry && max_dist[k] <= out.bound) out.first_entry = k;
    if (k >= out.tail_start) {
      out.max_tail_distance = std::max(out.max_tail_distance, max_dist[k]);
      if (!(max_dist[k] <= out.bound)) out.holds = false;
    }
  }
  return out;
}

inline std::vector<double> max_distances(const Trajectory& tr, const Vector& aux) {
  std::vector<double> out;
  out.reserve(tr.x.size());
  for (const auto& row : tr.x) {
    double m = 0.0;
    for (const auto& x : row) m = std::max(m, (x - aux).norm());
    out.push_back(m);
  }
  return out;
}

/// Exact minimizer of the average of the given quadratics.
inline Vector global_minimizer(const std::vector<QuadraticFunction>& functions) {
  if (functions.empty()) throw InvalidArgument("global_minimizer: no functions");
  Matrix q = Matrix::Zero(functions.front().q().rows(), functions.front().q().cols());
  Vector b = Vector::Zero(functions.front().b().size());
  for (const auto& f : functions) {
    q += f.q();
    b += f.b();
  }
  Eigen::LDLT<Matrix> ldlt(q);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive())
    throw std::logic_error("global_minimizer: sum of Q_i is not positive definite");
  return ldlt.solve(-b);
}

struct MinimizerInBall {
  bool inside = false;
  double margin = 0.0;  // R* - ||x* - aux||
  double distance = 0.0;
  Vector x_star;
};

inline MinimizerInBall verify_minimizer_in_ball(const std::vector<QuadraticFunction>& regular_functions,
                                                const Vector& aux, const RadiusReport& rep) {
  MinimizerInBall out;
  out.x_star = global_minimizer(regular_functions);
  out.distance = (out.x_star - aux).norm();
  out.margin = rep.r_star - out.distance;
  out.inside = out.distance <= rep.r_star;
  return out;
}

struct ProofConstants {
  double a_plus = std::numeric_limits<double>::quiet_NaN();
  double a_minus = std::numeric_limits<double>::quiet_NaN();
  double b = std::numeric_limits<double>::quiet_NaN();
  double kappa = 0.0;
  bool a_defined = false;   // s*^2 >= R^2 cos^2(theta)
  bool b_positive = false;  // holds iff s* > R sec(theta)
  bool a_signs_ok = false;  // a+ > 0 > a-
};

/// Step-size constants from the descent argument. Domain problems are flagged, not thrown.
inline ProofConstants proof_constants(double r_tilde, double theta, [[maybe_unused]] double delta, double kappa,
                                      double s_star) {
  ProofConstants c;
  c.kappa = kappa;
  const double st = std::sin(theta), ct = std::cos(theta);
  const double under_a = s_star * s_star - r_tilde * r_tilde * ct * ct;
  if (under_a >= 0.0) {
    const double root = std::sqrt(under_a);
    c.a_plus = -r_tilde * st + root;
    c.a_minus = -r_tilde * st - root;
    c.a_defined = true;
    c.a_signs_ok = c.a_plus > 0.0 && c.a_minus < 0.0;
  }
  const double under_b = s_star * s_star - r_tilde * r_tilde;
  if (under_b >= 0.0) {
    c.b = 2.0 * (std::sqrt(under_b) * ct - r_tilde * st);
    c.b_positive = c.b > 0.0;
  }
  return c;
}

struct StepThresholds {
  std::optional<std::size_t> k1;  // eta[k] <= xi / L
  std::optional<std::size_t> k2;  // eta[k] <= min_i min(a_i+, b_i) / L
  std::optional<std::size_t> k3;  // eta[k] <= min_i b_i / (2L)
};

struct ProofDiagnostics {
  double eps = 0.0;
  double xi = 0.0;
  double s_star_xi = 0.0;  // s*(xi, eps)
  std::vector<ProofConstants> constants;  // per regular function
  StepThresholds thresholds;
};

/// Evaluates the proof constants for every function at (eps, xi) and the first
/// iterations at which `schedule` satisfies each step-size requirement.
template <LocalObjective Objective>
ProofDiagnostics proof_diagnostics(const std::vector<Objective>& functions, const Vector& aux, double eps, double xi,
                                   const StepSchedule& schedule) {
  if (!(xi > 0.0)) throw InvalidArgument("proof_diagnostics: xi must be positive");
  ProofDiagnostics out;
  out.eps = eps;
  out.xi = xi;
  std::vector<double> r_tilde;
  double l_max = 0.0;
  for (const auto& f : functions) {
    r_tilde.push_back((minimizer(f) - aux).norm());
    l_max = std::max(l_max, f.saturation_bound());
  }
  out.s_star_xi = s_star_at(functions, r_tilde, eps) + xi;
  double min_ab = std::numeric_limits<double>::infinity();
  double min_b = std::numeric_limits<double>::infinity();
  bool ok = true;
  for (std::size_t i = 0; i < functions.size(); ++i) {
    const auto geo = geometry(functions[i], eps);
    auto c = proof_constants(r_tilde[i], geo.theta, geo.delta, geo.kappa, out.s_star_xi);
    ok = ok && c.a_signs_ok && c.b_positive;
    if (c.a_defined) min_ab = std::min(min_ab, c.a_plus);
    min_ab = std::min(min_ab, c.b);
    min_b = std::min(min_b, c.b);
    out.constants.push_back(c);
  }
  out.thresholds.k1 = first_step_below(schedule, xi / l_max);
  if (ok) {
    out.thresholds.k2 = first_step_below(schedule, min_ab / l_max);
    out.thresholds.k3 = first_step_below(schedule, min_b / (2.0 * l_max));
  }
  return out;
}

}  // namespace rdo
