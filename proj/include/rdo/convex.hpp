#pragma once

// Local objectives: strongly convex quadratics with magnitude-saturated gradients.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <concepts>
#include <numbers>
#include <random>
#include <string>

#include "rdo/errors.hpp"
#include "rdo/rng.hpp"

namespace rdo {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Requirements on a local cost used by the dynamics and the radius analysis.
/// `subgradient` must be bounded in norm by `saturation_bound()` and `sublevel_radius(eps)`
/// must bound the distance from the minimizer to every point of the eps-sublevel set.
template <typename F>
concept LocalObjective = requires(const F& f, const Vector& x, double eps) {
  { f.dim() } -> std::convertible_to<std::size_t>;
  { f.value(x) } -> std::convertible_to<double>;
  { f.subgradient(x) } -> std::convertible_to<Vector>;
  { f.minimizer() } -> std::convertible_to<Vector>;
  { f.sublevel_radius(eps) } -> std::convertible_to<double>;
  { f.saturation_bound() } -> std::convertible_to<double>;
};

/// f(x) = 1/2 x'Qx + b'x with Q symmetric positive definite. The subgradient is the raw
/// gradient Qx + b rescaled to norm L whenever it is longer than L; direction is kept.
class QuadraticFunction {
 public:
  static constexpr double kSymmetryTol = 1e-12;

  QuadraticFunction(Matrix q, Vector b, double saturation_bound)
      : q_(std::move(q)), b_(std::move(b)), l_(saturation_bound) {
    if (q_.rows() != q_.cols() || q_.rows() == 0)
      throw InvalidFunction("Q must be a nonempty square matrix");
    if (b_.size() != q_.rows()) throw InvalidFunction("b dimension does not match Q");
    if (!(l_ > 0.0) || !std::isfinite(l_)) throw InvalidFunction("saturation bound L must be positive");
    if (!q_.allFinite() || !b_.allFinite()) throw InvalidFunction("Q and b must be finite");
    const double scale = std::max(1.0, q_.cwiseAbs().maxCoeff());
    if ((q_ - q_.transpose()).cwiseAbs().maxCoeff() > kSymmetryTol * scale)
      throw InvalidFunction("Q is not symmetric");
    Eigen::SelfAdjointEigenSolver<Matrix> eig(q_, Eigen::EigenvaluesOnly);
    lambda_min_ = eig.eigenvalues().minCoeff();
    lambda_max_ = eig.eigenvalues().maxCoeff();
    if (!(lambda_min_ > 0.0)) throw InvalidFunction("Q is not positive definite");
    x_star_ = q_.ldlt().solve(-b_);
  }

  std::size_t dim() const noexcept { return static_cast<std::size_t>(b_.size()); }
  const Matrix& q() const noexcept { return q_; }
  const Vector& b() const noexcept { return b_; }
  double saturation_bound() const noexcept { return l_; }
  double lambda_min() const noexcept { return lambda_min_; }
  double lambda_max() const noexcept { return lambda_max_; }

  const Vector& minimizer() const noexcept { return x_star_; }

  double value(const Vector& x) const {
    check_dim(x);
    return 0.5 * x.dot(q_ * x) + b_.dot(x);
  }

  double min_value() const { return value(x_star_); }

  Vector raw_gradient(const Vector& x) const {
    check_dim(x);
    return q_ * x + b_;
  }

  Vector subgradient(const Vector& x) const {
    Vector g = raw_gradient(x);
    const double n = g.norm();
    if (n > l_) g *= l_ / n;
    return g;
  }

  /// Tight radius of the ball about x* containing {x : f(x) <= f(x*) + eps}:
  /// f - f* = 1/2 (x-x*)'Q(x-x*) is stretched furthest along the lambda_min eigenvector.
  double sublevel_radius(double eps) const {
    if (!(eps > 0.0)) throw DomainError("sublevel_radius: eps must be positive");
    return std::sqrt(2.0 * eps / lambda_min_);
  }

  friend bool operator==(const QuadraticFunction& a, const QuadraticFunction& b) {
    return a.q_ == b.q_ && a.b_ == b.b_ && a.l_ == b.l_;
  }

 private:
  void check_dim(const Vector& x) const {
    if (x.size() != b_.size())
      throw InvalidArgument("dimension mismatch: got " + std::to_string(x.size()) + ", expected " +
                            std::to_string(b_.size()));
  }

  Matrix q_;
  Vector b_;
  double l_;
  double lambda_min_ = 0.0;
  double lambda_max_ = 0.0;
  Vector x_star_;
};

static_assert(LocalObjective<QuadraticFunction>);

template <LocalObjective F>
Vector minimizer(const F& f) {
  return f.minimizer();
}

template <LocalObjective F>
double sublevel_radius(const F& f, double eps) {
  return f.sublevel_radius(eps);
}

/// Upper bound on the angle between -g(x) and x* - x for every x outside the eps-sublevel set.
template <LocalObjective F>
double angle_bound(const F& f, double eps) {
  const double ratio = eps / (f.saturation_bound() * f.sublevel_radius(eps));
  return std::acos(std::clamp(ratio, 0.0, 1.0));
}

struct FunctionGeometry {
  Vector minimizer;
  double epsilon = 0.0;
  double delta = 0.0;
  double theta = 0.0;
  double kappa = 0.0;
};

template <LocalObjective F>
FunctionGeometry geometry(const F& f, double eps) {
  FunctionGeometry g;
  g.minimizer = f.minimizer();
  g.epsilon = eps;
  g.delta = f.sublevel_radius(eps);
  g.theta = angle_bound(f, eps);
  g.kappa = eps / g.delta;
  return g;
}

struct RandomQuadraticParams {
  double ridge = 0.1;        // mu in Q = A'A + mu I
  double b_half_width = 5.0;  // b ~ U[-w, w]^d
  double saturation_bound = 100.0;
};

/// Q = A'A + mu I with A_ij ~ N(0,1), b_i ~ U[-w, w].
inline QuadraticFunction random_quadratic(std::size_t d, Engine& eng, const RandomQuadraticParams& p = {}) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unif(-p.b_half_width, p.b_half_width);
  const auto n = static_cast<Eigen::Index>(d);
  Matrix a(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) a(i, j) = normal(eng);
  Vector b(n);
  for (Eigen::Index i = 0; i < n; ++i) b(i) = unif(eng);
  Matrix q = a.transpose() * a + p.ridge * Matrix::Identity(n, n);
  q = 0.5 * (q + q.transpose());
  return QuadraticFunction(std::move(q), std::move(b), p.saturation_bound);
}

/// Angle in [0, pi] between two vectors; 0 if either is zero.
inline double angle_between(const Vector& u, const Vector& v) {
  const double nu = u.norm();
  const double nv = v.norm();
  if (nu == 0.0 || nv == 0.0) return 0.0;
  return std::acos(std::clamp(u.dot(v) / (nu * nv), -1.0, 1.0));
}

}  // namespace rdo
