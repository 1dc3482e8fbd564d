#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "glmstab/dense.hpp"

namespace glmstab {

/// Two-dimensional system x' = A(t) x with A = Q B Q^T + Q' Q^T, where
/// B(t) = [[a1 cos t + b1, beta], [0, a2 cos t + b2]] and Q(t) rotates by
/// omega(t) = rate * t. When resonant_h is set the rate is 2 pi / resonant_h.
struct RotatingCosineParams {
  double a1 = 1.2;
  double a2 = 1.2;
  double b1 = -0.14;
  double b2 = -0.15;
  double beta = 10.0;
  double omega_rate = 1.0;
  std::optional<double> resonant_h;

  double rotation_rate() const;
  /// Human-readable warnings for parameter sets outside b2 < b1 < 0, a_i > 0.
  std::vector<std::string> warnings() const;
};

/// lambda(t) = amp * cos(freq * t) + offset.
struct ScalarCosineParams {
  double amp = 0.0;
  double offset = 0.0;
  double freq = 0.0;
};

/// x' = a x + tanh(t^2).
struct TanhForcedParams {
  double a = -1.0;
};

/// Exact flow map of a linear problem: the state at time t of the solution
/// passing through x_s at time s.
using FlowMap = std::function<Vec(std::span<const double> x_s, double s, double t)>;

struct LinearProblem {
  std::string name;
  std::size_t dim = 0;
  std::function<Mat(double)> coefficient;
  std::optional<std::vector<std::pair<double, double>>> sacker_sell;
  std::optional<FlowMap> flow;

  Mat A(double t) const { return coefficient(t); }
  bool has_oracle() const noexcept { return flow.has_value(); }
};

/// General right-hand side f(x, t) with Jacobian df/dx.
struct OdeSystem {
  std::size_t dim = 0;
  std::function<Vec(std::span<const double>, double)> f;
  std::function<Mat(std::span<const double>, double)> jac;
};

OdeSystem as_system(const LinearProblem& prob);

Mat rotation(double angle);
Mat rotating_cosine_A(const RotatingCosineParams& p, double t);
/// Upper-triangular B(t) of the rotating-cosine construction.
Mat rotating_cosine_B(const RotatingCosineParams& p, double t);

/// Exact solution through x_s at time s, evaluated at t. The upper-triangular
/// rotated system is solved in closed form for the second component and by
/// variation of constants with composite 8-point Gauss-Legendre quadrature
/// on `panels` panels for the first. Throws QuadratureUnderResolved when
/// doubling the panel count moves the result by more than 1e-10 relative.
Vec rotating_cosine_flow(const RotatingCosineParams& p, std::span<const double> x_s, double s, double t,
                         std::size_t panels);

/// Solution from x(0) = (1, 0) at time t.
Vec reference_solution(const RotatingCosineParams& p, double t, std::size_t quad_points);

/// Panel count used by the problem oracles for an interval of length span.
std::size_t default_panels(double span);

LinearProblem rotating_cosine_problem(const RotatingCosineParams& p);

double scalar_cosine_lambda(const ScalarCosineParams& p, double t);
/// Average of lambda over [nh, (n+1)h], in closed form.
double mean_xi(const ScalarCosineParams& p, long n, double h);
LinearProblem scalar_cosine_problem(const ScalarCosineParams& p);

/// Constant coefficient problem with a Taylor-series matrix-exponential flow.
LinearProblem constant_problem(const Mat& a);

double tanh_rhs(const TanhForcedParams& p, double x, double t);
OdeSystem tanh_forced_system(const TanhForcedParams& p);
/// Variation-of-constants reference for the tanh-forced equation.
double tanh_forced_reference(const TanhForcedParams& p, double x_s, double s, double t, std::size_t panels);

/// Composite 8-point Gauss-Legendre rule for f on [a, b].
double gauss_legendre(const std::function<double(double)>& f, double a, double b, std::size_t panels);

/// Sampled boundedness check of A on [t0, t1]; returns a warning when the
/// max-norm exceeds bound or is not finite.
std::optional<std::string> check_bounded(const LinearProblem& prob, double t0, double t1, std::size_t samples,
                                         double bound = 1e8);

/// Problem block of a run configuration.
struct ProblemConfig {
  std::string type = "rotating_cosine";  // or "constant"
  RotatingCosineParams rotating;
  Mat constant;
  double t0 = 0.0;
  Vec x0{1.0, 0.0};

  LinearProblem make() const;
};

/// JSON object text with keys a1, a2, b1, b2, beta, omega_rate, resonant_h,
/// t0, x0 (plus type and A for constant problems). Unknown keys are rejected.
ProblemConfig problem_config_from_json(const std::string& text);
std::string to_json(const ProblemConfig& cfg);

}  // namespace glmstab
