#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "glmstab/dense.hpp"
#include "glmstab/problems.hpp"

namespace glmstab {

/// k-step, r-stage general linear method
///   G       = (U x I) X_n     + h (C x I) F(G)
///   X_{n+1} = (V x I) X_n     + h (D x I) F(G)
/// with stage i evaluated at t_n + xi[i] h.
struct GlmTableau {
  std::string name;
  Mat U;  // r x k
  Mat V;  // k x k
  Mat C;  // r x r
  Mat D;  // k x r
  Vec xi;
  std::size_t k = 0;
  std::size_t r = 0;
  int order_p = 1;

  bool explicit_stages() const;
};

/// Exactly one eigenvalue within 1e-8 of 1, all others of modulus <= 1 - 1e-6.
bool is_strictly_stable(const Mat& v);
/// Throws NotStrictlyStable (or DimensionMismatch on malformed tableaus).
void validate(const GlmTableau& tab);

GlmTableau bdf2_tableau();
GlmTableau ab2_tableau();
GlmTableau backward_euler_tableau();
/// Two-step midpoint rule; V has eigenvalues {1, -1}, so it is rejected.
GlmTableau leapfrog_tableau();

/// "bdf2", "ab2" or "be"; throws Config for other names.
GlmTableau tableau_by_name(const std::string& name);
std::vector<std::string> tableau_names();

struct Trajectory {
  double h = 0.0;
  double t0 = 0.0;
  std::size_t d = 0;
  std::size_t k = 0;
  std::vector<Vec> X;
  std::string start_proc;
  std::string problem;
  bool diverged = false;
  double divergence_factor = 1e12;

  Trajectory() = default;
  Trajectory(double h, double t0, std::size_t d, Vec x0_super, std::string start_proc, std::string problem);

  std::size_t size() const noexcept { return X.size(); }
  double time(std::size_t n) const noexcept { return t0 + static_cast<double>(n) * h; }
  /// j-th d-block of X_n, i.e. the approximation to x(t_{n+j}) for multistep methods.
  Vec block(std::size_t n, std::size_t j) const;
};

/// Newton settings for implicit stages.
struct NewtonConfig {
  enum class Predictor { PreviousStage, ExplicitEuler };
  double tol = 1e-12;
  int max_iters = 25;
  Predictor predictor = Predictor::ExplicitEuler;
};

/// One-step supervector map Phi(n; h) for a linear problem.
Mat linear_transition(const GlmTableau& tab, const LinearProblem& prob, std::size_t n, double h, double t0);

/// Appends X_{n+1} = Phi(n; h) X_n. Returns false without stepping once the
/// trajectory is marked diverged. Divergence is flagged (and the offending
/// step kept if finite) when ||X_{n+1}|| exceeds divergence_factor ||X_0||.
bool step_linear(Trajectory& traj, const GlmTableau& tab, const LinearProblem& prob);
/// Takes up to `steps` linear steps; returns the number actually taken.
std::size_t advance_linear(Trajectory& traj, const GlmTableau& tab, const LinearProblem& prob, std::size_t steps);

bool step_nonlinear(Trajectory& traj, const GlmTableau& tab, const OdeSystem& sys, const NewtonConfig& cfg = {});
std::size_t advance_nonlinear(Trajectory& traj, const GlmTableau& tab, const OdeSystem& sys, std::size_t steps,
                              const NewtonConfig& cfg = {});

Vec rk4_step(const OdeSystem& sys, std::span<const double> x, double t, double h);

/// X_0 = (x0, RK4 x0, ..., RK4^{k-1} x0) stacked.
Vec start_rk4(const OdeSystem& sys, std::span<const double> x0, double t0, double h, std::size_t k);
/// X_0 built from the exact flow.
Vec start_exact(const FlowMap& flow, std::span<const double> x0, double t0, double h, std::size_t k);

/// Supervector for step n whose blocks are ref(t_n), ..., ref(t_{n+k-1}).
using ReferenceFn = std::function<Vec(double)>;

/// One-step defect: builds X_n from the reference values at t_n..t_{n+k-1},
/// takes one step and returns ||last block - ref(t_{n+k})||_2.
double lte_defect(const GlmTableau& tab, const LinearProblem& prob, const ReferenceFn& ref, std::size_t n, double h,
                  double t0);

/// Defect along the exact solution of the IVP x(t0) = x0.
double lte_probe(const GlmTableau& tab, const LinearProblem& prob, std::span<const double> x0, std::size_t n,
                 double h, double t0);

/// Defect along the exact solution through the last block of X_n of a
/// computed trajectory, i.e. the error committed by step n alone.
double lte_probe_local(const GlmTableau& tab, const LinearProblem& prob, const Trajectory& traj, std::size_t n);

struct TauSeries {
  Vec tau;                            // tau_n = lte_{n+1} / lte_n, skipping zero denominators
  std::vector<std::size_t> index;     // n for each entry of tau
  std::vector<std::size_t> skipped;   // n with lte_n == 0
  double tau_max = 0.0;
};

/// Ratio series of consecutive LTE values. Throws DivideByZero when every
/// ratio has a zero denominator.
TauSeries tau_series(std::span<const double> lte);

/// Amplification matrix V + z D (I - z C)^{-1} U of the scalar test equation.
Mat amplification(const GlmTableau& tab, double z);

/// Smallest z > 0 at which the method is stable on the positive real axis
/// (spectral radius of the amplification matrix <= 1), found by a geometric
/// scan followed by bisection. Returns +infinity when no stable point exists
/// below z_max.
double origin_gap(const GlmTableau& tab, double z_max = 1e4);

/// CSV with columns n, t, X_0 ... X_{dk-1}.
void write_trajectory_csv(std::ostream& os, const Trajectory& traj);

}  // namespace glmstab
