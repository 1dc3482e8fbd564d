#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "glmstab/dense.hpp"
#include "glmstab/problems.hpp"

namespace glmstab {

/// Discrete QR iteration state: current orthonormal frame and the per-step
/// log diagonals of R. log_r[j][i] is the growth of mode i over [t_j, t_{j+1}].
struct QrTrail {
  Mat frame;
  std::vector<Vec> log_r;
  double h = 0.0;
  double t0 = 0.0;
  bool diverged = false;
  double last_log_norm = 0.0;  // vector mode: ln ||w_n||

  std::size_t steps() const noexcept { return log_r.size(); }
  std::size_t modes() const noexcept { return frame.cols(); }

  /// First `modes` columns of the identity of size dim.
  static QrTrail identity(std::size_t dim, std::size_t modes, double h, double t0);
  /// Orthonormalized frame; throws RankDeficient if frame is not full rank.
  static QrTrail with_frame(const Mat& frame, double h, double t0);
  /// Frame from a seeded Gaussian matrix.
  static QrTrail random(std::size_t dim, std::size_t modes, std::uint64_t seed, double h, double t0);
  /// Single-column trail started at w0.
  static QrTrail from_vector(std::span<const double> w0, double h, double t0);
};

/// phi * Q_n = Q_{n+1} R; appends ln R_ii and replaces the frame.
void qr_advance(QrTrail& trail, const Mat& phi);

/// Vector specialization: appends ln(||w_next|| / ||w_n||).
void qr_advance_vector(QrTrail& trail, std::span<const double> w_next);

/// Sum index range for the running averages.
enum class SumStart { Origin, BurnIn };
/// Time denominator: t_n - t_0 or t_n - t_{N0}.
enum class Denominator { FromOrigin, FromBurnIn };

struct MuOptions {
  SumStart sum_start = SumStart::Origin;
  Denominator denominator = Denominator::FromOrigin;
};

std::string to_string(Denominator d);
std::string to_string(SumStart s);

struct LyapunovEstimate {
  Vec mu;                         // per mode
  std::vector<std::size_t> argmax;  // n attaining the max, per mode
  std::size_t n0 = 0;
  std::size_t count = 0;
  MuOptions options;
};

/// Running maximum over n in [N0, N0 + N] of
///   (sum of log_r[j] for j from the start index up to n - 1) / denominator(n),
/// skipping n with a zero denominator. The start index is 0 (Origin) or N0
/// (BurnIn); the denominator is t_n - t_0 or t_n - t_{N0}.
LyapunovEstimate mu_appr(const QrTrail& trail, std::size_t n0, std::size_t count, MuOptions opts = {});

/// Plain average of log_r over steps [N0, N0 + N) divided by N h, per mode.
Vec window_average(const QrTrail& trail, std::size_t n0, std::size_t count);

/// Running time-averages S_n / (t_n - t_0) for n = 1..steps, per mode.
std::vector<Vec> running_average(const QrTrail& trail);

struct SackerSellEstimate {
  Vec alpha;
  Vec beta;
  double window = 0.0;  // H in time units (rounded to whole steps)
  std::size_t window_steps = 0;
};

/// Min/max of Steklov averages (1/H) sum over windows of H/h steps, taken
/// over all window starts at or after step `first`.
SackerSellEstimate sacker_sell_window(const QrTrail& trail, double H, std::size_t first = 0);

struct LyapunovEndpoints {
  Vec eta;
  Vec mu;
};

/// Min/max of S_n / (t_n - t_0) over n in (burn_in, steps].
LyapunovEndpoints lyapunov_endpoints(const QrTrail& trail, std::size_t burn_in);

enum class SeparationClass { Separated, BoundedAverage, Inconclusive };
std::string to_string(SeparationClass c);

struct PairSeparation {
  std::size_t i = 0;
  std::size_t j = 0;
  SeparationClass kind = SeparationClass::Inconclusive;
  double a = 0.0;    // fitted gap rate (separated)
  double b = 0.0;    // fitted offset (separated)
  double eps = 0.0;  // fitted drift (bounded-average)
  double M = 0.0;    // fitted bound (bounded-average)
  double min_window_average = 0.0;
};

struct IntegralSeparationOptions {
  double min_gap = 1e-3;   // a0
  double window = 10.0;    // T0, shortest window in time units
  double eps_tol = 1e-3;   // largest drift still called bounded-average
};

/// increments[n] approximates the integral of a diagonal coefficient over
/// [t_n, t_{n+1}] (per-step log R values qualify). Windows of length >= T0
/// are scanned on a dyadic family of lengths with every start position.
PairSeparation classify_pair(std::span<const double> inc_i, std::span<const double> inc_j, double h,
                             const IntegralSeparationOptions& opts);

struct IntegralSeparationReport {
  std::vector<PairSeparation> pairs;
  double horizon = 0.0;
  bool finite_window = true;
};

/// Every pair i < j of the given per-mode increment series.
IntegralSeparationReport integral_separation_check(const std::vector<Vec>& modes, double h,
                                                   const IntegralSeparationOptions& opts);

/// Per-mode increment series of a trail, transposed from log_r.
std::vector<Vec> mode_series(const QrTrail& trail);

struct ContinuousQrSeries {
  Vec times;
  std::vector<Vec> diag;  // diag[i][m]: B_ii at times[m]
  Mat final_frame;
};

/// RK4 integration of Q' = Q S(Q, A) with re-orthonormalization after each
/// step; B_ii = (Q^T A Q)_ii since S is skew. Throws OrthogonalityLost when
/// the drift before re-orthonormalization exceeds 1e-6.
ContinuousQrSeries continuous_qr_oracle(const LinearProblem& prob, double t_begin, double t_end, double h_fine,
                                        const Mat& q0);

/// Composite Simpson integrals of each diagonal series over consecutive
/// coarse steps of `stride` fine steps (stride must be even).
std::vector<Vec> integrate_series(const ContinuousQrSeries& s, std::size_t stride);

struct SpectrumReportRow {
  std::size_t mode = 0;
  double eta = 0.0;
  double mu = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
};

/// JSON text {mode, eta, mu, alpha, beta, window, h, denominator_mode} per mode.
std::string estimates_to_json(const std::vector<SpectrumReportRow>& rows, double window, double h,
                              Denominator denominator);

}  // namespace glmstab
