#include "glmstab/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "glmstab/error.hpp"
#include "json.hpp"

namespace glmstab {

namespace {

bool finite(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double e) { return std::isfinite(e); });
}

// prefix[n][i] = sum of log_r[j][i] for j < n.
std::vector<Vec> prefix_sums(const QrTrail& trail) {
  const std::size_t p = trail.modes();
  std::vector<Vec> s(trail.steps() + 1, Vec(p, 0.0));
  for (std::size_t n = 0; n < trail.steps(); ++n)
    for (std::size_t i = 0; i < p; ++i) s[n + 1][i] = s[n][i] + trail.log_r[n][i];
  return s;
}

Vec prefix_1d(std::span<const double> inc_i, std::span<const double> inc_j) {
  Vec d(inc_i.size() + 1, 0.0);
  for (std::size_t n = 0; n < inc_i.size(); ++n) d[n + 1] = d[n] + (inc_i[n] - inc_j[n]);
  return d;
}

// Largest increase e[t] - e[s] over s <= t.
double max_rise(const Vec& e) {
  double lo = e.front(), best = 0.0;
  for (double v : e) {
    lo = std::min(lo, v);
    best = std::max(best, v - lo);
  }
  return best;
}

Mat qr_rhs(const LinearProblem& prob, const Mat& q, double t) {
  const Mat a = prob.A(t);
  const Mat aq = a * q;
  const Mat tmat = q.transpose() * aq;
  // B = T - S keeps the upper triangle of T; the strictly lower part of S equals that of T.
  Mat b = tmat;
  for (std::size_t i = 0; i < b.rows(); ++i)
    for (std::size_t j = 0; j < i; ++j) {
      b(j, i) += tmat(i, j);
      b(i, j) = 0.0;
    }
  return aq - q * b;
}

}  // namespace

QrTrail QrTrail::identity(std::size_t dim, std::size_t modes, double h, double t0) {
  if (modes == 0 || modes > dim) throw Error(ErrorKind::DimensionMismatch, "mode count must be in 1..dim");
  Mat f(dim, modes);
  for (std::size_t i = 0; i < modes; ++i) f(i, i) = 1.0;
  QrTrail t;
  t.frame = f;
  t.h = h;
  t.t0 = t0;
  return t;
}

QrTrail QrTrail::with_frame(const Mat& frame, double h, double t0) {
  QrTrail t;
  t.frame = qr_positive(frame).q;
  t.h = h;
  t.t0 = t0;
  return t;
}

QrTrail QrTrail::random(std::size_t dim, std::size_t modes, std::uint64_t seed, double h, double t0) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> normal;
  Mat f(dim, modes);
  for (double& e : f.data()) e = normal(gen);
  return with_frame(f, h, t0);
}

QrTrail QrTrail::from_vector(std::span<const double> w0, double h, double t0) {
  const double nrm = norm2(w0);
  if (nrm == 0.0 || !std::isfinite(nrm)) throw Error(ErrorKind::ZeroVector, "initial vector is zero");
  QrTrail t;
  t.frame = Mat::column(w0) * (1.0 / nrm);
  t.h = h;
  t.t0 = t0;
  t.last_log_norm = std::log(nrm);
  return t;
}

void qr_advance(QrTrail& trail, const Mat& phi) {
  if (trail.diverged) return;
  const Mat y = phi * trail.frame;
  if (!y.all_finite()) {
    trail.diverged = true;
    return;
  }
  QrFactors f = qr_positive(y);
  Vec lr(f.r.rows());
  for (std::size_t i = 0; i < lr.size(); ++i) lr[i] = std::log(f.r(i, i));
  trail.log_r.push_back(std::move(lr));
  trail.frame = std::move(f.q);
}

void qr_advance_vector(QrTrail& trail, std::span<const double> w_next) {
  if (trail.diverged) return;
  if (trail.frame.cols() != 1 || trail.frame.rows() != w_next.size())
    throw Error(ErrorKind::DimensionMismatch, "vector trail needs a single-column frame of matching size");
  if (!finite(w_next)) {
    trail.diverged = true;
    return;
  }
  const double nrm = norm2(w_next);
  if (nrm == 0.0) throw Error(ErrorKind::ZeroVector, "w_next is zero");
  const double ln = std::log(nrm);
  trail.log_r.push_back(Vec{ln - trail.last_log_norm});
  trail.last_log_norm = ln;
  trail.frame = Mat::column(w_next) * (1.0 / nrm);
}

std::string to_string(Denominator d) { return d == Denominator::FromOrigin ? "t0" : "N0"; }
std::string to_string(SumStart s) { return s == SumStart::Origin ? "origin" : "burn-in"; }

LyapunovEstimate mu_appr(const QrTrail& trail, std::size_t n0, std::size_t count, MuOptions opts) {
  if (n0 + count > trail.steps()) throw Error(ErrorKind::WindowOutOfRange, "trail shorter than N0 + N");
  const auto s = prefix_sums(trail);
  const std::size_t p = trail.modes();
  LyapunovEstimate est;
  est.n0 = n0;
  est.count = count;
  est.options = opts;
  est.mu.assign(p, -std::numeric_limits<double>::infinity());
  est.argmax.assign(p, 0);
  const std::size_t start = opts.sum_start == SumStart::Origin ? 0 : n0;
  const std::size_t den0 = opts.denominator == Denominator::FromOrigin ? 0 : n0;
  bool any = false;
  for (std::size_t n = n0; n <= n0 + count; ++n) {
    if (n <= den0) continue;
    const double den = static_cast<double>(n - den0) * trail.h;
    any = true;
    for (std::size_t i = 0; i < p; ++i) {
      const double v = (s[n][i] - s[start][i]) / den;
      if (v > est.mu[i]) {
        est.mu[i] = v;
        est.argmax[i] = n;
      }
    }
  }
  if (!any) throw Error(ErrorKind::WindowOutOfRange, "no step with a positive time denominator");
  return est;
}

Vec window_average(const QrTrail& trail, std::size_t n0, std::size_t count) {
  if (count == 0 || n0 + count > trail.steps()) throw Error(ErrorKind::WindowOutOfRange, "invalid averaging window");
  const std::size_t p = trail.modes();
  Vec avg(p, 0.0);
  for (std::size_t n = n0; n < n0 + count; ++n)
    for (std::size_t i = 0; i < p; ++i) avg[i] += trail.log_r[n][i];
  for (double& a : avg) a /= static_cast<double>(count) * trail.h;
  return avg;
}

std::vector<Vec> running_average(const QrTrail& trail) {
  const auto s = prefix_sums(trail);
  std::vector<Vec> out;
  out.reserve(trail.steps());
  for (std::size_t n = 1; n < s.size(); ++n) {
    Vec v = s[n];
    for (double& e : v) e /= static_cast<double>(n) * trail.h;
    out.push_back(std::move(v));
  }
  return out;
}

SackerSellEstimate sacker_sell_window(const QrTrail& trail, double H, std::size_t first) {
  const auto m = static_cast<std::size_t>(std::llround(H / trail.h));
  if (m < 2) throw Error(ErrorKind::WindowOutOfRange, "window shorter than two steps");
  if (first > trail.steps() || trail.steps() - first < 3 * m)
    throw Error(ErrorKind::WindowOutOfRange, "trail does not cover three windows");
  const auto s = prefix_sums(trail);
  const std::size_t p = trail.modes();
  SackerSellEstimate est;
  est.window_steps = m;
  est.window = static_cast<double>(m) * trail.h;
  est.alpha.assign(p, std::numeric_limits<double>::infinity());
  est.beta.assign(p, -std::numeric_limits<double>::infinity());
  for (std::size_t st = first; st + m <= trail.steps(); ++st)
    for (std::size_t i = 0; i < p; ++i) {
      const double avg = (s[st + m][i] - s[st][i]) / est.window;
      est.alpha[i] = std::min(est.alpha[i], avg);
      est.beta[i] = std::max(est.beta[i], avg);
    }
  return est;
}

LyapunovEndpoints lyapunov_endpoints(const QrTrail& trail, std::size_t burn_in) {
  if (burn_in >= trail.steps()) throw Error(ErrorKind::WindowOutOfRange, "burn-in covers the whole trail");
  const auto avg = running_average(trail);
  const std::size_t p = trail.modes();
  LyapunovEndpoints out{Vec(p, std::numeric_limits<double>::infinity()),
                        Vec(p, -std::numeric_limits<double>::infinity())};
  for (std::size_t n = burn_in + 1; n <= trail.steps(); ++n)
    for (std::size_t i = 0; i < p; ++i) {
      out.eta[i] = std::min(out.eta[i], avg[n - 1][i]);
      out.mu[i] = std::max(out.mu[i], avg[n - 1][i]);
    }
  return out;
}

std::string to_string(SeparationClass c) {
  switch (c) {
    case SeparationClass::Separated: return "separated";
    case SeparationClass::BoundedAverage: return "bounded-average";
    case SeparationClass::Inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

PairSeparation classify_pair(std::span<const double> inc_i, std::span<const double> inc_j, double h,
                             const IntegralSeparationOptions& opts) {
  if (inc_i.size() != inc_j.size()) throw Error(ErrorKind::DimensionMismatch, "series lengths differ");
  PairSeparation out;
  const std::size_t n = inc_i.size();
  const auto m0 = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(opts.window / h - 1e-9)));
  if (n < m0) return out;
  const Vec d = prefix_1d(inc_i, inc_j);

  std::vector<std::size_t> lengths;
  for (std::size_t len = m0; len <= n; len *= 2) lengths.push_back(len);
  if (lengths.back() != n) lengths.push_back(n);

  double min_avg = std::numeric_limits<double>::infinity();
  double long_drift = 0.0;
  for (std::size_t len : lengths) {
    const double span = static_cast<double>(len) * h;
    for (std::size_t s = 0; s + len <= n; ++s) {
      const double avg = (d[s + len] - d[s]) / span;
      min_avg = std::min(min_avg, avg);
      if (2 * len >= n) long_drift = std::max(long_drift, std::abs(avg));
    }
  }
  out.min_window_average = min_avg;

  if (min_avg >= opts.min_gap) {
    out.kind = SeparationClass::Separated;
    out.a = min_avg;
    double run_max = -std::numeric_limits<double>::infinity();
    double b = 0.0;
    for (std::size_t t = 0; t <= n; ++t) {
      const double e = d[t] - out.a * static_cast<double>(t) * h;
      run_max = std::max(run_max, e);
      b = std::min(b, e - run_max);
    }
    out.b = b;
    return out;
  }
  if (long_drift <= opts.eps_tol) {
    out.kind = SeparationClass::BoundedAverage;
    out.eps = long_drift;
    Vec up(n + 1), down(n + 1);
    for (std::size_t t = 0; t <= n; ++t) {
      const double drift = out.eps * static_cast<double>(t) * h;
      up[t] = d[t] - drift;
      down[t] = -d[t] - drift;
    }
    out.M = std::max(max_rise(up), max_rise(down));
  }
  return out;
}

IntegralSeparationReport integral_separation_check(const std::vector<Vec>& modes, double h,
                                                   const IntegralSeparationOptions& opts) {
  IntegralSeparationReport rep;
  if (!modes.empty()) rep.horizon = static_cast<double>(modes.front().size()) * h;
  for (std::size_t i = 0; i < modes.size(); ++i)
    for (std::size_t j = i + 1; j < modes.size(); ++j) {
      PairSeparation p = classify_pair(modes[i], modes[j], h, opts);
      p.i = i;
      p.j = j;
      rep.pairs.push_back(p);
    }
  return rep;
}

std::vector<Vec> mode_series(const QrTrail& trail) {
  std::vector<Vec> out(trail.modes(), Vec(trail.steps()));
  for (std::size_t n = 0; n < trail.steps(); ++n)
    for (std::size_t i = 0; i < trail.modes(); ++i) out[i][n] = trail.log_r[n][i];
  return out;
}

ContinuousQrSeries continuous_qr_oracle(const LinearProblem& prob, double t_begin, double t_end, double h_fine,
                                        const Mat& q0) {
  if (!(h_fine > 0.0) || !(t_end > t_begin)) throw Error(ErrorKind::Config, "invalid oracle span or step");
  if (q0.rows() != prob.dim) throw Error(ErrorKind::DimensionMismatch, "initial frame rows must equal dim");
  const auto steps = static_cast<std::size_t>(std::llround((t_end - t_begin) / h_fine));
  const std::size_t p = q0.cols();
  ContinuousQrSeries out;
  out.diag.assign(p, Vec());
  Mat q = qr_positive(q0).q;
  const auto record = [&](double t) {
    const Mat tm = q.transpose() * prob.A(t) * q;
    out.times.push_back(t);
    for (std::size_t i = 0; i < p; ++i) out.diag[i].push_back(tm(i, i));
  };
  record(t_begin);
  const Mat eye = Mat::identity(p);
  for (std::size_t m = 0; m < steps; ++m) {
    const double t = t_begin + static_cast<double>(m) * h_fine;
    const double hh = h_fine;
    const Mat k1 = qr_rhs(prob, q, t);
    const Mat k2 = qr_rhs(prob, q + (0.5 * hh) * k1, t + 0.5 * hh);
    const Mat k3 = qr_rhs(prob, q + (0.5 * hh) * k2, t + 0.5 * hh);
    const Mat k4 = qr_rhs(prob, q + hh * k3, t + hh);
    Mat next = q + (hh / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!next.all_finite() || max_abs_diff(next.transpose() * next, eye) > 1e-6)
      throw Error(ErrorKind::OrthogonalityLost, "frame drift exceeded 1e-6 at t = " + std::to_string(t));
    q = qr_positive(next).q;
    record(t_begin + static_cast<double>(m + 1) * h_fine);
  }
  out.final_frame = q;
  return out;
}

std::vector<Vec> integrate_series(const ContinuousQrSeries& s, std::size_t stride) {
  if (stride == 0 || stride % 2 != 0) throw Error(ErrorKind::Config, "Simpson stride must be even");
  const std::size_t samples = s.times.size();
  const std::size_t coarse = samples == 0 ? 0 : (samples - 1) / stride;
  const double hf = samples > 1 ? s.times[1] - s.times[0] : 0.0;
  std::vector<Vec> out(s.diag.size(), Vec(coarse, 0.0));
  for (std::size_t i = 0; i < s.diag.size(); ++i)
    for (std::size_t c = 0; c < coarse; ++c) {
      double acc = 0.0;
      for (std::size_t m = 0; m <= stride; ++m) {
        const double w = (m == 0 || m == stride) ? 1.0 : (m % 2 == 1 ? 4.0 : 2.0);
        acc += w * s.diag[i][c * stride + m];
      }
      out[i][c] = acc * hf / 3.0;
    }
  return out;
}

std::string estimates_to_json(const std::vector<SpectrumReportRow>& rows, double window, double h,
                              Denominator denominator) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& r : rows) {
    nlohmann::ordered_json j;
    j["mode"] = r.mode;
    j["eta"] = r.eta;
    j["mu"] = r.mu;
    j["alpha"] = r.alpha;
    j["beta"] = r.beta;
    j["window"] = window;
    j["h"] = h;
    j["denominator_mode"] = to_string(denominator);
    arr.push_back(j);
  }
  return arr.dump(2);
}

}  // namespace glmstab
