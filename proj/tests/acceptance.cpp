// Acceptance checks: one PASS/FAIL line per criterion, followed by detail lines.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "glmstab/error.hpp"
#include "glmstab/experiments.hpp"
#include "glmstab/uosm.hpp"

using namespace glmstab;

namespace {

int failures = 0;

void report(int id, const std::string& title, bool ok, const std::vector<std::string>& details) {
  std::printf("%s criterion %d: %s\n", ok ? "PASS" : "FAIL", id, title.c_str());
  for (const auto& d : details) std::printf("    %s\n", d.c_str());
  if (!ok) ++failures;
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

void guarded(int id, const std::string& title, const std::function<void()>& body) {
  try {
    body();
  } catch (const std::exception& e) {
    report(id, title, false, {std::string("exception: ") + e.what()});
  }
}

bool within_rel_or_abs(double got, double want, double rel, double abs_tol) {
  return std::abs(got - want) <= std::max(rel * std::abs(want), abs_tol);
}

// log |det m| by elimination with partial pivoting.
double log_abs_det(Mat m) {
  const std::size_t n = m.rows();
  double out = 0.0;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::abs(m(r, c)) > std::abs(m(piv, c))) piv = r;
    for (std::size_t j = 0; j < n; ++j) std::swap(m(c, j), m(piv, j));
    out += std::log(std::abs(m(c, c)));
    for (std::size_t r = c + 1; r < n; ++r) {
      const double f = m(r, c) / m(c, c);
      for (std::size_t j = c; j < n; ++j) m(r, j) -= f * m(c, j);
    }
  }
  return out;
}

void criterion1() {
  const auto start = std::chrono::steady_clock::now();
  const auto rows = cmd_table1();
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const int want_sign[] = {+1, +1, -1, -1};
  bool ok = rows.size() == 4 && secs < 10.0;
  std::vector<std::string> det{fmt("runtime %.2f s (limit 10 s)", secs)};
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const double mu = rows[i].report.mu_appr;
    const bool sign_ok = (mu > 0 ? 1 : -1) == want_sign[i];
    bool value_ok = true;
    if (i > 0) value_ok = within_rel_or_abs(mu, rows[i].published_mu, 0.30, 0.02);
    ok = ok && sign_ok && value_ok;
    det.push_back(fmt("h=%.1e mu_appr=%+.4e published=%+.4e sign %s value %s", rows[i].h, mu, rows[i].published_mu,
                      sign_ok ? "ok" : "WRONG", i == 0 ? "n/a" : (value_ok ? "ok" : "OFF")));
  }
  report(1, "Table 1 sign pattern (+,+,-,-) and values", ok, det);
}

void criterion2() {
  const auto rows = cmd_table2();
  const double tau_want[] = {1.068, 1.086, 1.11, 1.23};
  bool sign_flip = false, tau_ok_any = false, lte_ok_any = false;
  std::vector<std::string> det;
  for (B2Reading reading : {B2Reading::AsPrinted, B2Reading::Corrected}) {
    std::vector<const Table2Row*> sel;
    for (const auto& r : rows)
      if (r.reading == reading) sel.push_back(&r);
    if (sel.size() != 4) continue;
    const bool flip = (sel[1]->report.mu_appr < 0) != (sel[2]->report.mu_appr < 0);
    bool tau_ok = true, lte_ok = true;
    for (std::size_t i = 0; i < 4; ++i) {
      const auto& r = *sel[i];
      const double tau = r.report.tau_max.value_or(NAN);
      const double mean = r.report.lte_mean.value_or(NAN), mx = r.report.lte_max.value_or(NAN);
      tau_ok = tau_ok && std::abs(tau - tau_want[i]) <= 0.1;
      const bool mean_ok = mean <= 3 * r.published_lte_mean && mean >= r.published_lte_mean / 3;
      const bool max_ok = mx <= 3 * r.published_lte_max && mx >= r.published_lte_max / 3;
      lte_ok = lte_ok && mean_ok && max_ok;
      det.push_back(fmt("b2=%+.3f a=%.2f mu=%+.3e (pub %+.3e) tau_max=%.4f (pub %.3f) lte_mean=%.2e (pub %.2e) "
                        "lte_max=%.2e (pub %.2e)",
                        r.b2, r.a, r.report.mu_appr, r.published_mu, tau, tau_want[i], mean, r.published_lte_mean, mx,
                        r.published_lte_max));
    }
    det.push_back(fmt("reading %s: sign change between a=1.45 and a=1.75 %s, tau_max %s, LTE columns %s",
                      to_string(reading).c_str(), flip ? "yes" : "no", tau_ok ? "ok" : "off", lte_ok ? "ok" : "off"));
    sign_flip = sign_flip || flip;
    tau_ok_any = tau_ok_any || tau_ok;
    lte_ok_any = lte_ok_any || lte_ok;
  }

  Table2Options alt;
  alt.b1 = -0.05;
  alt.readings = {B2Reading::AsPrinted};
  for (const auto& r : cmd_table2(alt))
    det.push_back(fmt("info b1=-0.05 b2=%+.3f a=%.2f mu=%+.3e tau_max=%.4f lte_mean=%.2e lte_max=%.2e", r.b2, r.a,
                      r.report.mu_appr, r.report.tau_max.value_or(NAN), r.report.lte_mean.value_or(NAN),
                      r.report.lte_max.value_or(NAN)));
  report(2, "Table 2 sign change, tau_max and LTE magnitudes", sign_flip && tau_ok_any && lte_ok_any, det);
}

struct ResonantOutcome {
  double growth = 0.0;
  std::size_t steps = 0;
  double max_radius = 0.0;
};

ResonantOutcome resonant_run(double beta, double h, std::size_t max_steps) {
  RotatingCosineParams p;
  p.beta = beta;
  p.resonant_h = h;
  const LinearProblem prob = rotating_cosine_problem(p);
  const GlmTableau tab = bdf2_tableau();
  Trajectory traj(h, 0.0, 2, start_exact(*prob.flow, Vec{1.0, 0.0}, 0.0, h, tab.k), "exact", prob.name);
  ResonantOutcome out;
  const double x0 = norm2(traj.X.front());
  for (std::size_t n = 0; n < max_steps; ++n) {
    if (!step_linear(traj, tab, prob)) break;
    out.growth = std::max(out.growth, norm2(traj.X.back()) / x0);
    out.steps = n + 1;
    if (out.growth > 1e3) break;
  }
  const auto period = static_cast<std::size_t>(std::ceil(2 * std::numbers::pi / h));
  for (std::size_t n = 0; n <= period; ++n)
    out.max_radius = std::max(out.max_radius, spectral_radius(linear_transition(tab, prob, n, h, 0.0)));
  return out;
}

void criterion3() {
  const ResonantOutcome r = resonant_run(10.0, 0.5, 2000);
  const bool ok = r.growth > 1e3 && r.max_radius > 1.0;
  std::vector<std::string> det{fmt("beta=10 h=0.5: max ||X_n||/||X_0|| = %.3e over %zu steps, max spectral radius "
                                   "of the transition over one period = %.6f",
                                   r.growth, r.steps, r.max_radius)};
  for (double beta : {5.0, 12.0, 12.6, 13.0, 14.0, 15.0, 16.0, 17.0, 18.0, 20.0}) {
    const ResonantOutcome s = resonant_run(beta, 0.5, 2000);
    det.push_back(fmt("info beta=%.1f: growth %.3e after %zu steps, max radius %.6f", beta, s.growth, s.steps,
                      s.max_radius));
  }
  report(3, "resonant rotation destabilizes BDF2 at beta=10, h=0.5", ok, det);
}

void criterion4() {
  bool ok = true;
  std::vector<std::string> det;
  for (const char* m : {"bdf2", "ab2"}) {
    const CounterexampleReport r = cmd_counterexample(m, 0.5, 0.3, -0.1, 200);
    const bool this_ok = r.growth_total >= 10.0 && r.exact_ratio < 1.0 && r.frozen_max_rel_diff <= 1e-12;
    ok = ok && this_ok;
    det.push_back(fmt("%s: numerical growth %.3e over 200 steps, exact ratio %.3e, frozen max rel diff %.2e", m,
                      r.growth_total, r.exact_ratio, r.frozen_max_rel_diff));
  }
  report(4, "frozen-coefficient counterexample", ok, det);
}

void criterion5() {
  RunConfig cfg;
  cfg.t_final = 5.0;
  cfg.start = "exact";
  const std::vector<double> hs{2.5e-3, 1.25e-3, 6.25e-4};
  bool ok = true;
  std::vector<std::string> det;
  struct Want {
    const char* method;
    double global, lte;
  };
  for (const Want w : {Want{"bdf2", 2.0, 3.0}, Want{"be", 1.0, 2.0}}) {
    cfg.method = w.method;
    const ConvergenceResult r = cmd_converge(cfg, hs);
    const bool this_ok = std::abs(r.global_slope - w.global) <= 0.1 && std::abs(r.lte_slope - w.lte) <= 0.1;
    ok = ok && this_ok;
    det.push_back(fmt("%s: global slope %.4f (want %.1f), LTE slope %.4f (want %.1f)", w.method, r.global_slope,
                      w.global, r.lte_slope, w.lte));
  }
  report(5, "order of global error and per-step defect", ok, det);
}

double scalar_exponent_error(double h, double horizon) {
  RotatingCosineParams p;
  p.beta = 1.0;
  const LinearProblem prob = rotating_cosine_problem(p);
  const GlmTableau tab = bdf2_tableau();
  const std::size_t n_grid = grid_steps(0.0, horizon, h);
  Trajectory traj(h, 0.0, 2, start_exact(*prob.flow, Vec{1.0, 0.0}, 0.0, h, tab.k), "exact", prob.name);
  advance_linear(traj, tab, prob, n_grid - (tab.k - 1));
  const WSequence w = extract_w(traj, spectral_split(tab.V));
  QrTrail trail = QrTrail::from_vector(w.values.front(), h, 0.0);
  for (std::size_t n = 1; n < w.size(); ++n) qr_advance_vector(trail, w.values[n]);
  const double mu = window_average(trail, 0, trail.steps())[0];
  const double t_n = static_cast<double>(n_grid) * h;
  const double ref = p.b1 + p.a1 * (std::cos(t_n) - std::cos(0.0)) / t_n;
  return std::abs(mu - ref);
}

void criterion6() {
  const double horizon = 2 * std::numbers::pi * 113;
  const double e1 = scalar_exponent_error(1e-2, horizon);
  const double e2 = scalar_exponent_error(5e-3, horizon);
  const double ratio = e1 / e2;
  std::vector<std::string> det{fmt("horizon %.4f: error %.3e at h=1e-2, %.3e at h=5e-3, ratio %.3f (want 3.0..5.5)",
                                   horizon, e1, e2, ratio)};
  report(6, "scalar exponent estimate converges in h", ratio >= 3.0 && ratio <= 5.5, det);
}

void criterion7() {
  std::vector<std::string> det;
  const RotatingCosineParams p;
  const LinearProblem prob = rotating_cosine_problem(p);
  const GlmTableau tab = bdf2_tableau();
  const double h = 1e-3;

  QrTrail trail = QrTrail::identity(4, 4, h, 0.0);
  double log_det = 0.0;
  for (std::size_t n = 0; n < 100000; ++n) {
    const Mat phi = linear_transition(tab, prob, n, h, 0.0);
    log_det += log_abs_det(phi);
    qr_advance(trail, phi);
  }
  const double orth = max_abs_diff(trail.frame.transpose() * trail.frame, Mat::identity(4));
  double log_sum = 0.0;
  for (const auto& r : trail.log_r)
    for (double x : r) log_sum += x;
  const double tele = std::abs(log_sum - log_det) / std::max(1.0, std::abs(log_det));
  det.push_back(fmt("frame orthonormality after 1e5 steps: %.2e (limit 1e-12)", orth));
  det.push_back(fmt("telescoping log-sum identity: relative %.2e (limit 1e-9)", tele));

  const Mat a{{2.0, -1.0, 0.5}, {0.3, 1.7, -0.2}, {0.0, 0.4, 1.1}};
  const Mat b{{1.5, 0.2}, {-0.7, 0.9}};
  const double kron_err = max_abs_diff(inverse(kron(a, b)), kron(inverse(a), inverse(b)));
  det.push_back(fmt("kron inverse law: %.2e (limit 1e-10)", kron_err));

  const double hh = 0.05;
  Trajectory traj(hh, 0.0, 2, start_rk4(as_system(prob), Vec{1.0, 0.0}, 0.0, hh, 2), "rk4", prob.name);
  advance_linear(traj, tab, prob, 799);
  SpectralSplit split = spectral_split(tab.V);
  const auto mu_with = [&](const SpectralSplit& s) {
    const WSequence w = extract_w(traj, s);
    QrTrail t = QrTrail::from_vector(w.values.front(), hh, 0.0);
    for (std::size_t n = 1; n < w.size(); ++n) qr_advance_vector(t, w.values[n]);
    return mu_appr(t, t.steps() / 2, t.steps() - t.steps() / 2).mu[0];
  };
  const double mu0 = mu_with(split);
  double inv_err = 0.0;
  for (double c : {0.1, 3.0, -7.5}) {
    SpectralSplit scaled = split;
    for (std::size_t i = 0; i < scaled.P.rows(); ++i) scaled.P(i, 0) *= c;
    scaled.Pinv = inverse(scaled.P);
    scaled.unit_row = scaled.Pinv.transpose().col(0);
    inv_err = std::max(inv_err, std::abs(mu_with(scaled) - mu0));
  }
  det.push_back(fmt("mu invariance under P column rescaling: %.2e (limit 1e-10)", inv_err));

  const ContinuousQrSeries s = continuous_qr_oracle(prob, 0.0, 40.0, 1e-3, Mat::identity(2));
  double oracle_err = 0.0;
  for (std::size_t m = 0; m < s.times.size(); ++m) {
    const double t = s.times[m];
    oracle_err = std::max({oracle_err, std::abs(s.diag[0][m] - (p.a1 * std::cos(t) + p.b1)),
                           std::abs(s.diag[1][m] - (p.a2 * std::cos(t) + p.b2))});
  }
  det.push_back(fmt("continuous QR oracle diagonal error on [0, 40]: %.2e (limit 1e-6)", oracle_err));

  const bool ok = orth < 1e-12 && tele < 1e-9 && kron_err < 1e-10 && inv_err < 1e-10 && oracle_err < 1e-6;
  report(7, "QR and structural properties", ok, det);
}

void criterion8() {
  const RotatingCosineParams p;
  const LinearProblem prob = rotating_cosine_problem(p);
  const double h = 0.05;
  const std::size_t steps = 4000;
  QrTrail trail = QrTrail::identity(2, 2, h, 0.0);
  Mat phi(2, 2);
  for (std::size_t n = 0; n < steps; ++n) {
    const double s = static_cast<double>(n) * h;
    phi.set_col(0, (*prob.flow)(Vec{1.0, 0.0}, s, s + h));
    phi.set_col(1, (*prob.flow)(Vec{0.0, 1.0}, s, s + h));
    qr_advance(trail, phi);
  }
  const auto modes = mode_series(trail);
  const IntegralSeparationOptions opts;
  const PairSeparation sep = classify_pair(modes[0], modes[1], h, opts);
  const PairSeparation self = classify_pair(modes[0], modes[0], h, opts);
  const double gap = p.b1 - p.b2;
  const bool ok = sep.kind == SeparationClass::Separated && std::abs(sep.a - gap) <= 0.1 * gap &&
                  self.kind == SeparationClass::BoundedAverage;
  report(8, "integral separation classification", ok,
         {fmt("pair (1,2): %s, fitted gap %.6f vs %.6f, offset %.3e", to_string(sep.kind).c_str(), sep.a, gap, sep.b),
          fmt("pair (1,1): %s, drift %.2e, bound %.2e", to_string(self.kind).c_str(), self.eps, self.M)});
}

void criterion9() {
  std::ostringstream a, b;
  write_table1_csv(a, cmd_table1());
  write_table1_csv(b, cmd_table1());
  report(9, "table1 CSV is byte-identical across runs", a.str() == b.str() && !a.str().empty(),
         {fmt("%zu bytes", a.str().size())});
}

}  // namespace

int main() {
  guarded(1, "Table 1 sign pattern (+,+,-,-) and values", criterion1);
  guarded(2, "Table 2 sign change, tau_max and LTE magnitudes", criterion2);
  guarded(3, "resonant rotation destabilizes BDF2 at beta=10, h=0.5", criterion3);
  guarded(4, "frozen-coefficient counterexample", criterion4);
  guarded(5, "order of global error and per-step defect", criterion5);
  guarded(6, "scalar exponent estimate converges in h", criterion6);
  guarded(7, "QR and structural properties", criterion7);
  guarded(8, "integral separation classification", criterion8);
  guarded(9, "table1 CSV is byte-identical across runs", criterion9);
  std::printf("%d of 9 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
