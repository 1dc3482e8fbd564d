#include "glmstab/glm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "glmstab/error.hpp"
#include "glmstab/io.hpp"

namespace glmstab {

namespace {

Mat stage_coefficients(const GlmTableau& tab, const LinearProblem& prob, std::size_t n, double h, double t0) {
  const std::size_t d = prob.dim;
  Mat m(d * tab.r, d * tab.r);
  const double tn = t0 + static_cast<double>(n) * h;
  for (std::size_t i = 0; i < tab.r; ++i) m.set_block(i * d, i * d, prob.A(tn + tab.xi[i] * h));
  return m;
}

Vec stack(const std::vector<Vec>& blocks) {
  Vec out;
  for (const Vec& b : blocks) out.insert(out.end(), b.begin(), b.end());
  return out;
}

double norm_inf(std::span<const double> v) {
  double r = 0.0;
  for (double e : v) r = std::max(r, std::abs(e));
  return r;
}

bool finite(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double e) { return std::isfinite(e); });
}

// Appends x_next and applies the divergence guard.
bool commit_step(Trajectory& traj, Vec x_next) {
  if (!finite(x_next)) {
    traj.diverged = true;
    return false;
  }
  const double n0 = norm2(traj.X.front());
  traj.X.push_back(std::move(x_next));
  if (n0 > 0.0 && norm2(traj.X.back()) > traj.divergence_factor * n0) traj.diverged = true;
  return true;
}

void require_shapes(const GlmTableau& tab) {
  const bool ok = tab.U.rows() == tab.r && tab.U.cols() == tab.k && tab.V.rows() == tab.k && tab.V.cols() == tab.k &&
                  tab.C.rows() == tab.r && tab.C.cols() == tab.r && tab.D.rows() == tab.k && tab.D.cols() == tab.r &&
                  tab.xi.size() == tab.r && tab.k >= 1 && tab.r >= 1;
  if (!ok) throw Error(ErrorKind::DimensionMismatch, "inconsistent tableau dimensions for " + tab.name);
}

}  // namespace

bool GlmTableau::explicit_stages() const {
  for (std::size_t i = 0; i < C.rows(); ++i)
    for (std::size_t j = i; j < C.cols(); ++j)
      if (C(i, j) != 0.0) return false;
  return true;
}

bool is_strictly_stable(const Mat& v) {
  if (!v.square() || v.empty()) return false;
  int unit = 0;
  for (const auto& e : eigenvalues(v)) {
    if (std::abs(e - 1.0) <= 1e-8) {
      ++unit;
    } else if (std::abs(e) > 1.0 - 1e-6) {
      return false;
    }
  }
  return unit == 1;
}

void validate(const GlmTableau& tab) {
  require_shapes(tab);
  if (!is_strictly_stable(tab.V)) throw Error(ErrorKind::NotStrictlyStable, tab.name + ": V is not strictly stable");
}

GlmTableau bdf2_tableau() {
  GlmTableau t;
  t.name = "bdf2";
  t.k = 2;
  t.r = 1;
  t.order_p = 2;
  t.U = Mat{{-1.0 / 3.0, 4.0 / 3.0}};
  t.V = Mat{{0.0, 1.0}, {-1.0 / 3.0, 4.0 / 3.0}};
  t.C = Mat{{2.0 / 3.0}};
  t.D = Mat{{0.0}, {2.0 / 3.0}};
  t.xi = {2.0};
  return t;
}

GlmTableau ab2_tableau() {
  GlmTableau t;
  t.name = "ab2";
  t.k = 2;
  t.r = 2;
  t.order_p = 2;
  t.U = Mat::identity(2);
  t.V = Mat{{0.0, 1.0}, {0.0, 1.0}};
  t.C = Mat(2, 2);
  t.D = Mat{{0.0, 0.0}, {-0.5, 1.5}};
  t.xi = {0.0, 1.0};
  return t;
}

GlmTableau backward_euler_tableau() {
  GlmTableau t;
  t.name = "be";
  t.k = 1;
  t.r = 1;
  t.order_p = 1;
  t.U = Mat{{1.0}};
  t.V = Mat{{1.0}};
  t.C = Mat{{1.0}};
  t.D = Mat{{1.0}};
  t.xi = {1.0};
  return t;
}

GlmTableau leapfrog_tableau() {
  GlmTableau t;
  t.name = "leapfrog";
  t.k = 2;
  t.r = 1;
  t.order_p = 2;
  t.U = Mat{{0.0, 1.0}};
  t.V = Mat{{0.0, 1.0}, {1.0, 0.0}};
  t.C = Mat{{0.0}};
  t.D = Mat{{0.0}, {2.0}};
  t.xi = {1.0};
  return t;
}

GlmTableau tableau_by_name(const std::string& name) {
  if (name == "bdf2") return bdf2_tableau();
  if (name == "ab2") return ab2_tableau();
  if (name == "be") return backward_euler_tableau();
  throw Error(ErrorKind::Config, "unknown method '" + name + "' (expected bdf2, ab2 or be)");
}

std::vector<std::string> tableau_names() { return {"bdf2", "ab2", "be"}; }

Trajectory::Trajectory(double h_, double t0_, std::size_t d_, Vec x0_super, std::string start, std::string prob)
    : h(h_), t0(t0_), d(d_), start_proc(std::move(start)), problem(std::move(prob)) {
  if (d == 0 || x0_super.empty() || x0_super.size() % d != 0)
    throw Error(ErrorKind::DimensionMismatch, "supervector length is not a multiple of d");
  k = x0_super.size() / d;
  X.push_back(std::move(x0_super));
}

Vec Trajectory::block(std::size_t n, std::size_t j) const {
  const Vec& x = X.at(n);
  return Vec(x.begin() + static_cast<std::ptrdiff_t>(j * d), x.begin() + static_cast<std::ptrdiff_t>((j + 1) * d));
}

Mat linear_transition(const GlmTableau& tab, const LinearProblem& prob, std::size_t n, double h, double t0) {
  require_shapes(tab);
  const std::size_t d = prob.dim;
  const Mat id = Mat::identity(d);
  const Mat m = stage_coefficients(tab, prob, n, h, t0);
  const Mat stage = Mat::identity(d * tab.r) - h * (kron(tab.C, id) * m);
  Mat y;
  try {
    y = solve(stage, kron(tab.U, id));
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::Singular) throw;
    throw Error(ErrorKind::StageSingular, "stage matrix singular at step " + std::to_string(n));
  }
  return kron(tab.V, id) + h * (kron(tab.D, id) * m * y);
}

bool step_linear(Trajectory& traj, const GlmTableau& tab, const LinearProblem& prob) {
  if (traj.diverged) return false;
  if (traj.d != prob.dim || traj.k != tab.k) throw Error(ErrorKind::DimensionMismatch, "trajectory does not match");
  const std::size_t n = traj.size() - 1;
  const Mat phi = linear_transition(tab, prob, n, traj.h, traj.t0);
  return commit_step(traj, phi * std::span<const double>(traj.X.back()));
}

std::size_t advance_linear(Trajectory& traj, const GlmTableau& tab, const LinearProblem& prob, std::size_t steps) {
  std::size_t taken = 0;
  while (taken < steps && step_linear(traj, tab, prob)) ++taken;
  return taken;
}

bool step_nonlinear(Trajectory& traj, const GlmTableau& tab, const OdeSystem& sys, const NewtonConfig& cfg) {
  if (traj.diverged) return false;
  require_shapes(tab);
  if (traj.d != sys.dim || traj.k != tab.k) throw Error(ErrorKind::DimensionMismatch, "trajectory does not match");
  if (!(cfg.tol > 0.0) || cfg.max_iters < 1) throw Error(ErrorKind::Config, "invalid Newton configuration");
  const std::size_t d = sys.dim, r = tab.r;
  const double h = traj.h;
  const double tn = traj.time(traj.size() - 1);
  const Mat id = Mat::identity(d);
  const Mat ck = kron(tab.C, id);
  const Vec& x = traj.X.back();
  const Vec ux = kron(tab.U, id) * std::span<const double>(x);

  const auto stage_f = [&](const Vec& g) {
    Vec f(d * r);
    for (std::size_t i = 0; i < r; ++i) {
      const std::span<const double> gi(g.data() + i * d, d);
      const Vec fi = sys.f(gi, tn + tab.xi[i] * h);
      std::copy(fi.begin(), fi.end(), f.begin() + static_cast<std::ptrdiff_t>(i * d));
    }
    return f;
  };
  const auto residual = [&](const Vec& g, const Vec& f) {
    Vec res = ck * std::span<const double>(f);
    for (std::size_t i = 0; i < res.size(); ++i) res[i] = g[i] - ux[i] - h * res[i];
    return res;
  };

  Vec g = ux;
  if (cfg.predictor == NewtonConfig::Predictor::ExplicitEuler) {
    const Vec f0 = stage_f(ux);
    const Vec cf = ck * std::span<const double>(f0);
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += h * cf[i];
  }
  Vec f = stage_f(g);
  Vec res = residual(g, f);
  int iters = 0;
  while (true) {
    if (!finite(g) || !finite(res)) throw Error(ErrorKind::NewtonDiverged, "non-finite stage iterate");
    const double scale = std::max(1.0, norm_inf(g));
    if (norm_inf(res) <= cfg.tol * scale) break;
    if (++iters > cfg.max_iters) throw Error(ErrorKind::NewtonDiverged, "Newton exceeded max_iters");
    Mat jm(d * r, d * r);
    for (std::size_t i = 0; i < r; ++i) {
      const std::span<const double> gi(g.data() + i * d, d);
      jm.set_block(i * d, i * d, sys.jac(gi, tn + tab.xi[i] * h));
    }
    const Mat jr = Mat::identity(d * r) - h * (ck * jm);
    Vec delta;
    try {
      delta = solve(jr, res);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::Singular) throw;
      throw Error(ErrorKind::StageSingular, "Newton Jacobian singular");
    }
    for (std::size_t i = 0; i < g.size(); ++i) g[i] -= delta[i];
    f = stage_f(g);
    res = residual(g, f);
  }

  Vec next = kron(tab.V, id) * std::span<const double>(x);
  const Vec df = kron(tab.D, id) * std::span<const double>(f);
  for (std::size_t i = 0; i < next.size(); ++i) next[i] += h * df[i];
  return commit_step(traj, std::move(next));
}

std::size_t advance_nonlinear(Trajectory& traj, const GlmTableau& tab, const OdeSystem& sys, std::size_t steps,
                              const NewtonConfig& cfg) {
  std::size_t taken = 0;
  while (taken < steps && step_nonlinear(traj, tab, sys, cfg)) ++taken;
  return taken;
}

Vec rk4_step(const OdeSystem& sys, std::span<const double> x, double t, double h) {
  const std::size_t n = x.size();
  Vec tmp(n);
  const Vec k1 = sys.f(x, t);
  for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + 0.5 * h * k1[i];
  const Vec k2 = sys.f(tmp, t + 0.5 * h);
  for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + 0.5 * h * k2[i];
  const Vec k3 = sys.f(tmp, t + 0.5 * h);
  for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + h * k3[i];
  const Vec k4 = sys.f(tmp, t + h);
  Vec out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = x[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  return out;
}

Vec start_rk4(const OdeSystem& sys, std::span<const double> x0, double t0, double h, std::size_t k) {
  if (k == 0) throw Error(ErrorKind::Config, "step count k must be at least 1");
  std::vector<Vec> blocks{Vec(x0.begin(), x0.end())};
  for (std::size_t j = 1; j < k; ++j)
    blocks.push_back(rk4_step(sys, blocks.back(), t0 + static_cast<double>(j - 1) * h, h));
  return stack(blocks);
}

Vec start_exact(const FlowMap& flow, std::span<const double> x0, double t0, double h, std::size_t k) {
  if (k == 0) throw Error(ErrorKind::Config, "step count k must be at least 1");
  std::vector<Vec> blocks{Vec(x0.begin(), x0.end())};
  for (std::size_t j = 1; j < k; ++j) {
    const double s = t0 + static_cast<double>(j - 1) * h;
    blocks.push_back(flow(blocks.back(), s, s + h));
  }
  return stack(blocks);
}

double lte_defect(const GlmTableau& tab, const LinearProblem& prob, const ReferenceFn& ref, std::size_t n, double h,
                  double t0) {
  const std::size_t d = prob.dim;
  std::vector<Vec> blocks;
  for (std::size_t j = 0; j < tab.k; ++j) blocks.push_back(ref(t0 + static_cast<double>(n + j) * h));
  const Vec x = stack(blocks);
  const Vec next = linear_transition(tab, prob, n, h, t0) * std::span<const double>(x);
  const Vec target = ref(t0 + static_cast<double>(n + tab.k) * h);
  Vec diff(d);
  for (std::size_t i = 0; i < d; ++i) diff[i] = next[(tab.k - 1) * d + i] - target[i];
  return norm2(diff);
}

double lte_probe(const GlmTableau& tab, const LinearProblem& prob, std::span<const double> x0, std::size_t n,
                 double h, double t0) {
  if (!prob.flow) throw Error(ErrorKind::Config, "problem " + prob.name + " has no reference oracle");
  const Vec start(x0.begin(), x0.end());
  const FlowMap& flow = *prob.flow;
  return lte_defect(tab, prob, [&](double t) { return flow(start, t0, t); }, n, h, t0);
}

double lte_probe_local(const GlmTableau& tab, const LinearProblem& prob, const Trajectory& traj, std::size_t n) {
  if (!prob.flow) throw Error(ErrorKind::Config, "problem " + prob.name + " has no reference oracle");
  const Vec anchor = traj.block(n, traj.k - 1);
  const double s = traj.time(n + traj.k - 1);
  const FlowMap& flow = *prob.flow;
  return lte_defect(
      tab, prob, [&](double t) { return t == s ? anchor : flow(anchor, s, t); }, n, traj.h, traj.t0);
}

TauSeries tau_series(std::span<const double> lte) {
  TauSeries out;
  out.tau_max = std::numeric_limits<double>::quiet_NaN();
  if (lte.size() < 2) return out;
  for (std::size_t i = 0; i + 1 < lte.size(); ++i) {
    if (lte[i] == 0.0) {
      out.skipped.push_back(i);
      continue;
    }
    out.tau.push_back(lte[i + 1] / lte[i]);
    out.index.push_back(i);
  }
  if (out.tau.empty()) throw Error(ErrorKind::DivideByZero, "every LTE value used as a denominator is zero");
  out.tau_max = *std::max_element(out.tau.begin(), out.tau.end());
  return out;
}

Mat amplification(const GlmTableau& tab, double z) {
  const Mat stage = Mat::identity(tab.r) - z * tab.C;
  return tab.V + z * (tab.D * solve(stage, tab.U));
}

double origin_gap(const GlmTableau& tab, double z_max) {
  const auto stable = [&](double z) {
    try {
      return spectral_radius(amplification(tab, z)) <= 1.0 + 1e-12;
    } catch (const Error&) {
      return false;
    }
  };
  constexpr int kGrid = 600;
  const double z_min = 1e-6;
  const double ratio = std::log(z_max / z_min);
  double prev = 0.0;
  for (int i = 0; i <= kGrid; ++i) {
    const double z = z_min * std::exp(ratio * i / kGrid);
    if (stable(z)) {
      if (i == 0) return 0.0;
      double lo = prev, hi = z;
      for (int it = 0; it < 80 && hi - lo > 1e-13 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        (stable(mid) ? hi : lo) = mid;
      }
      return hi;
    }
    prev = z;
  }
  return std::numeric_limits<double>::infinity();
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
  std::vector<std::string> header{"n", "t"};
  const std::size_t width = traj.d * traj.k;
  for (std::size_t i = 0; i < width; ++i) header.push_back("X" + std::to_string(i));
  write_csv_row(os, header);
  for (std::size_t n = 0; n < traj.size(); ++n) {
    std::vector<std::string> row{std::to_string(n), format_number(traj.time(n))};
    for (double e : traj.X[n]) row.push_back(format_number(e));
    write_csv_row(os, row);
  }
}

}  // namespace glmstab
