#include "glmstab/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>

#include "glmstab/error.hpp"
#include "glmstab/io.hpp"
#include "glmstab/uosm.hpp"
#include "json.hpp"

namespace glmstab {

namespace {

using ojson = nlohmann::ordered_json;

struct PublishedRow1 {
  double h, lte_mean, lte_max, mu;
};
constexpr PublishedRow1 kTable1[] = {
    {7.5e-1, 1.37e10, 1.51e11, 7.68e-1},
    {7.5e-2, 3.75e-3, 9.42e-3, 9.03e-3},
    {7.5e-3, 3.60e-7, 6.38e-4, -9.70e-2},
    {7.5e-4, 1.95e-9, 6.24e-5, -9.04e-2},
};

struct PublishedRow2 {
  double a, lte_mean, lte_max, mu, tau_max;
};
constexpr PublishedRow2 kTable2[] = {
    {1.15, 5.50e-5, 4.38e-3, -2.33e-2, 1.068},
    {1.45, 1.18e-4, 5.02e-3, -1.69e-3, 1.086},
    {1.75, 2.88e-4, 5.70e-3, 1.78e-2, 1.11},
    {2.05, 7.96e-4, 6.4e-3, 3.64e-2, 1.23},
};

std::string opt_number(const std::optional<double>& v) { return v ? format_number(*v) : std::string(); }

ojson opt_json(const std::optional<double>& v) { return v ? ojson(*v) : ojson(nullptr); }

Vec initial_supervector(const RunConfig& cfg, const GlmTableau& tab, const LinearProblem& prob) {
  const Vec& x0 = cfg.problem.x0;
  if (cfg.start == "exact") {
    if (!prob.flow) throw Error(ErrorKind::Config, "exact start needs a problem with a reference oracle");
    return start_exact(*prob.flow, x0, cfg.problem.t0, cfg.h, tab.k);
  }
  return start_rk4(as_system(prob), x0, cfg.problem.t0, cfg.h, tab.k);
}

double get_number(const nlohmann::json& j, const char* key) {
  if (!j.at(key).is_number()) throw Error(ErrorKind::Config, std::string("key '") + key + "' must be a number");
  return j.at(key).get<double>();
}

std::string get_string(const nlohmann::json& j, const char* key) {
  if (!j.at(key).is_string()) throw Error(ErrorKind::Config, std::string("key '") + key + "' must be a string");
  return j.at(key).get<std::string>();
}

}  // namespace

std::string to_string(LteKind k) {
  switch (k) {
    case LteKind::Local: return "local";
    case LteKind::Exact: return "exact";
    case LteKind::None: return "none";
  }
  return "none";
}

void RunConfig::validate() const {
  tableau_by_name(method);
  if (!(h > 0.0) || !std::isfinite(h)) throw Error(ErrorKind::Config, "h must be positive and finite");
  if (!(t_final > problem.t0) || !std::isfinite(t_final)) throw Error(ErrorKind::Config, "t_final must exceed t0");
  if (start != "rk4" && start != "exact") throw Error(ErrorKind::Config, "start must be rk4 or exact");
  if (!(divergence_factor > 1.0)) throw Error(ErrorKind::Config, "divergence_factor must exceed 1");
}

RunConfig run_config_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::Config, std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw Error(ErrorKind::Config, "config must be a JSON object");
  static const char* const allowed[] = {"method", "problem", "h",   "t_final", "start",
                                        "n0",     "sum_start", "denominator", "lte", "divergence_factor"};
  for (const auto& [key, value] : j.items())
    if (std::find(std::begin(allowed), std::end(allowed), key) == std::end(allowed))
      throw Error(ErrorKind::Config, "unknown config key '" + key + "'");
  RunConfig cfg;
  if (j.contains("method")) cfg.method = get_string(j, "method");
  if (j.contains("problem")) cfg.problem = problem_config_from_json(j["problem"].dump());
  if (j.contains("h")) cfg.h = get_number(j, "h");
  if (j.contains("t_final")) cfg.t_final = get_number(j, "t_final");
  if (j.contains("start")) cfg.start = get_string(j, "start");
  if (j.contains("n0")) {
    if (!j["n0"].is_number_unsigned()) throw Error(ErrorKind::Config, "key 'n0' must be a non-negative integer");
    cfg.n0 = j["n0"].get<std::size_t>();
  }
  if (j.contains("sum_start")) {
    const std::string s = get_string(j, "sum_start");
    if (s == "origin") cfg.mu.sum_start = SumStart::Origin;
    else if (s == "burn-in") cfg.mu.sum_start = SumStart::BurnIn;
    else throw Error(ErrorKind::Config, "sum_start must be origin or burn-in");
  }
  if (j.contains("denominator")) {
    const std::string s = get_string(j, "denominator");
    if (s == "t0") cfg.mu.denominator = Denominator::FromOrigin;
    else if (s == "N0") cfg.mu.denominator = Denominator::FromBurnIn;
    else throw Error(ErrorKind::Config, "denominator must be t0 or N0");
  }
  if (j.contains("lte")) {
    const std::string s = get_string(j, "lte");
    if (s == "local") cfg.lte = LteKind::Local;
    else if (s == "exact") cfg.lte = LteKind::Exact;
    else if (s == "none") cfg.lte = LteKind::None;
    else throw Error(ErrorKind::Config, "lte must be local, exact or none");
  }
  if (j.contains("divergence_factor")) cfg.divergence_factor = get_number(j, "divergence_factor");
  cfg.validate();
  return cfg;
}

std::size_t grid_steps(double t0, double t_final, double h) {
  return static_cast<std::size_t>(std::llround((t_final - t0) / h));
}

DiagnosticReport cmd_run(const RunConfig& cfg, Exec exec) {
  cfg.validate();
  const GlmTableau tab = tableau_by_name(cfg.method);
  validate(tab);
  const LinearProblem prob = cfg.problem.make();
  const double t0 = cfg.problem.t0;

  DiagnosticReport rep;
  rep.method = cfg.method;
  rep.h = cfg.h;
  if (cfg.problem.type == "rotating_cosine") rep.warnings = cfg.problem.rotating.warnings();
  if (auto w = check_bounded(prob, t0, cfg.t_final, 257)) rep.warnings.push_back(*w);

  const std::size_t n_grid = grid_steps(t0, cfg.t_final, cfg.h);
  if (n_grid < tab.k) throw Error(ErrorKind::Config, "t_final too short for the starting values");
  Trajectory traj(cfg.h, t0, prob.dim, initial_supervector(cfg, tab, prob), cfg.start, prob.name);
  traj.divergence_factor = cfg.divergence_factor;
  rep.steps = advance_linear(traj, tab, prob, n_grid - (tab.k - 1));
  rep.diverged = traj.diverged;

  const SpectralSplit split = spectral_split(tab.V);
  const WSequence w = extract_w(traj, split);
  QrTrail trail = QrTrail::from_vector(w.values.front(), cfg.h, t0);
  for (std::size_t n = 1; n < w.size(); ++n) qr_advance_vector(trail, w.values[n]);
  const std::size_t nf = trail.steps();
  if (nf == 0) throw Error(ErrorKind::WindowOutOfRange, "no steps were taken");
  rep.n0 = cfg.n0.value_or(nf / 2);
  if (rep.n0 > nf) throw Error(ErrorKind::WindowOutOfRange, "burn-in exceeds the number of steps");
  rep.count = nf - rep.n0;
  rep.mu_appr = mu_appr(trail, rep.n0, rep.count, cfg.mu).mu[0];
  const auto running = running_average(trail);

  if (cfg.lte != LteKind::None && prob.flow) {
    rep.lte = cfg.lte == LteKind::Local
                  ? lte_series_local(tab, prob, traj, exec)
                  : lte_series_exact(tab, prob, cfg.problem.x0, t0, cfg.h, traj.size() - 1, exec);
    if (!rep.lte.empty()) {
      double sum = 0.0;
      for (double e : rep.lte) sum += e;
      rep.lte_mean = sum / static_cast<double>(rep.lte.size());
      rep.lte_max = *std::max_element(rep.lte.begin(), rep.lte.end());
      try {
        rep.tau_max = tau_series(rep.lte).tau_max;
        if (std::isnan(*rep.tau_max)) rep.tau_max.reset();
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::DivideByZero) throw;
      }
    }
  }

  for (std::size_t n = 0; n < traj.size(); ++n) {
    StepRecord r;
    r.n = n;
    r.t = traj.time(n);
    r.norm_x = norm2(traj.block(n, 0));
    if (n < rep.lte.size()) r.lte = rep.lte[n];
    if (n >= 1 && n <= running.size()) r.running_mu = running[n - 1][0];
    rep.rows.push_back(r);
  }
  rep.final_norm = norm2(traj.block(traj.size() - 1, tab.k - 1));
  return rep;
}

void write_run_csv(std::ostream& os, const DiagnosticReport& rep) {
  write_csv_row(os, {"n", "t", "norm_x", "lte", "running_mu"});
  for (const auto& r : rep.rows)
    write_csv_row(os, {std::to_string(r.n), format_number(r.t), format_number(r.norm_x), opt_number(r.lte),
                       opt_number(r.running_mu)});
}

std::string report_to_json(const DiagnosticReport& rep) {
  ojson j;
  j["method"] = rep.method;
  j["h"] = rep.h;
  j["steps"] = rep.steps;
  j["diverged"] = rep.diverged;
  j["mu_appr"] = rep.mu_appr;
  j["n0"] = rep.n0;
  j["count"] = rep.count;
  j["lte_mean"] = opt_json(rep.lte_mean);
  j["lte_max"] = opt_json(rep.lte_max);
  j["tau_max"] = opt_json(rep.tau_max);
  j["final_norm"] = rep.final_norm;
  j["warnings"] = rep.warnings;
  return j.dump(2);
}

RunConfig table1_config(double h) {
  RunConfig cfg;
  cfg.method = "bdf2";
  cfg.problem.rotating = RotatingCosineParams{1.2, 1.2, -0.14, -0.15, 10.0, 1.0, std::nullopt};
  cfg.problem.t0 = 0.0;
  cfg.problem.x0 = {1.0, 0.0};
  cfg.h = h;
  cfg.t_final = 40.0;
  cfg.start = "rk4";
  cfg.lte = LteKind::Local;
  return cfg;
}

std::vector<Table1Row> cmd_table1(MuOptions mu, Exec exec) {
  constexpr std::size_t rows = std::size(kTable1);
  return map_indices<Table1Row>(
      rows,
      [&](std::size_t i) {
        RunConfig cfg = table1_config(kTable1[i].h);
        cfg.mu = mu;
        Table1Row row;
        row.h = kTable1[i].h;
        row.report = cmd_run(cfg, exec);
        row.published_lte_mean = kTable1[i].lte_mean;
        row.published_lte_max = kTable1[i].lte_max;
        row.published_mu = kTable1[i].mu;
        return row;
      },
      exec);
}

void write_table1_csv(std::ostream& os, const std::vector<Table1Row>& rows) {
  write_csv_row(os, {"h", "lte_mean", "lte_max", "mu_appr", "diverged", "published_lte_mean", "published_lte_max",
                     "published_mu_appr"});
  for (const auto& r : rows)
    write_csv_row(os, {format_number(r.h), opt_number(r.report.lte_mean), opt_number(r.report.lte_max),
                       format_number(r.report.mu_appr), r.report.diverged ? "true" : "false",
                       format_number(r.published_lte_mean), format_number(r.published_lte_max), format_number(r.published_mu)});
}

void write_figure1_csv(std::ostream& os, const std::vector<Table1Row>& rows) {
  write_csv_row(os, {"h", "t", "log10_lte", "log10_norm"});
  for (const auto& r : rows)
    for (const auto& s : r.report.rows)
      write_csv_row(os, {format_number(r.h), format_number(s.t),
                         s.lte ? format_number(std::log10(*s.lte)) : std::string(),
                         format_number(std::log10(s.norm_x))});
}

std::string to_string(B2Reading r) { return r == B2Reading::AsPrinted ? "as-printed" : "corrected"; }

double b2_value(B2Reading r) { return r == B2Reading::AsPrinted ? -0.055 : -0.55; }

RunConfig table2_config(double a, double b1, double b2) {
  RunConfig cfg;
  cfg.method = "bdf2";
  cfg.problem.rotating = RotatingCosineParams{a, a, b1, b2, 1.0, 1.0, std::nullopt};
  cfg.problem.t0 = 0.0;
  cfg.problem.x0 = {1.0, 0.0};
  cfg.h = 0.05;
  cfg.t_final = 100.0;
  cfg.start = "rk4";
  cfg.lte = LteKind::Local;
  return cfg;
}

std::vector<Table2Row> cmd_table2(const Table2Options& opts, Exec exec) {
  constexpr std::size_t per = std::size(kTable2);
  const std::size_t rows = per * opts.readings.size();
  return map_indices<Table2Row>(
      rows,
      [&](std::size_t idx) {
        const B2Reading reading = opts.readings[idx / per];
        const PublishedRow2& published = kTable2[idx % per];
        RunConfig cfg = table2_config(published.a, opts.b1, b2_value(reading));
        cfg.mu = opts.mu;
        Table2Row row;
        row.reading = reading;
        row.a = published.a;
        row.b1 = opts.b1;
        row.b2 = b2_value(reading);
        row.report = cmd_run(cfg, exec);
        row.published_lte_mean = published.lte_mean;
        row.published_lte_max = published.lte_max;
        row.published_mu = published.mu;
        row.published_tau_max = published.tau_max;
        return row;
      },
      exec);
}

void write_table2_csv(std::ostream& os, const std::vector<Table2Row>& rows) {
  write_csv_row(os, {"b2_reading", "a", "b1", "b2", "lte_mean", "lte_max", "mu_appr", "tau_max", "published_lte_mean",
                     "published_lte_max", "published_mu_appr", "published_tau_max"});
  for (const auto& r : rows)
    write_csv_row(os, {to_string(r.reading), format_number(r.a), format_number(r.b1), format_number(r.b2),
                       opt_number(r.report.lte_mean), opt_number(r.report.lte_max), format_number(r.report.mu_appr),
                       opt_number(r.report.tau_max), format_number(r.published_lte_mean),
                       format_number(r.published_lte_max), format_number(r.published_mu), format_number(r.published_tau_max)});
}

void write_figure2_csv(std::ostream& os, const std::vector<Table2Row>& rows) {
  write_csv_row(os, {"b2_reading", "a", "t", "log10_lte", "log10_norm"});
  for (const auto& r : rows)
    for (const auto& s : r.report.rows)
      write_csv_row(os, {to_string(r.reading), format_number(r.a), format_number(s.t),
                         s.lte ? format_number(std::log10(*s.lte)) : std::string(),
                         format_number(std::log10(s.norm_x))});
}

CounterexampleReport cmd_counterexample(const std::string& method, double h, double amp, double offset,
                                        std::size_t steps) {
  if (!(h > 0.0) || !std::isfinite(h)) throw Error(ErrorKind::Config, "h must be positive and finite");
  if (steps == 0) throw Error(ErrorKind::Config, "steps must be positive");
  const GlmTableau tab = tableau_by_name(method);
  validate(tab);

  CounterexampleReport rep;
  rep.method = method;
  rep.h = h;
  rep.amp = amp;
  rep.offset = offset;
  rep.origin_gap = origin_gap(tab);
  const double z = h * (amp + offset);
  if (z > 0.0 && !(z < 0.5 * rep.origin_gap))
    throw Error(ErrorKind::ParameterOutsideGap, "h (D + L) lies outside half the origin gap of " + method);

  const LinearProblem prob = scalar_cosine_problem({amp, offset, 2.0 * std::numbers::pi / h});
  const LinearProblem frozen = scalar_cosine_problem({0.0, amp + offset, 0.0});
  const Vec x0{1.0};
  const Vec start = start_exact(*prob.flow, x0, 0.0, h, tab.k);
  Trajectory a(h, 0.0, 1, start, "exact", prob.name);
  Trajectory b(h, 0.0, 1, start, "exact", frozen.name);
  a.divergence_factor = b.divergence_factor = std::numeric_limits<double>::max();
  advance_linear(a, tab, prob, steps);
  advance_linear(b, tab, frozen, steps);
  rep.steps = a.size() - 1;

  const double n0 = norm2(a.X.front());
  for (std::size_t n = 0; n < a.size(); ++n) {
    rep.norms.push_back(norm2(a.X[n]));
    if (n < b.size()) {
      for (std::size_t i = 0; i < a.X[n].size(); ++i) {
        const double scale = std::max(std::abs(b.X[n][i]), std::numeric_limits<double>::min());
        rep.frozen_max_rel_diff = std::max(rep.frozen_max_rel_diff, std::abs(a.X[n][i] - b.X[n][i]) / scale);
      }
    }
  }
  rep.frozen_identical = a.size() == b.size() && rep.frozen_max_rel_diff <= 1e-12;
  rep.growth_total = rep.norms.back() / n0;
  rep.growth_per_period = std::pow(rep.growth_total, 1.0 / static_cast<double>(rep.steps));
  rep.exact_ratio = (*prob.flow)(x0, 0.0, a.time(rep.steps))[0];
  return rep;
}

std::string counterexample_to_json(const CounterexampleReport& rep) {
  ojson j;
  j["method"] = rep.method;
  j["h"] = rep.h;
  j["D"] = rep.amp;
  j["L"] = rep.offset;
  j["steps"] = rep.steps;
  j["origin_gap"] = std::isfinite(rep.origin_gap) ? ojson(rep.origin_gap) : ojson("inf");
  j["growth_total"] = rep.growth_total;
  j["growth_per_period"] = rep.growth_per_period;
  j["exact_ratio"] = rep.exact_ratio;
  j["frozen_max_rel_diff"] = rep.frozen_max_rel_diff;
  j["frozen_identical"] = rep.frozen_identical;
  return j.dump(2);
}

QrTrail trail_from_increments(const std::vector<Vec>& modes, double h, double t0) {
  if (modes.empty()) throw Error(ErrorKind::DimensionMismatch, "no modes");
  QrTrail t = QrTrail::identity(modes.size(), modes.size(), h, t0);
  const std::size_t steps = modes.front().size();
  for (std::size_t n = 0; n < steps; ++n) {
    Vec lr(modes.size());
    for (std::size_t i = 0; i < modes.size(); ++i) lr[i] = modes[i].at(n);
    t.log_r.push_back(std::move(lr));
  }
  return t;
}

namespace {

std::vector<SpectrumReportRow> estimate_rows(const QrTrail& trail, double window) {
  const auto ends = lyapunov_endpoints(trail, trail.steps() / 2);
  const auto ss = sacker_sell_window(trail, window);
  std::vector<SpectrumReportRow> rows;
  for (std::size_t i = 0; i < trail.modes(); ++i)
    rows.push_back({i, ends.eta[i], ends.mu[i], ss.alpha[i], ss.beta[i]});
  return rows;
}

}  // namespace

SpectrumResult cmd_spectrum(const RunConfig& cfg, const SpectrumOptions& opts) {
  cfg.validate();
  const GlmTableau tab = tableau_by_name(cfg.method);
  validate(tab);
  const LinearProblem prob = cfg.problem.make();
  const std::size_t d = prob.dim;
  const double t0 = cfg.problem.t0;
  const std::size_t n_grid = grid_steps(t0, cfg.t_final, cfg.h);
  if (n_grid < tab.k) throw Error(ErrorKind::Config, "t_final too short");
  const std::size_t steps = n_grid - (tab.k - 1);

  const std::size_t p = opts.modes.value_or(d);
  if (p == 0 || p > d * tab.k) throw Error(ErrorKind::Config, "modes must be in 1..d k");
  const SpectralSplit split = spectral_split(tab.V);
  const Mat lifted = kron(split.P, Mat::identity(d));
  SpectrumResult res;
  res.h = cfg.h;
  res.denominator = cfg.mu.denominator;
  res.trail = QrTrail::with_frame(lifted.block(0, 0, d * tab.k, p), cfg.h, t0);
  for (std::size_t n = 0; n < steps && !res.trail.diverged; ++n)
    qr_advance(res.trail, linear_transition(tab, prob, n, cfg.h, t0));
  res.steps = res.trail.steps();
  if (res.steps < 6) throw Error(ErrorKind::WindowOutOfRange, "too few steps for spectral estimates");

  const double horizon = static_cast<double>(res.steps) * cfg.h;
  res.window = opts.window.value_or(std::min(20.0, static_cast<double>(res.steps / 3) * cfg.h));
  res.rows = estimate_rows(res.trail, res.window);
  const std::size_t n0 = cfg.n0.value_or(res.steps / 2);
  if (n0 > res.steps) throw Error(ErrorKind::WindowOutOfRange, "burn-in exceeds the number of steps");
  res.mu_appr = mu_appr(res.trail, n0, res.steps - n0, cfg.mu).mu;

  if (opts.oracle) {
    if (p > d) throw Error(ErrorKind::Config, "oracle comparison needs modes <= d");
    Mat q0(d, p);
    for (std::size_t i = 0; i < p; ++i) q0(i, i) = 1.0;
    double weight = 0.0, moment = 0.0;
    for (std::size_t j = 0; j < tab.k; ++j) {
      weight += split.unit_row[j];
      moment += split.unit_row[j] * static_cast<double>(j);
    }
    const double start = t0 + (moment / weight) * cfg.h;
    const auto series = continuous_qr_oracle(prob, start, start + horizon, 0.5 * cfg.h, q0);
    const QrTrail oracle = trail_from_increments(integrate_series(series, 2), cfg.h, start);
    res.oracle_rows = estimate_rows(oracle, res.window);
  }
  return res;
}

std::string spectrum_to_json(const SpectrumResult& res) {
  ojson j;
  j["h"] = res.h;
  j["steps"] = res.steps;
  j["window"] = res.window;
  j["denominator_mode"] = to_string(res.denominator);
  j["mu_appr"] = res.mu_appr;
  j["estimates"] = ojson::parse(estimates_to_json(res.rows, res.window, res.h, res.denominator));
  if (!res.oracle_rows.empty())
    j["oracle"] = ojson::parse(estimates_to_json(res.oracle_rows, res.window, res.h, res.denominator));
  return j.dump(2);
}

double loglog_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw Error(ErrorKind::DegenerateFit, "need at least two points");
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double m = static_cast<double>(x.size());
  const double den = m * sxx - sx * sx;
  if (den == 0.0) throw Error(ErrorKind::DegenerateFit, "identical abscissae");
  return (m * sxy - sx * sy) / den;
}

ConvergenceResult cmd_converge(const RunConfig& cfg, const std::vector<double>& hs, Exec exec) {
  if (hs.size() < 2) throw Error(ErrorKind::Config, "need at least two step sizes");
  const GlmTableau tab = tableau_by_name(cfg.method);
  validate(tab);
  const LinearProblem prob = cfg.problem.make();
  if (!prob.flow) throw Error(ErrorKind::Config, "convergence study needs a reference oracle");
  ConvergenceResult res;
  res.rows = map_indices<ConvergenceRow>(
      hs.size(),
      [&](std::size_t i) {
        RunConfig c = cfg;
        c.h = hs[i];
        c.validate();
        const double t0 = c.problem.t0;
        const std::size_t n_grid = grid_steps(t0, c.t_final, c.h);
        if (n_grid < tab.k) throw Error(ErrorKind::Config, "t_final too short");
        Trajectory traj(c.h, t0, prob.dim, initial_supervector(c, tab, prob), c.start, prob.name);
        traj.divergence_factor = c.divergence_factor;
        advance_linear(traj, tab, prob, n_grid - (tab.k - 1));
        const std::size_t last = traj.size() - 1;
        const Vec approx = traj.block(last, tab.k - 1);
        const Vec exact = (*prob.flow)(c.problem.x0, t0, traj.time(last + tab.k - 1));
        Vec diff(approx.size());
        for (std::size_t m = 0; m < diff.size(); ++m) diff[m] = approx[m] - exact[m];
        const auto lte = lte_series_exact(tab, prob, c.problem.x0, t0, c.h, last, Exec::Serial);
        ConvergenceRow row;
        row.h = c.h;
        row.global_error = norm2(diff);
        row.lte_max = lte.empty() ? 0.0 : *std::max_element(lte.begin(), lte.end());
        return row;
      },
      exec);
  Vec h, g, l;
  for (const auto& r : res.rows) {
    h.push_back(r.h);
    g.push_back(r.global_error);
    l.push_back(r.lte_max);
  }
  res.global_slope = loglog_slope(h, g);
  res.lte_slope = loglog_slope(h, l);
  return res;
}

void write_converge_csv(std::ostream& os, const ConvergenceResult& res) {
  write_csv_row(os, {"h", "global_error", "lte_max", "global_slope", "lte_slope"});
  for (const auto& r : res.rows)
    write_csv_row(os, {format_number(r.h), format_number(r.global_error), format_number(r.lte_max),
                       format_number(res.global_slope), format_number(res.lte_slope)});
}

}  // namespace glmstab
