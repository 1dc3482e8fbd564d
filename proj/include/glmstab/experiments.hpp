#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "glmstab/glm.hpp"
#include "glmstab/problems.hpp"
#include "glmstab/spectra.hpp"
#include "glmstab/sweep.hpp"

namespace glmstab {

enum class LteKind { Local, Exact, None };
std::string to_string(LteKind k);

struct RunConfig {
  std::string method = "bdf2";
  ProblemConfig problem;
  double h = 7.5e-3;
  double t_final = 40.0;
  std::string start = "rk4";      // rk4 | exact
  std::optional<std::size_t> n0;  // burn-in; default half the trail
  MuOptions mu;
  LteKind lte = LteKind::Local;
  double divergence_factor = 1e12;

  /// Throws Config on invalid settings.
  void validate() const;
};

/// Parses a JSON object with keys method, problem, h, t_final, start, n0,
/// sum_start, denominator, lte, divergence_factor; absent keys keep defaults.
RunConfig run_config_from_json(const std::string& text);

struct StepRecord {
  std::size_t n = 0;
  double t = 0.0;
  double norm_x = 0.0;
  std::optional<double> lte;
  std::optional<double> running_mu;
};

struct DiagnosticReport {
  std::string method;
  double h = 0.0;
  std::size_t steps = 0;  // GLM steps taken
  bool diverged = false;
  double mu_appr = 0.0;
  std::size_t n0 = 0;
  std::size_t count = 0;
  std::optional<double> lte_mean;
  std::optional<double> lte_max;
  std::optional<double> tau_max;
  Vec lte;
  double final_norm = 0.0;
  std::vector<StepRecord> rows;
  std::vector<std::string> warnings;
};

/// Number of solution grid points after t0: round((t_final - t0) / h).
std::size_t grid_steps(double t0, double t_final, double h);

DiagnosticReport cmd_run(const RunConfig& cfg, Exec exec = Exec::Parallel);
void write_run_csv(std::ostream& os, const DiagnosticReport& rep);
std::string report_to_json(const DiagnosticReport& rep);

struct Table1Row {
  double h = 0.0;
  DiagnosticReport report;
  double published_lte_mean = 0.0;
  double published_lte_max = 0.0;
  double published_mu = 0.0;
};

RunConfig table1_config(double h);
std::vector<Table1Row> cmd_table1(MuOptions mu = {}, Exec exec = Exec::Parallel);
void write_table1_csv(std::ostream& os, const std::vector<Table1Row>& rows);
/// Tidy series: h, t, log10 lte, log10 norm.
void write_figure1_csv(std::ostream& os, const std::vector<Table1Row>& rows);

enum class B2Reading { AsPrinted, Corrected };
std::string to_string(B2Reading r);
double b2_value(B2Reading r);

struct Table2Options {
  std::vector<B2Reading> readings{B2Reading::AsPrinted, B2Reading::Corrected};
  double b1 = -0.5;
  MuOptions mu;
};

struct Table2Row {
  B2Reading reading = B2Reading::AsPrinted;
  double a = 0.0;
  double b1 = 0.0;
  double b2 = 0.0;
  DiagnosticReport report;
  double published_lte_mean = 0.0;
  double published_lte_max = 0.0;
  double published_mu = 0.0;
  double published_tau_max = 0.0;
};

RunConfig table2_config(double a, double b1, double b2);
std::vector<Table2Row> cmd_table2(const Table2Options& opts = {}, Exec exec = Exec::Parallel);
void write_table2_csv(std::ostream& os, const std::vector<Table2Row>& rows);
void write_figure2_csv(std::ostream& os, const std::vector<Table2Row>& rows);

struct CounterexampleReport {
  std::string method;
  double h = 0.0;
  double amp = 0.0;
  double offset = 0.0;
  std::size_t steps = 0;
  double origin_gap = 0.0;
  double growth_total = 0.0;       // ||X_N|| / ||X_0||
  double growth_per_period = 0.0;  // geometric mean per step (one period each)
  double exact_ratio = 0.0;        // x(t_N) / x(0)
  double frozen_max_rel_diff = 0.0;
  bool frozen_identical = false;
  Vec norms;
};

/// Integrates x' = (amp cos(2 pi t / h) + offset) x and the frozen problem
/// x' = (amp + offset) x from the same starting supervector.
CounterexampleReport cmd_counterexample(const std::string& method, double h, double amp, double offset,
                                        std::size_t steps = 200);
std::string counterexample_to_json(const CounterexampleReport& rep);

struct SpectrumOptions {
  std::optional<double> window;   // Sacker-Sell window H; default min(20, T/3)
  std::optional<std::size_t> modes;  // default d
  bool oracle = false;            // also run the continuous QR oracle
};

struct SpectrumResult {
  std::vector<SpectrumReportRow> rows;
  std::vector<SpectrumReportRow> oracle_rows;
  Vec mu_appr;
  double window = 0.0;
  double h = 0.0;
  std::size_t steps = 0;
  Denominator denominator = Denominator::FromOrigin;
  QrTrail trail;
};

SpectrumResult cmd_spectrum(const RunConfig& cfg, const SpectrumOptions& opts = {});
std::string spectrum_to_json(const SpectrumResult& res);

/// Trail whose log_r are given per-mode increment series.
QrTrail trail_from_increments(const std::vector<Vec>& modes, double h, double t0);

struct ConvergenceRow {
  double h = 0.0;
  double global_error = 0.0;
  double lte_max = 0.0;
};

struct ConvergenceResult {
  std::vector<ConvergenceRow> rows;
  double global_slope = 0.0;
  double lte_slope = 0.0;
};

/// Global error at t_final and maximal exact-history defect per step size;
/// slopes are least-squares fits in log-log.
ConvergenceResult cmd_converge(const RunConfig& cfg, const std::vector<double>& hs, Exec exec = Exec::Parallel);
void write_converge_csv(std::ostream& os, const ConvergenceResult& res);

double loglog_slope(std::span<const double> x, std::span<const double> y);

}  // namespace glmstab
