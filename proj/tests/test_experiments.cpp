#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstring>
#include <sstream>

#include <nlohmann/json.hpp>

#include "glmstab/error.hpp"
#include "glmstab/experiments.hpp"

using namespace glmstab;

namespace {

template <class F>
ErrorKind kind_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error thrown");
  return ErrorKind::DimensionMismatch;
}

RunConfig short_run() {
  RunConfig cfg;
  cfg.h = 0.05;
  cfg.t_final = 5.0;
  return cfg;
}

}  // namespace

TEST_CASE("run config parsing and validation") {
  const RunConfig cfg = run_config_from_json(
      R"({"method":"be","h":0.1,"t_final":2,"start":"exact","n0":3,"sum_start":"burn-in","denominator":"N0","lte":"exact","problem":{"beta":1}})");
  CHECK(cfg.method == "be");
  CHECK(cfg.h == 0.1);
  CHECK(cfg.n0 == 3u);
  CHECK(cfg.mu.sum_start == SumStart::BurnIn);
  CHECK(cfg.mu.denominator == Denominator::FromBurnIn);
  CHECK(cfg.lte == LteKind::Exact);
  CHECK(cfg.problem.rotating.beta == 1.0);

  for (const char* bad : {R"({"method":"rk45"})", R"({"h":-1})", R"({"h":0})", R"({"t_final":-3})",
                          R"({"start":"magic"})", R"({"denominator":"t1"})", R"({"bogus":true})", "nope"}) {
    CHECK(kind_of([&] { run_config_from_json(bad).validate(); }) == ErrorKind::Config);
  }
}

TEST_CASE("grid step count") {
  CHECK(grid_steps(0.0, 40.0, 7.5e-3) == 5333);
  CHECK(grid_steps(0.0, 40.0, 0.75) == 53);
  CHECK(grid_steps(0.0, 1.0, 0.1) == 10);
}

TEST_CASE("run report is consistent and deterministic") {
  const RunConfig cfg = short_run();
  const DiagnosticReport a = cmd_run(cfg, Exec::Serial);
  const DiagnosticReport b = cmd_run(cfg, Exec::Parallel);
  CHECK(report_to_json(a) == report_to_json(b));
  CHECK(a.steps == 99);
  CHECK_FALSE(a.diverged);
  REQUIRE(a.lte_mean.has_value());
  double sum = 0.0, mx = 0.0;
  for (double x : a.lte) {
    sum += x;
    mx = std::max(mx, x);
  }
  CHECK(*a.lte_mean == doctest::Approx(sum / a.lte.size()));
  CHECK(*a.lte_max == mx);
  std::ostringstream csv;
  write_run_csv(csv, a);
  CHECK(csv.str().rfind("n,t,norm_x,lte,running_mu\r\n", 0) == 0);
  const auto j = nlohmann::ordered_json::parse(report_to_json(a));
  CHECK(j.begin().key() == "method");
}

TEST_CASE("run without LTE leaves the columns empty") {
  RunConfig cfg = short_run();
  cfg.lte = LteKind::None;
  const DiagnosticReport r = cmd_run(cfg);
  CHECK_FALSE(r.lte_mean.has_value());
  CHECK(r.lte.empty());
}

TEST_CASE("table configurations carry the published parameter sets") {
  const RunConfig t1 = table1_config(7.5e-2);
  CHECK(t1.problem.rotating.beta == 10.0);
  CHECK(t1.problem.rotating.b1 == -0.14);
  CHECK(t1.t_final == 40.0);
  const RunConfig t2 = table2_config(1.45, -0.5, b2_value(B2Reading::AsPrinted));
  CHECK(t2.problem.rotating.a1 == 1.45);
  CHECK(t2.problem.rotating.a2 == 1.45);
  CHECK(t2.problem.rotating.b2 == -0.055);
  CHECK(t2.h == 0.05);
  CHECK(t2.t_final == 100.0);
  CHECK(b2_value(B2Reading::Corrected) == -0.55);
}

TEST_CASE("counterexample: resonant and frozen problems coincide") {
  const CounterexampleReport r = cmd_counterexample("bdf2", 0.5, 0.3, -0.1, 100);
  CHECK(r.origin_gap == doctest::Approx(4.0).epsilon(1e-8));
  CHECK(r.frozen_max_rel_diff < 1e-12);
  CHECK(r.growth_per_period > 1.0);
  CHECK(r.exact_ratio < 1.0);
  const auto j = nlohmann::ordered_json::parse(counterexample_to_json(r));
  CHECK(j["method"] == "bdf2");
}

TEST_CASE("counterexample rejects parameters beyond the origin gap") {
  CHECK(kind_of([] { cmd_counterexample("bdf2", 0.5, 10.0, -1.0, 10); }) == ErrorKind::ParameterOutsideGap);
  CHECK(kind_of([] { cmd_counterexample("leapfrog", 0.5, 0.3, -0.1, 10); }) == ErrorKind::Config);
}

TEST_CASE("spectrum of a constant diagonal system") {
  RunConfig cfg;
  cfg.problem.type = "constant";
  cfg.problem.constant = Mat{{-1.0, 0.0}, {0.0, -2.0}};
  cfg.problem.x0 = Vec{1.0, 1.0};
  cfg.h = 0.01;
  cfg.t_final = 30.0;
  const SpectrumResult s = cmd_spectrum(cfg);
  REQUIRE(s.rows.size() == 2);
  CHECK(s.rows[0].mu == doctest::Approx(-1.0).epsilon(1e-3));
  CHECK(s.rows[1].mu == doctest::Approx(-2.0).epsilon(1e-3));
  CHECK(s.rows[0].alpha == doctest::Approx(-1.0).epsilon(1e-3));
  CHECK(s.rows[1].beta == doctest::Approx(-2.0).epsilon(1e-3));
}

TEST_CASE("spectrum oracle agrees with the discrete trail") {
  RunConfig cfg;
  cfg.problem.rotating.beta = 1.0;
  cfg.h = 0.01;
  cfg.t_final = 30.0;
  SpectrumOptions opts;
  opts.oracle = true;
  opts.window = 5.0;
  const SpectrumResult s = cmd_spectrum(cfg, opts);
  REQUIRE(s.oracle_rows.size() == s.rows.size());
  for (std::size_t i = 0; i < s.rows.size(); ++i) {
    CHECK(std::abs(s.rows[i].alpha - s.oracle_rows[i].alpha) < 5e-3);
    CHECK(std::abs(s.rows[i].beta - s.oracle_rows[i].beta) < 5e-3);
  }
}

TEST_CASE("convergence sweep recovers second order") {
  RunConfig cfg;
  cfg.problem.rotating.beta = 1.0;
  cfg.t_final = 5.0;
  cfg.start = "exact";
  const std::vector<double> hs{0.02, 0.01, 0.005};
  const ConvergenceResult a = cmd_converge(cfg, hs, Exec::Serial);
  const ConvergenceResult b = cmd_converge(cfg, hs, Exec::Parallel);
  CHECK(a.global_slope == doctest::Approx(2.0).epsilon(0.05));
  CHECK(a.lte_slope == doctest::Approx(3.0).epsilon(0.05));
  CHECK(std::memcmp(&a.global_slope, &b.global_slope, sizeof(double)) == 0);
  std::ostringstream os;
  write_converge_csv(os, a);
  CHECK(os.str().rfind("h,", 0) == 0);
}

TEST_CASE("log-log slope of an exact power law") {
  const Vec x{1.0, 2.0, 4.0, 8.0};
  const Vec y{3.0, 24.0, 192.0, 1536.0};
  CHECK(loglog_slope(x, y) == doctest::Approx(3.0));
}
