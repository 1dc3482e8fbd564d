// Serial reference versus OpenMP execution of the independent per-step and per-run workloads.
#include <benchmark/benchmark.h>

#include "glmstab/experiments.hpp"
#include "glmstab/sweep.hpp"

using namespace glmstab;

namespace {

Exec exec_of(const benchmark::State& state) { return state.range(0) == 0 ? Exec::Serial : Exec::Parallel; }

void label(benchmark::State& state) { state.SetLabel(state.range(0) == 0 ? "serial" : "parallel"); }

void BM_LteSeriesLocal(benchmark::State& state) {
  const LinearProblem prob = rotating_cosine_problem({});
  const GlmTableau tab = bdf2_tableau();
  const double h = 7.5e-3;
  Trajectory traj(h, 0.0, 2, start_rk4(as_system(prob), Vec{1.0, 0.0}, 0.0, h, tab.k), "rk4", prob.name);
  advance_linear(traj, tab, prob, 5332);
  for (auto _ : state) benchmark::DoNotOptimize(lte_series_local(tab, prob, traj, exec_of(state)));
  label(state);
}

void BM_LteSeriesExact(benchmark::State& state) {
  const LinearProblem prob = rotating_cosine_problem({});
  for (auto _ : state)
    benchmark::DoNotOptimize(lte_series_exact(bdf2_tableau(), prob, Vec{1.0, 0.0}, 0.0, 7.5e-3, 5332, exec_of(state)));
  label(state);
}

void BM_Table1(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(cmd_table1({}, exec_of(state)));
  label(state);
}

void BM_Table2(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(cmd_table2({}, exec_of(state)));
  label(state);
}

void BM_Converge(benchmark::State& state) {
  RunConfig cfg;
  cfg.t_final = 5.0;
  cfg.start = "exact";
  const std::vector<double> hs{2e-3, 1e-3, 5e-4, 2.5e-4};
  for (auto _ : state) benchmark::DoNotOptimize(cmd_converge(cfg, hs, exec_of(state)));
  label(state);
}

}  // namespace

BENCHMARK(BM_LteSeriesLocal)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_LteSeriesExact)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Table1)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Table2)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Converge)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
