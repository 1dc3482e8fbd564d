#include "glmstab/sweep.hpp"

#include <cmath>
#include <exception>

#include "glmstab/error.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace glmstab {

void for_each_index(std::size_t count, const std::function<void(std::size_t)>& fn, Exec exec) {
  std::vector<std::exception_ptr> errors(count);
  if (exec == Exec::Serial) {
    for (std::size_t i = 0; i < count; ++i) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  } else {
    const auto n = static_cast<std::ptrdiff_t>(count);
#pragma omp parallel for schedule(dynamic, 16)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      try {
        fn(static_cast<std::size_t>(i));
      } catch (...) {
        errors[static_cast<std::size_t>(i)] = std::current_exception();
      }
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
}

std::vector<double> lte_series_exact(const GlmTableau& tab, const LinearProblem& prob, std::span<const double> x0,
                                     double t0, double h, std::size_t steps, Exec exec) {
  if (!prob.flow) throw Error(ErrorKind::Config, "problem " + prob.name + " has no reference oracle");
  const FlowMap& flow = *prob.flow;
  // Exact values at every grid point, marched interval by interval.
  const std::size_t points = steps + tab.k;
  std::vector<Vec> ref{Vec(x0.begin(), x0.end())};
  ref.reserve(points);
  for (std::size_t m = 1; m < points; ++m) {
    const double s = t0 + static_cast<double>(m - 1) * h;
    ref.push_back(flow(ref.back(), s, s + h));
  }
  return map_indices<double>(
      steps,
      [&](std::size_t n) {
        const auto at = [&](double t) {
          const auto m = static_cast<std::size_t>(std::llround((t - t0) / h));
          return ref[m];
        };
        return lte_defect(tab, prob, at, n, h, t0);
      },
      exec);
}

std::vector<double> lte_series_local(const GlmTableau& tab, const LinearProblem& prob, const Trajectory& traj,
                                     Exec exec) {
  const std::size_t steps = traj.size() > 0 ? traj.size() - 1 : 0;
  return map_indices<double>(
      steps, [&](std::size_t n) { return lte_probe_local(tab, prob, traj, n); }, exec);
}

int worker_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace glmstab
