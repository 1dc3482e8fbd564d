#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "glmstab/glm.hpp"
#include "glmstab/problems.hpp"

namespace glmstab {

/// Serial is the reference path; Parallel distributes independent items over
/// OpenMP threads. Both produce bitwise-identical results.
enum class Exec { Serial, Parallel };

/// Calls fn(i) for i in [0, count). Exceptions are captured per index and
/// the one with the lowest index is rethrown after the loop.
void for_each_index(std::size_t count, const std::function<void(std::size_t)>& fn, Exec exec);

template <class T, class F>
std::vector<T> map_indices(std::size_t count, F&& fn, Exec exec) {
  std::vector<T> out(count);
  for_each_index(count, [&](std::size_t i) { out[i] = fn(i); }, exec);
  return out;
}

/// Per-step defects along the exact solution from x0: entry n is the defect
/// of step n for n in [0, steps).
std::vector<double> lte_series_exact(const GlmTableau& tab, const LinearProblem& prob, std::span<const double> x0,
                                     double t0, double h, std::size_t steps, Exec exec);

/// Per-step local defects of a computed trajectory, n in [0, size - 1).
std::vector<double> lte_series_local(const GlmTableau& tab, const LinearProblem& prob, const Trajectory& traj,
                                     Exec exec);

/// Number of OpenMP threads available (1 without OpenMP).
int worker_threads();

}  // namespace glmstab
