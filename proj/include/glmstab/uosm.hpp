#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <vector>

#include "glmstab/dense.hpp"
#include "glmstab/glm.hpp"

namespace glmstab {

/// Similarity P^{-1} V P = blkdiag(1, E22) isolating the unit eigenvalue.
/// Column 0 of P is the unit-eigenvalue eigenvector scaled so that its
/// largest-magnitude entry is +1; the other columns are unit vectors with
/// first nonzero entry positive.
struct SpectralSplit {
  Mat P;
  Mat Pinv;
  Mat E22;
  Vec unit_row;  // first row of Pinv
};

SpectralSplit spectral_split(const Mat& v);

struct WSequence {
  std::vector<Vec> values;
  double h = 0.0;
  double t0 = 0.0;
  /// sum_j unit_row[j] * j / sum_j unit_row[j]: w_n tracks the solution near
  /// t0 + (n + step_offset) h for multistep-type supervectors.
  double step_offset = 0.0;
  bool truncated = false;  // source trajectory was flagged diverged

  std::size_t size() const noexcept { return values.size(); }
  double time(std::size_t n) const noexcept { return t0 + static_cast<double>(n) * h; }
};

/// w_n = sum_j unit_row[j] x_n^j over the d-blocks of X_n.
WSequence extract_w(const Trajectory& traj, const SpectralSplit& split);

/// CSV with columns n, t, w_0 ... w_{d-1}, log_norm.
void write_w_csv(std::ostream& os, const WSequence& w);

enum class DecayComponent {
  Full,        // ||(P^{-1} x I)(X^A_n - X^B_n)||
  Transverse,  // only the E22 coordinates of the same difference
};

struct DecayFit {
  bool exact_match = false;
  double rate = 0.0;       // fitted per-step contraction factor
  double prefactor = 0.0;  // fitted value at n = 0
  std::size_t samples = 0;
  std::vector<double> log_diff;  // per step in the window; -inf where zero
};

/// Least-squares fit of log||difference|| against n over [first, last).
/// last = 0 means the common length of both trajectories.
DecayFit initialization_decay(const Trajectory& a, const Trajectory& b, const SpectralSplit& split,
                              std::size_t first = 0, std::size_t last = 0,
                              DecayComponent component = DecayComponent::Full);

}  // namespace glmstab
