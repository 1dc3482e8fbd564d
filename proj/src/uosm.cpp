#include "glmstab/uosm.hpp"

#include <cmath>
#include <limits>
#include <ostream>

#include "glmstab/error.hpp"
#include "glmstab/io.hpp"

namespace glmstab {

SpectralSplit spectral_split(const Mat& v) {
  if (!is_strictly_stable(v)) throw Error(ErrorKind::NotStrictlyStable, "V is not strictly stable");
  const std::size_t k = v.rows();
  const Mat shifted = v - Mat::identity(k);

  Vec right = null_vector(shifted);
  std::size_t lead = 0;
  for (std::size_t i = 1; i < k; ++i)
    if (std::abs(right[i]) > std::abs(right[lead]) * (1.0 + 1e-12)) lead = i;
  const double scale = right[lead];
  for (double& e : right) e /= scale;

  const Vec left = null_vector(shifted.transpose());
  Mat p(k, k);
  p.set_col(0, right);
  if (k > 1) {
    const Mat comp = orthogonal_complement(left);
    for (std::size_t c = 0; c < k - 1; ++c) {
      Vec col = comp.col(c);
      const double nrm = norm2(col);
      for (double& e : col) e /= nrm;
      for (double e : col) {
        if (std::abs(e) > 1e-14) {
          if (e < 0.0)
            for (double& x : col) x = -x;
          break;
        }
      }
      p.set_col(c + 1, col);
    }
  }

  SpectralSplit out;
  out.P = p;
  out.Pinv = inverse(p);
  const Mat e = out.Pinv * v * p;
  out.E22 = k > 1 ? e.block(1, 1, k - 1, k - 1) : Mat();
  out.unit_row.resize(k);
  for (std::size_t j = 0; j < k; ++j) out.unit_row[j] = out.Pinv(0, j);
  return out;
}

WSequence extract_w(const Trajectory& traj, const SpectralSplit& split) {
  const std::size_t k = split.unit_row.size();
  if (traj.k != k) throw Error(ErrorKind::DimensionMismatch, "trajectory k does not match the split");
  WSequence w;
  w.h = traj.h;
  w.t0 = traj.t0;
  w.truncated = traj.diverged;
  double num = 0.0, den = 0.0;
  for (std::size_t j = 0; j < k; ++j) {
    num += split.unit_row[j] * static_cast<double>(j);
    den += split.unit_row[j];
  }
  w.step_offset = den != 0.0 ? num / den : 0.0;
  w.values.reserve(traj.size());
  for (const Vec& x : traj.X) {
    Vec wn(traj.d, 0.0);
    for (std::size_t j = 0; j < k; ++j)
      for (std::size_t i = 0; i < traj.d; ++i) wn[i] += split.unit_row[j] * x[j * traj.d + i];
    w.values.push_back(std::move(wn));
  }
  return w;
}

void write_w_csv(std::ostream& os, const WSequence& w) {
  std::vector<std::string> header{"n", "t"};
  const std::size_t d = w.values.empty() ? 0 : w.values.front().size();
  for (std::size_t i = 0; i < d; ++i) header.push_back("w" + std::to_string(i));
  header.emplace_back("log_norm");
  write_csv_row(os, header);
  for (std::size_t n = 0; n < w.size(); ++n) {
    std::vector<std::string> row{std::to_string(n), format_number(w.time(n))};
    for (double e : w.values[n]) row.push_back(format_number(e));
    row.push_back(format_number(std::log(norm2(w.values[n]))));
    write_csv_row(os, row);
  }
}

DecayFit initialization_decay(const Trajectory& a, const Trajectory& b, const SpectralSplit& split,
                              std::size_t first, std::size_t last, DecayComponent component) {
  if (a.d != b.d || a.k != b.k || a.k != split.unit_row.size())
    throw Error(ErrorKind::DimensionMismatch, "trajectories do not share dimensions with the split");
  const std::size_t common = std::min(a.size(), b.size());
  if (last == 0 || last > common) last = common;
  if (first >= last) throw Error(ErrorKind::WindowOutOfRange, "empty fit window");

  const std::size_t d = a.d, k = a.k;
  const Mat pinv = kron(split.Pinv, Mat::identity(d));
  const std::size_t skip = component == DecayComponent::Transverse ? d : 0;

  DecayFit fit;
  bool all_zero = true;
  double sn = 0.0, sy = 0.0, snn = 0.0, sny = 0.0;
  for (std::size_t n = first; n < last; ++n) {
    Vec diff(d * k);
    for (std::size_t i = 0; i < d * k; ++i) diff[i] = a.X[n][i] - b.X[n][i];
    const Vec y = pinv * std::span<const double>(diff);
    const double nrm = norm2(std::span<const double>(y).subspan(skip));
    if (nrm != 0.0) all_zero = false;
    const double ly = nrm > 0.0 ? std::log(nrm) : -std::numeric_limits<double>::infinity();
    fit.log_diff.push_back(ly);
    if (nrm > std::numeric_limits<double>::min()) {
      const double x = static_cast<double>(n);
      sn += x;
      sy += ly;
      snn += x * x;
      sny += x * ly;
      ++fit.samples;
    }
  }
  if (all_zero) {
    fit.exact_match = true;
    return fit;
  }
  if (fit.samples < 10) throw Error(ErrorKind::DegenerateFit, "fewer than 10 nonzero difference samples");
  const double m = static_cast<double>(fit.samples);
  const double denom = m * snn - sn * sn;
  if (denom == 0.0) throw Error(ErrorKind::DegenerateFit, "degenerate abscissae");
  const double slope = (m * sny - sn * sy) / denom;
  const double intercept = (sy - slope * sn) / m;
  fit.rate = std::exp(slope);
  fit.prefactor = std::exp(intercept);
  return fit;
}

}  // namespace glmstab
