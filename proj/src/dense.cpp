#include "glmstab/dense.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <numeric>

#include "glmstab/error.hpp"

namespace glmstab {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

void require_same_shape(const Mat& a, const Mat& b, const char* what) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw Error(ErrorKind::DimensionMismatch, what);
  }
}

// Householder vector v (unit 2-norm) with (I - 2 v v^T) x = beta e_1.
// Returns false when x is zero.
bool householder(std::span<const double> x, Vec& v, double& beta) {
  const double nx = norm2(x);
  v.assign(x.begin(), x.end());
  if (nx == 0.0) {
    beta = 0.0;
    return false;
  }
  beta = x[0] >= 0.0 ? -nx : nx;
  v[0] -= beta;
  const double nv = norm2(v);
  if (nv == 0.0) return false;
  for (double& e : v) e /= nv;
  return true;
}

}  // namespace

Mat::Mat(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Mat::Mat(std::initializer_list<std::initializer_list<double>> rows) {
  rows_ = rows.size();
  cols_ = rows_ == 0 ? 0 : rows.begin()->size();
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) throw Error(ErrorKind::DimensionMismatch, "ragged initializer");
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

Mat Mat::identity(std::size_t n) {
  Mat m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Mat Mat::column(std::span<const double> v) {
  Mat m(v.size(), 1);
  std::copy(v.begin(), v.end(), m.data_.begin());
  return m;
}

Mat Mat::diag(std::span<const double> v) {
  Mat m(v.size(), v.size());
  for (std::size_t i = 0; i < v.size(); ++i) m(i, i) = v[i];
  return m;
}

Mat Mat::transpose() const {
  Mat t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

Vec Mat::col(std::size_t j) const {
  Vec v(rows_);
  for (std::size_t i = 0; i < rows_; ++i) v[i] = (*this)(i, j);
  return v;
}

void Mat::set_col(std::size_t j, std::span<const double> v) {
  assert(v.size() == rows_);
  for (std::size_t i = 0; i < rows_; ++i) (*this)(i, j) = v[i];
}

Mat Mat::block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const {
  if (r0 + nr > rows_ || c0 + nc > cols_) throw Error(ErrorKind::DimensionMismatch, "block out of range");
  Mat b(nr, nc);
  for (std::size_t i = 0; i < nr; ++i)
    for (std::size_t j = 0; j < nc; ++j) b(i, j) = (*this)(r0 + i, c0 + j);
  return b;
}

void Mat::set_block(std::size_t r0, std::size_t c0, const Mat& b) {
  if (r0 + b.rows() > rows_ || c0 + b.cols() > cols_) {
    throw Error(ErrorKind::DimensionMismatch, "set_block out of range");
  }
  for (std::size_t i = 0; i < b.rows(); ++i)
    for (std::size_t j = 0; j < b.cols(); ++j) (*this)(r0 + i, c0 + j) = b(i, j);
}

Mat& Mat::operator+=(const Mat& o) {
  require_same_shape(*this, o, "operator+=");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
  return *this;
}

Mat& Mat::operator-=(const Mat& o) {
  require_same_shape(*this, o, "operator-=");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
  return *this;
}

Mat& Mat::operator*=(double s) {
  for (double& e : data_) e *= s;
  return *this;
}

bool Mat::all_finite() const noexcept {
  return std::all_of(data_.begin(), data_.end(), [](double e) { return std::isfinite(e); });
}

Mat operator+(Mat a, const Mat& b) { return a += b; }
Mat operator-(Mat a, const Mat& b) { return a -= b; }
Mat operator*(Mat a, double s) { return a *= s; }
Mat operator*(double s, Mat a) { return a *= s; }

Mat operator*(const Mat& a, const Mat& b) {
  if (a.cols() != b.rows()) throw Error(ErrorKind::DimensionMismatch, "matrix product");
  Mat c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
    }
  return c;
}

Vec operator*(const Mat& a, std::span<const double> x) {
  if (a.cols() != x.size()) throw Error(ErrorKind::DimensionMismatch, "matrix-vector product");
  Vec y(a.rows(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < a.cols(); ++j) s += a(i, j) * x[j];
    y[i] = s;
  }
  return y;
}

double norm_max(const Mat& m) noexcept {
  double r = 0.0;
  for (double e : m.data()) r = std::max(r, std::abs(e));
  return r;
}

double norm_frobenius(const Mat& m) noexcept { return norm2(m.data()); }

double norm2(std::span<const double> v) noexcept {
  // Scaled accumulation; entries near 1e±200 neither overflow nor underflow.
  double scale = 0.0;
  for (double e : v) scale = std::max(scale, std::abs(e));
  if (scale == 0.0 || !std::isfinite(scale)) return scale;
  double s = 0.0;
  for (double e : v) {
    const double q = e / scale;
    s += q * q;
  }
  return scale * std::sqrt(s);
}

double trace(const Mat& m) {
  if (!m.square()) throw Error(ErrorKind::DimensionMismatch, "trace of non-square matrix");
  double t = 0.0;
  for (std::size_t i = 0; i < m.rows(); ++i) t += m(i, i);
  return t;
}

double max_abs_diff(const Mat& a, const Mat& b) {
  require_same_shape(a, b, "max_abs_diff");
  double r = 0.0;
  for (std::size_t i = 0; i < a.data().size(); ++i) r = std::max(r, std::abs(a.data()[i] - b.data()[i]));
  return r;
}

QrFactors qr_positive(const Mat& m) {
  const std::size_t n = m.rows();
  const std::size_t p = m.cols();
  if (n < p) throw Error(ErrorKind::RankDeficient, "more columns than rows");
  const double mnorm = norm_frobenius(m);
  if (mnorm == 0.0 || !std::isfinite(mnorm)) throw Error(ErrorKind::RankDeficient, "zero or non-finite matrix");

  Mat a = m;
  std::vector<Vec> reflectors(p);
  Vec x;
  for (std::size_t j = 0; j < p; ++j) {
    x.resize(n - j);
    for (std::size_t i = j; i < n; ++i) x[i - j] = a(i, j);
    double beta = 0.0;
    Vec& v = reflectors[j];
    if (!householder(x, v, beta)) {
      v.assign(n - j, 0.0);
      continue;
    }
    for (std::size_t c = j; c < p; ++c) {
      double s = 0.0;
      for (std::size_t i = j; i < n; ++i) s += v[i - j] * a(i, c);
      s *= 2.0;
      for (std::size_t i = j; i < n; ++i) a(i, c) -= s * v[i - j];
    }
  }

  QrFactors f{Mat(n, p), Mat(p, p)};
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = i; j < p; ++j) f.r(i, j) = a(i, j);
  for (std::size_t i = 0; i < p; ++i) f.q(i, i) = 1.0;
  for (std::size_t jj = p; jj-- > 0;) {
    const Vec& v = reflectors[jj];
    for (std::size_t c = 0; c < p; ++c) {
      double s = 0.0;
      for (std::size_t i = jj; i < n; ++i) s += v[i - jj] * f.q(i, c);
      s *= 2.0;
      for (std::size_t i = jj; i < n; ++i) f.q(i, c) -= s * v[i - jj];
    }
  }

  for (std::size_t i = 0; i < p; ++i) {
    if (std::abs(f.r(i, i)) <= 1e-14 * mnorm) {
      throw Error(ErrorKind::RankDeficient, "R diagonal " + std::to_string(i) + " below threshold");
    }
    if (f.r(i, i) < 0.0) {
      for (std::size_t j = i; j < p; ++j) f.r(i, j) = -f.r(i, j);
      for (std::size_t r = 0; r < n; ++r) f.q(r, i) = -f.q(r, i);
    }
  }
  return f;
}

namespace {

// Applies the 2x2 rotation G = [[c, -s], [s, c]] as H <- G^T H G on rows and
// columns (i, i+1), restricted to the ranges that can be non-zero in an upper
// Hessenberg matrix, and accumulates Z <- Z G.
void rotate_pair(Mat& h, Mat& z, std::size_t i, double c, double s) {
  const std::size_t n = h.rows();
  for (std::size_t j = i > 0 ? i - 1 : 0; j < n; ++j) {
    const double a = h(i, j);
    const double b = h(i + 1, j);
    h(i, j) = c * a + s * b;
    h(i + 1, j) = -s * a + c * b;
  }
  for (std::size_t r = 0; r < std::min(n, i + 2); ++r) {
    const double a = h(r, i);
    const double b = h(r, i + 1);
    h(r, i) = c * a + s * b;
    h(r, i + 1) = -s * a + c * b;
  }
  for (std::size_t r = 0; r < n; ++r) {
    const double a = z(r, i);
    const double b = z(r, i + 1);
    z(r, i) = c * a + s * b;
    z(r, i + 1) = -s * a + c * b;
  }
}

// Splits a 2x2 diagonal block with real eigenvalues into triangular form.
void standardize_block(Mat& h, Mat& z, std::size_t m) {
  const double a = h(m, m), b = h(m, m + 1), c = h(m + 1, m), d = h(m + 1, m + 1);
  if (c == 0.0) return;
  const double p = 0.5 * (a - d);
  const double disc = p * p + b * c;
  if (disc < 0.0) return;
  const double root = std::sqrt(disc);
  // Eigenvector (lambda - d, c) for lambda = d + p +/- root; pick the sign that avoids cancellation.
  const double zeta = p >= 0.0 ? p + root : p - root;
  const double nrm = std::hypot(zeta, c);
  rotate_pair(h, z, m, zeta / nrm, c / nrm);
  h(m + 1, m) = 0.0;
}

std::complex<double> block_eig(double a, double b, double c, double d, bool upper) {
  const double p = 0.5 * (a - d);
  const double disc = p * p + b * c;
  const double mid = 0.5 * (a + d);
  if (disc >= 0.0) return {upper ? mid + std::sqrt(disc) : mid - std::sqrt(disc), 0.0};
  return {mid, upper ? std::sqrt(-disc) : -std::sqrt(-disc)};
}

}  // namespace

RealSchur real_schur(const Mat& m, int max_sweeps) {
  if (!m.square() || m.empty()) throw Error(ErrorKind::DimensionMismatch, "real_schur needs a square matrix");
  const std::size_t n = m.rows();
  if (n > 32) throw Error(ErrorKind::DimensionMismatch, "real_schur is limited to dimension 32");
  if (!m.all_finite()) throw Error(ErrorKind::NoConvergence, "non-finite input");

  Mat h = m;
  Mat z = Mat::identity(n);

  // Hessenberg reduction.
  Vec x, v;
  for (std::size_t k = 0; k + 2 < n; ++k) {
    x.resize(n - k - 1);
    for (std::size_t i = k + 1; i < n; ++i) x[i - k - 1] = h(i, k);
    double beta = 0.0;
    if (!householder(x, v, beta)) continue;
    for (std::size_t j = 0; j < n; ++j) {
      double s = 0.0;
      for (std::size_t i = k + 1; i < n; ++i) s += v[i - k - 1] * h(i, j);
      s *= 2.0;
      for (std::size_t i = k + 1; i < n; ++i) h(i, j) -= s * v[i - k - 1];
    }
    for (std::size_t r = 0; r < n; ++r) {
      double s = 0.0;
      for (std::size_t i = k + 1; i < n; ++i) s += h(r, i) * v[i - k - 1];
      s *= 2.0;
      for (std::size_t i = k + 1; i < n; ++i) h(r, i) -= s * v[i - k - 1];
      double t = 0.0;
      for (std::size_t i = k + 1; i < n; ++i) t += z(r, i) * v[i - k - 1];
      t *= 2.0;
      for (std::size_t i = k + 1; i < n; ++i) z(r, i) -= t * v[i - k - 1];
    }
    for (std::size_t i = k + 2; i < n; ++i) h(i, k) = 0.0;
  }

  const double hnorm = std::max(norm_frobenius(h), std::numeric_limits<double>::min());
  std::ptrdiff_t p = static_cast<std::ptrdiff_t>(n) - 1;
  int iter = 0;
  while (p >= 1) {
    std::ptrdiff_t l = p;
    while (l > 0) {
      double s = std::abs(h(l - 1, l - 1)) + std::abs(h(l, l));
      if (s == 0.0) s = hnorm;
      if (std::abs(h(l, l - 1)) < kEps * s) {
        h(l, l - 1) = 0.0;
        break;
      }
      --l;
    }
    if (l == p) {
      --p;
      iter = 0;
      continue;
    }
    if (l == p - 1) {
      standardize_block(h, z, static_cast<std::size_t>(l));
      p -= 2;
      iter = 0;
      continue;
    }
    if (++iter > max_sweeps) throw Error(ErrorKind::NoConvergence, "Francis QR exceeded max_sweeps");

    double s, t;
    if (iter % 10 == 0) {
      const double w = std::abs(h(p, p - 1)) + std::abs(h(p - 1, p - 2));
      const double h11 = 0.75 * w + h(p, p);
      const double h12 = -0.4375 * w;
      s = 2.0 * h11;
      t = h11 * h11 - h12 * w;
    } else {
      s = h(p - 1, p - 1) + h(p, p);
      t = h(p - 1, p - 1) * h(p, p) - h(p - 1, p) * h(p, p - 1);
    }
    double xx = h(l, l) * h(l, l) + h(l, l + 1) * h(l + 1, l) - s * h(l, l) + t;
    double yy = h(l + 1, l) * (h(l, l) + h(l + 1, l + 1) - s);
    double zz = h(l + 1, l) * h(l + 2, l + 1);

    for (std::ptrdiff_t k = l; k <= p - 2; ++k) {
      const double vec3[3] = {xx, yy, zz};
      double beta = 0.0;
      if (householder(vec3, v, beta)) {
        const std::size_t c0 = static_cast<std::size_t>(k > l ? k - 1 : l);
        for (std::size_t j = c0; j < n; ++j) {
          double sum = 0.0;
          for (int i = 0; i < 3; ++i) sum += v[i] * h(k + i, j);
          sum *= 2.0;
          for (int i = 0; i < 3; ++i) h(k + i, j) -= sum * v[i];
        }
        const std::size_t r1 = static_cast<std::size_t>(std::min(k + 3, p));
        for (std::size_t r = 0; r <= r1; ++r) {
          double sum = 0.0;
          for (int i = 0; i < 3; ++i) sum += h(r, k + i) * v[i];
          sum *= 2.0;
          for (int i = 0; i < 3; ++i) h(r, k + i) -= sum * v[i];
        }
        for (std::size_t r = 0; r < n; ++r) {
          double sum = 0.0;
          for (int i = 0; i < 3; ++i) sum += z(r, k + i) * v[i];
          sum *= 2.0;
          for (int i = 0; i < 3; ++i) z(r, k + i) -= sum * v[i];
        }
        if (k > l) {
          h(k + 1, k - 1) = 0.0;
          h(k + 2, k - 1) = 0.0;
        }
      }
      xx = h(k + 1, k);
      yy = h(k + 2, k);
      if (k < p - 2) zz = h(k + 3, k);
    }
    // Closing 2-reflector on rows p-1, p as a Givens rotation.
    const double r = std::hypot(xx, yy);
    if (r > 0.0) {
      rotate_pair(h, z, static_cast<std::size_t>(p - 1), xx / r, yy / r);
      h(p, p - 2) = 0.0;
    }
  }

  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j + 1 < i; ++j) h(i, j) = 0.0;

  RealSchur out{z, h, {}};
  out.eigs.reserve(n);
  for (std::size_t i = 0; i < n;) {
    if (i + 1 < n && h(i + 1, i) != 0.0) {
      const double a = h(i, i), b = h(i, i + 1), c = h(i + 1, i), d = h(i + 1, i + 1);
      out.eigs.push_back(block_eig(a, b, c, d, true));
      out.eigs.push_back(block_eig(a, b, c, d, false));
      i += 2;
    } else {
      out.eigs.emplace_back(h(i, i), 0.0);
      ++i;
    }
  }
  return out;
}

namespace {

// Diagonal similarity by powers of two equalizing row and column norms.
Mat balance(Mat a) {
  const std::size_t n = a.rows();
  bool converged = false;
  for (int sweep = 0; sweep < 50 && !converged; ++sweep) {
    converged = true;
    for (std::size_t i = 0; i < n; ++i) {
      double c = 0.0, r = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i) continue;
        c += std::abs(a(j, i));
        r += std::abs(a(i, j));
      }
      if (c == 0.0 || r == 0.0) continue;
      double f = 1.0;
      const double total = c + r;
      while (c < r / 2.0) {
        c *= 2.0;
        r /= 2.0;
        f *= 2.0;
      }
      while (c >= r * 2.0) {
        c /= 2.0;
        r *= 2.0;
        f /= 2.0;
      }
      if ((c + r) < 0.95 * total) {
        converged = false;
        for (std::size_t j = 0; j < n; ++j) {
          a(i, j) /= f;
          a(j, i) *= f;
        }
      }
    }
  }
  return a;
}

}  // namespace

std::vector<std::complex<double>> eigenvalues(const Mat& m) {
  if (!m.square()) throw Error(ErrorKind::DimensionMismatch, "eigenvalues need a square matrix");
  return real_schur(balance(m)).eigs;
}

double spectral_radius(const Mat& m) {
  double r = 0.0;
  for (const auto& e : eigenvalues(m)) r = std::max(r, std::abs(e));
  return r;
}

Mat kron(const Mat& a, const Mat& b) {
  Mat k(a.rows() * b.rows(), a.cols() * b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) {
      const double aij = a(i, j);
      for (std::size_t p = 0; p < b.rows(); ++p)
        for (std::size_t q = 0; q < b.cols(); ++q) k(i * b.rows() + p, j * b.cols() + q) = aij * b(p, q);
    }
  return k;
}

Mat solve(const Mat& a, const Mat& rhs) {
  if (!a.square()) throw Error(ErrorKind::DimensionMismatch, "solve needs a square matrix");
  if (rhs.rows() != a.rows()) throw Error(ErrorKind::DimensionMismatch, "solve rhs rows");
  const std::size_t n = a.rows();
  const double anorm = norm_max(a);
  if (anorm == 0.0 || !std::isfinite(anorm)) throw Error(ErrorKind::Singular, "zero or non-finite matrix");

  Mat lu = a;
  Mat x = rhs;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::abs(lu(i, k)) > std::abs(lu(piv, k))) piv = i;
    if (std::abs(lu(piv, k)) <= 1e-14 * anorm) {
      throw Error(ErrorKind::Singular, "pivot " + std::to_string(k) + " below threshold");
    }
    if (piv != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(lu(k, j), lu(piv, j));
      for (std::size_t j = 0; j < x.cols(); ++j) std::swap(x(k, j), x(piv, j));
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      const double f = lu(i, k) / lu(k, k);
      lu(i, k) = f;
      for (std::size_t j = k + 1; j < n; ++j) lu(i, j) -= f * lu(k, j);
      for (std::size_t j = 0; j < x.cols(); ++j) x(i, j) -= f * x(k, j);
    }
  }
  for (std::size_t kk = n; kk-- > 0;) {
    for (std::size_t j = 0; j < x.cols(); ++j) {
      double s = x(kk, j);
      for (std::size_t c = kk + 1; c < n; ++c) s -= lu(kk, c) * x(c, j);
      x(kk, j) = s / lu(kk, kk);
    }
  }
  return x;
}

Vec solve(const Mat& a, std::span<const double> rhs) { return solve(a, Mat::column(rhs)).col(0); }

Mat inverse(const Mat& a) { return solve(a, Mat::identity(a.rows())); }

Vec null_vector(const Mat& m) {
  if (!m.square() || m.empty()) throw Error(ErrorKind::DimensionMismatch, "null_vector needs a square matrix");
  const std::size_t n = m.rows();
  // Column-pivoted Householder QR of m^T; the last column of the full Q is
  // orthogonal to the row space of m.
  Mat a = m.transpose();
  Mat q = Mat::identity(n);
  Vec colnorm(n);
  Vec x, v;
  for (std::size_t j = 0; j + 1 < n; ++j) {
    for (std::size_t c = j; c < n; ++c) {
      double s = 0.0;
      for (std::size_t i = j; i < n; ++i) s += a(i, c) * a(i, c);
      colnorm[c] = s;
    }
    const auto best = static_cast<std::size_t>(
        std::max_element(colnorm.begin() + static_cast<std::ptrdiff_t>(j), colnorm.end()) - colnorm.begin());
    if (best != j)
      for (std::size_t i = 0; i < n; ++i) std::swap(a(i, j), a(i, best));
    x.resize(n - j);
    for (std::size_t i = j; i < n; ++i) x[i - j] = a(i, j);
    double beta = 0.0;
    if (!householder(x, v, beta)) continue;
    for (std::size_t c = j; c < n; ++c) {
      double s = 0.0;
      for (std::size_t i = j; i < n; ++i) s += v[i - j] * a(i, c);
      s *= 2.0;
      for (std::size_t i = j; i < n; ++i) a(i, c) -= s * v[i - j];
    }
    for (std::size_t r = 0; r < n; ++r) {
      double s = 0.0;
      for (std::size_t i = j; i < n; ++i) s += q(r, i) * v[i - j];
      s *= 2.0;
      for (std::size_t i = j; i < n; ++i) q(r, i) -= s * v[i - j];
    }
  }
  return q.col(n - 1);
}

Mat orthogonal_complement(std::span<const double> u) {
  const std::size_t n = u.size();
  if (n == 0) throw Error(ErrorKind::DimensionMismatch, "empty vector");
  Vec v;
  double beta = 0.0;
  if (!householder(u, v, beta)) throw Error(ErrorKind::ZeroVector, "orthogonal complement of zero vector");
  Mat basis(n, n - 1);
  for (std::size_t c = 1; c < n; ++c)
    for (std::size_t r = 0; r < n; ++r) basis(r, c - 1) = (r == c ? 1.0 : 0.0) - 2.0 * v[r] * v[c];
  return basis;
}

}  // namespace glmstab
