#pragma once

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace glmstab {

using Vec = std::vector<double>;

/// Small dense real matrix, row-major. Sized for GLM work (k, r, d of a few
/// units), not for large problems.
class Mat {
 public:
  Mat() = default;
  Mat(std::size_t rows, std::size_t cols, double fill = 0.0);
  Mat(std::initializer_list<std::initializer_list<double>> rows);

  static Mat identity(std::size_t n);
  static Mat column(std::span<const double> v);
  static Mat diag(std::span<const double> v);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool empty() const noexcept { return rows_ == 0 || cols_ == 0; }
  bool square() const noexcept { return rows_ == cols_; }

  double& operator()(std::size_t i, std::size_t j) noexcept { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * cols_ + j]; }

  std::span<const double> data() const noexcept { return data_; }
  std::span<double> data() noexcept { return data_; }

  Mat transpose() const;
  Vec col(std::size_t j) const;
  void set_col(std::size_t j, std::span<const double> v);
  Mat block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const;
  void set_block(std::size_t r0, std::size_t c0, const Mat& b);

  Mat& operator+=(const Mat& o);
  Mat& operator-=(const Mat& o);
  Mat& operator*=(double s);

  bool all_finite() const noexcept;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

Mat operator+(Mat a, const Mat& b);
Mat operator-(Mat a, const Mat& b);
Mat operator*(Mat a, double s);
Mat operator*(double s, Mat a);
Mat operator*(const Mat& a, const Mat& b);
Vec operator*(const Mat& a, std::span<const double> x);

double norm_max(const Mat& m) noexcept;
double norm_frobenius(const Mat& m) noexcept;
double norm2(std::span<const double> v) noexcept;
double trace(const Mat& m);

/// Largest |entry| of a - b; dimensions must agree.
double max_abs_diff(const Mat& a, const Mat& b);

struct QrFactors {
  Mat q;  // orthonormal columns, rows x cols
  Mat r;  // upper triangular, strictly positive diagonal
};

/// Thin Householder QR with the sign convention r_ii > 0.
/// Throws RankDeficient when a diagonal of r falls below 1e-14 * ||m||.
QrFactors qr_positive(const Mat& m);

struct RealSchur {
  Mat orth;
  Mat quasi_tri;
  std::vector<std::complex<double>> eigs;
};

/// Real Schur form via Hessenberg reduction and Francis double-shift QR.
/// 2x2 diagonal blocks remain only for complex-conjugate pairs. max_sweeps
/// bounds the iterations spent on any single eigenvalue.
RealSchur real_schur(const Mat& m, int max_sweeps = 60);

std::vector<std::complex<double>> eigenvalues(const Mat& m);
double spectral_radius(const Mat& m);

Mat kron(const Mat& a, const Mat& b);

/// Partial-pivot LU solve of a * x = rhs. Throws Singular on a pivot below
/// 1e-14 * ||a||.
Mat solve(const Mat& a, const Mat& rhs);
Vec solve(const Mat& a, std::span<const double> rhs);
Mat inverse(const Mat& a);

/// Unit vector spanning the (assumed one-dimensional) null space of m.
Vec null_vector(const Mat& m);

/// Orthonormal basis of the orthogonal complement of u, as the columns of a
/// n x (n-1) matrix.
Mat orthogonal_complement(std::span<const double> u);

}  // namespace glmstab
