#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include <nlohmann/json.hpp>

#include "glmstab/error.hpp"
#include "glmstab/spectra.hpp"

using namespace glmstab;

namespace {

// Determinant by elimination with partial pivoting, independent of the library solver.
double det(Mat m) {
  const std::size_t n = m.rows();
  double out = 1.0;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::abs(m(r, c)) > std::abs(m(piv, c))) piv = r;
    if (m(piv, c) == 0.0) return 0.0;
    if (piv != c) {
      for (std::size_t j = 0; j < n; ++j) std::swap(m(c, j), m(piv, j));
      out = -out;
    }
    out *= m(c, c);
    for (std::size_t r = c + 1; r < n; ++r) {
      const double f = m(r, c) / m(c, c);
      for (std::size_t j = c; j < n; ++j) m(r, j) -= f * m(c, j);
    }
  }
  return out;
}

QrTrail trail_from_log(const std::vector<double>& inc, double h) {
  QrTrail t = QrTrail::identity(1, 1, h, 0.0);
  for (double x : inc) t.log_r.push_back(Vec{x});
  return t;
}

// Exact per-step integrals of a cos t + b over a uniform grid.
std::vector<double> cosine_increments(double a, double b, double h, std::size_t n) {
  std::vector<double> out(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double t = static_cast<double>(j) * h;
    out[j] = a * (std::sin(t + h) - std::sin(t)) + b * h;
  }
  return out;
}

}  // namespace

TEST_CASE("qr_advance on a diagonal map") {
  QrTrail t = QrTrail::identity(2, 2, 0.1, 0.0);
  qr_advance(t, Mat{{2.0, 0.0}, {0.0, 3.0}});
  REQUIRE(t.steps() == 1);
  CHECK(t.log_r[0][0] == doctest::Approx(std::log(2.0)));
  CHECK(t.log_r[0][1] == doctest::Approx(std::log(3.0)));
  CHECK(max_abs_diff(t.frame, Mat::identity(2)) < 1e-15);
}

TEST_CASE("property: log R telescopes to log |det| and frames stay orthonormal") {
  std::mt19937_64 gen(53);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 2 + trial % 3;
    QrTrail t = QrTrail::random(n, n, 1000 + trial, 0.1, 0.0);
    double log_det = std::log(std::abs(det(t.frame)));
    for (int s = 0; s < 20; ++s) {
      Mat phi(n, n);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) phi(i, j) = g(gen) + (i == j ? 2.0 : 0.0);
      log_det += std::log(std::abs(det(phi)));
      qr_advance(t, phi);
    }
    double sum = 0.0;
    for (const auto& r : t.log_r)
      for (double x : r) sum += x;
    CHECK(sum == doctest::Approx(log_det - std::log(std::abs(det(t.frame)))).epsilon(1e-9));
    CHECK(max_abs_diff(t.frame.transpose() * t.frame, Mat::identity(n)) < 1e-13);
  }
}

TEST_CASE("frame orthonormality survives 1e5 steps") {
  const double c = std::cos(0.3), s = std::sin(0.3);
  const Mat phi = Mat{{c, -s}, {s, c}} * Mat{{1.01, 0.2}, {0.0, 0.97}};
  QrTrail t = QrTrail::identity(2, 2, 0.01, 0.0);
  for (int n = 0; n < 100000; ++n) qr_advance(t, phi);
  CHECK(max_abs_diff(t.frame.transpose() * t.frame, Mat::identity(2)) < 1e-12);
  double sum0 = 0.0, sum1 = 0.0;
  for (const auto& r : t.log_r) {
    sum0 += r[0];
    sum1 += r[1];
  }
  CHECK(sum0 + sum1 == doctest::Approx(100000 * std::log(std::abs(det(phi)))).epsilon(1e-9));
}

TEST_CASE("with_frame rejects rank deficient frames") {
  try {
    QrTrail::with_frame(Mat{{1.0, 2.0}, {2.0, 4.0}}, 0.1, 0.0);
    FAIL("expected RankDeficient");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::RankDeficient);
  }
}

TEST_CASE("vector trail records log norm ratios") {
  QrTrail t = QrTrail::from_vector(Vec{3.0, 4.0}, 0.1, 0.0);
  qr_advance_vector(t, Vec{6.0, 8.0});
  qr_advance_vector(t, Vec{0.6, 0.8});
  CHECK(t.log_r[0][0] == doctest::Approx(std::log(2.0)));
  CHECK(t.log_r[1][0] == doctest::Approx(std::log(0.1)));
  CHECK(t.last_log_norm == doctest::Approx(0.0).scale(1.0));
  CHECK(t.modes() == 1);
}

TEST_CASE("mu_appr of a constant growth rate is that rate for every option") {
  const double c = -0.37, h = 0.05;
  const QrTrail t = trail_from_log(std::vector<double>(400, c * h), h);
  CHECK(mu_appr(t, 100, 300).mu[0] == doctest::Approx(c).epsilon(1e-12));
  CHECK(mu_appr(t, 100, 300, {SumStart::BurnIn, Denominator::FromBurnIn}).mu[0] == doctest::Approx(c).epsilon(1e-12));
  CHECK(mu_appr(t, 0, 400, {SumStart::Origin, Denominator::FromBurnIn}).mu[0] == doctest::Approx(c).epsilon(1e-12));
  CHECK(window_average(t, 10, 50)[0] == doctest::Approx(c));
}

TEST_CASE("mu_appr hand-computed example") {
  const QrTrail t = trail_from_log({1.0, 3.0, -2.0, 0.0}, 1.0);
  const LyapunovEstimate a = mu_appr(t, 0, 4);
  CHECK(a.mu[0] == doctest::Approx(2.0));
  CHECK(a.argmax[0] == 2);
  const LyapunovEstimate b = mu_appr(t, 2, 2, {SumStart::BurnIn, Denominator::FromBurnIn});
  CHECK(b.mu[0] == doctest::Approx(-1.0));
  CHECK(b.argmax[0] == 4);
  const LyapunovEstimate c = mu_appr(t, 2, 2, {SumStart::Origin, Denominator::FromBurnIn});
  CHECK(c.mu[0] == doctest::Approx(2.0));
  const LyapunovEstimate d = mu_appr(t, 2, 2, {SumStart::Origin, Denominator::FromOrigin});
  CHECK(d.mu[0] == doctest::Approx(2.0));
  CHECK(d.argmax[0] == 2);
  CHECK(window_average(t, 1, 2)[0] == doctest::Approx(0.5));
  CHECK(to_string(Denominator::FromOrigin) == "t0");
  CHECK(to_string(Denominator::FromBurnIn) == "N0");
}

TEST_CASE("mu_appr rejects windows past the trail") {
  const QrTrail t = trail_from_log({1.0, 1.0}, 1.0);
  try {
    mu_appr(t, 1, 5);
    FAIL("expected WindowOutOfRange");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::WindowOutOfRange);
  }
}

TEST_CASE("property: rescaling the map shifts every exponent by ln(c) / h") {
  std::mt19937_64 gen(59);
  std::normal_distribution<double> g;
  const double h = 0.1;
  QrTrail a = QrTrail::identity(2, 2, h, 0.0), b = a;
  for (int s = 0; s < 200; ++s) {
    Mat phi{{1.0 + 0.1 * g(gen), 0.1 * g(gen)}, {0.1 * g(gen), 0.9 + 0.1 * g(gen)}};
    qr_advance(a, phi);
    qr_advance(b, 2.5 * phi);
  }
  const Vec wa = window_average(a, 0, 200), wb = window_average(b, 0, 200);
  for (int i = 0; i < 2; ++i) CHECK(wb[i] - wa[i] == doctest::Approx(std::log(2.5) / h).epsilon(1e-10));
}

TEST_CASE("running_average and lyapunov_endpoints on a cosine coefficient") {
  const double a = 0.8, b = -0.3, h = 0.01;
  const std::size_t n = 5000;
  const QrTrail t = trail_from_log(cosine_increments(a, b, h, n), h);
  const auto run = running_average(t);
  REQUIRE(run.size() == n);
  double lo = 1e300, hi = -1e300;
  for (std::size_t k = 1001; k <= n; ++k) {
    const double tk = static_cast<double>(k) * h;
    const double v = b + a * std::sin(tk) / tk;
    CHECK(run[k - 1][0] == doctest::Approx(v).epsilon(1e-11));
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  const LyapunovEndpoints e = lyapunov_endpoints(t, 1000);
  CHECK(e.eta[0] == doctest::Approx(lo).epsilon(1e-11));
  CHECK(e.mu[0] == doctest::Approx(hi).epsilon(1e-11));
}

TEST_CASE("Steklov window extremes match the closed form") {
  const double a = 0.8, b = -0.3, h = 1e-3, H = 2.0;
  const QrTrail t = trail_from_log(cosine_increments(a, b, h, 20000), h);
  const SackerSellEstimate s = sacker_sell_window(t, H);
  const double half = 2.0 * a * std::abs(std::sin(H / 2)) / H;
  CHECK(s.window_steps == 2000);
  CHECK(s.alpha[0] == doctest::Approx(b - half).epsilon(1e-6));
  CHECK(s.beta[0] == doctest::Approx(b + half).epsilon(1e-6));
  try {
    sacker_sell_window(trail_from_log(cosine_increments(a, b, h, 5000), h), H);
    FAIL("expected WindowOutOfRange");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::WindowOutOfRange);
  }
}

TEST_CASE("integral separation classification") {
  const double h = 0.1;
  const std::size_t n = 2000;
  IntegralSeparationOptions opts;
  const Vec above(n, 0.5 * h), below(n, -0.5 * h);
  const PairSeparation sep = classify_pair(above, below, h, opts);
  CHECK(sep.kind == SeparationClass::Separated);
  CHECK(sep.a == doctest::Approx(1.0));
  CHECK(sep.b == doctest::Approx(0.0).scale(1.0));

  Vec wobble(n);
  for (std::size_t k = 0; k < n; ++k) wobble[k] = std::sin(static_cast<double>(k + 1) * h) - std::sin(k * h);
  const Vec zero(n, 0.0);
  CHECK(classify_pair(wobble, zero, h, opts).kind == SeparationClass::Inconclusive);
  IntegralSeparationOptions loose = opts;
  loose.eps_tol = 0.02;
  const PairSeparation bnd = classify_pair(wobble, zero, h, loose);
  CHECK(bnd.kind == SeparationClass::BoundedAverage);
  CHECK(bnd.eps <= 2.0 / 160.0 + 1e-12);
  CHECK(bnd.M > 1.0);
  CHECK(bnd.M <= 2.0 + 1e-9);
  const PairSeparation same = classify_pair(zero, zero, h, opts);
  CHECK(same.kind == SeparationClass::BoundedAverage);
  CHECK(same.M == 0.0);

  Vec flip(n);
  for (std::size_t k = 0; k < n; ++k) flip[k] = (k < n / 2 ? 0.2 : -0.2) * h;
  CHECK(classify_pair(flip, zero, h, opts).kind == SeparationClass::Inconclusive);
  CHECK(classify_pair(below, above, h, opts).kind == SeparationClass::Inconclusive);

  const IntegralSeparationReport rep = integral_separation_check({above, zero, below}, h, opts);
  CHECK(rep.pairs.size() == 3);
  CHECK(rep.horizon == doctest::Approx(200.0));
}

TEST_CASE("continuous QR oracle on an upper triangular coefficient") {
  const LinearProblem prob = constant_problem(Mat{{-1.0, 5.0}, {0.0, -2.0}});
  const ContinuousQrSeries s = continuous_qr_oracle(prob, 0.0, 3.0, 0.01, Mat::identity(2));
  CHECK(max_abs_diff(s.final_frame, Mat::identity(2)) < 1e-13);
  for (double v : s.diag[0]) CHECK(v == doctest::Approx(-1.0));
  for (double v : s.diag[1]) CHECK(v == doctest::Approx(-2.0));
}

TEST_CASE("continuous QR oracle recovers the rotating cosine diagonal") {
  RotatingCosineParams p;
  const LinearProblem prob = rotating_cosine_problem(p);
  const ContinuousQrSeries s = continuous_qr_oracle(prob, 0.0, 10.0, 1e-3, Mat::identity(2));
  for (std::size_t m = 0; m < s.times.size(); m += 97) {
    const double t = s.times[m];
    CHECK(std::abs(s.diag[0][m] - (p.a1 * std::cos(t) + p.b1)) < 1e-6);
    CHECK(std::abs(s.diag[1][m] - (p.a2 * std::cos(t) + p.b2)) < 1e-6);
  }
  CHECK(max_abs_diff(s.final_frame, rotation(10.0)) < 1e-6);
  const auto ints = integrate_series(s, 10);
  for (std::size_t n = 0; n < ints[0].size(); n += 13) {
    const double t = n * 0.01;
    CHECK(std::abs(ints[0][n] - (p.a1 * (std::sin(t + 0.01) - std::sin(t)) + p.b1 * 0.01)) < 1e-8);
  }
}

TEST_CASE("discrete trail of the flow approaches the continuous diagonal") {
  RotatingCosineParams p;
  const LinearProblem prob = rotating_cosine_problem(p);
  const double h = 0.01;
  QrTrail t = QrTrail::identity(2, 2, h, 0.0);
  Mat phi(2, 2);
  for (int n = 0; n < 500; ++n) {
    const double s = n * h;
    phi.set_col(0, (*prob.flow)(Vec{1.0, 0.0}, s, s + h));
    phi.set_col(1, (*prob.flow)(Vec{0.0, 1.0}, s, s + h));
    qr_advance(t, phi);
  }
  for (int n = 0; n < 500; n += 37) {
    const double s = n * h;
    CHECK(std::abs(t.log_r[n][0] - (p.a1 * (std::sin(s + h) - std::sin(s)) + p.b1 * h)) < 1e-10);
  }
}

TEST_CASE("estimates JSON keeps key order") {
  const std::string text = estimates_to_json({{0, -1.0, -0.9, -1.1, -0.8}}, 2.0, 0.1, Denominator::FromOrigin);
  const auto j = nlohmann::ordered_json::parse(text);
  REQUIRE(j.is_array());
  CHECK(j[0]["mode"] == 0);
  CHECK(j[0]["denominator_mode"] == "t0");
  CHECK(text.find("\"eta\"") < text.find("\"beta\""));
  CHECK(text.find("t0") != std::string::npos);
}
