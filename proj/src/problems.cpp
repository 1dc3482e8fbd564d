#include "glmstab/problems.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <sstream>

#include "glmstab/error.hpp"
#include "json.hpp"

namespace glmstab {

namespace {

using std::numbers::pi;

// 8-point Gauss-Legendre nodes and weights on [-1, 1] (positive half).
constexpr std::array<double, 4> kGlNodes{0.1834346424956498, 0.5255324099163290, 0.7966664774136267,
                                         0.9602898564975363};
constexpr std::array<double, 4> kGlWeights{0.3626837833783620, 0.3137066458778873, 0.2223810344533745,
                                           0.1012285362903763};

Mat expm(const Mat& a) {
  const std::size_t n = a.rows();
  const double nrm = norm_max(a) * static_cast<double>(n);
  int squarings = 0;
  if (nrm > 0.5) squarings = static_cast<int>(std::ceil(std::log2(nrm / 0.5)));
  const Mat scaled = a * std::ldexp(1.0, -squarings);
  Mat result = Mat::identity(n);
  Mat term = Mat::identity(n);
  for (int k = 1; k <= 20; ++k) {
    term = term * scaled;
    term *= 1.0 / k;
    result += term;
  }
  for (int s = 0; s < squarings; ++s) result = result * result;
  return result;
}

double rc_gexp(double a, double b, double t) { return a * std::sin(t) + b * t; }

Vec rc_flow_with(const RotatingCosineParams& p, std::span<const double> x_s, double s, double t,
                 std::size_t panels) {
  const double rate = p.rotation_rate();
  const Vec y = rotation(rate * s).transpose() * x_s;
  const double g1s = rc_gexp(p.a1, p.b1, s), g1t = rc_gexp(p.a1, p.b1, t);
  const double g2s = rc_gexp(p.a2, p.b2, s), g2t = rc_gexp(p.a2, p.b2, t);
  const double y2 = y[1] * std::exp(g2t - g2s);
  double y1 = y[0] * std::exp(g1t - g1s);
  if (p.beta != 0.0 && y[1] != 0.0 && t != s) {
    const auto integrand = [&](double tau) {
      return std::exp(g1t - rc_gexp(p.a1, p.b1, tau) + rc_gexp(p.a2, p.b2, tau) - g2s);
    };
    y1 += p.beta * y[1] * gauss_legendre(integrand, s, t, panels);
  }
  const Vec yt{y1, y2};
  return rotation(rate * t) * std::span<const double>(yt);
}

void check_resolution(std::span<const double> coarse, std::span<const double> fine, const char* what) {
  double diff = 0.0;
  for (std::size_t i = 0; i < coarse.size(); ++i) diff = std::max(diff, std::abs(coarse[i] - fine[i]));
  const double scale = std::max(norm2(fine), 1e-300);
  if (!(diff <= 1e-10 * scale)) throw Error(ErrorKind::QuadratureUnderResolved, what);
}

}  // namespace

double RotatingCosineParams::rotation_rate() const {
  return resonant_h ? 2.0 * pi / *resonant_h : omega_rate;
}

std::vector<std::string> RotatingCosineParams::warnings() const {
  std::vector<std::string> out;
  if (!(b2 < b1 && b1 < 0.0)) out.emplace_back("offsets do not satisfy b2 < b1 < 0");
  if (!(a1 > 0.0 && a2 > 0.0)) out.emplace_back("amplitudes are not both positive");
  return out;
}

OdeSystem as_system(const LinearProblem& prob) {
  OdeSystem sys;
  sys.dim = prob.dim;
  auto coef = prob.coefficient;
  sys.f = [coef](std::span<const double> x, double t) { return coef(t) * x; };
  sys.jac = [coef](std::span<const double>, double t) { return coef(t); };
  return sys;
}

Mat rotation(double angle) {
  const double c = std::cos(angle), s = std::sin(angle);
  return Mat{{c, -s}, {s, c}};
}

Mat rotating_cosine_B(const RotatingCosineParams& p, double t) {
  const double ct = std::cos(t);
  return Mat{{p.a1 * ct + p.b1, p.beta}, {0.0, p.a2 * ct + p.b2}};
}

Mat rotating_cosine_A(const RotatingCosineParams& p, double t) {
  const double rate = p.rotation_rate();
  const Mat q = rotation(rate * t);
  Mat a = q * rotating_cosine_B(p, t) * q.transpose();
  a(0, 1) -= rate;
  a(1, 0) += rate;
  return a;
}

double gauss_legendre(const std::function<double(double)>& f, double a, double b, std::size_t panels) {
  if (panels == 0) panels = 1;
  const double width = (b - a) / static_cast<double>(panels);
  double total = 0.0;
  for (std::size_t k = 0; k < panels; ++k) {
    const double mid = a + (static_cast<double>(k) + 0.5) * width;
    const double half = 0.5 * width;
    double s = 0.0;
    for (std::size_t i = 0; i < kGlNodes.size(); ++i)
      s += kGlWeights[i] * (f(mid - half * kGlNodes[i]) + f(mid + half * kGlNodes[i]));
    total += half * s;
  }
  return total;
}

std::size_t default_panels(double span) {
  return std::max<std::size_t>(2, static_cast<std::size_t>(std::ceil(std::abs(span) * 4.0)));
}

Vec rotating_cosine_flow(const RotatingCosineParams& p, std::span<const double> x_s, double s, double t,
                         std::size_t panels) {
  if (x_s.size() != 2) throw Error(ErrorKind::DimensionMismatch, "rotating-cosine state must be 2-dimensional");
  if (panels == 0) panels = 1;
  const Vec coarse = rc_flow_with(p, x_s, s, t, panels);
  Vec fine = rc_flow_with(p, x_s, s, t, 2 * panels);
  check_resolution(coarse, fine, "rotating-cosine variation-of-constants integral");
  return fine;
}

Vec reference_solution(const RotatingCosineParams& p, double t, std::size_t quad_points) {
  const Vec x0{1.0, 0.0};
  return rotating_cosine_flow(p, x0, 0.0, t, quad_points);
}

LinearProblem rotating_cosine_problem(const RotatingCosineParams& p) {
  LinearProblem prob;
  prob.name = "rotating_cosine";
  prob.dim = 2;
  prob.coefficient = [p](double t) { return rotating_cosine_A(p, t); };
  prob.flow = [p](std::span<const double> x, double s, double t) {
    return rotating_cosine_flow(p, x, s, t, default_panels(t - s));
  };
  if (p.a1 == p.a2 && p.b1 != p.b2) {
    const double lo = std::min(p.b1, p.b2), hi = std::max(p.b1, p.b2);
    prob.sacker_sell = std::vector<std::pair<double, double>>{{hi - p.a1, hi + p.a1}, {lo - p.a1, lo + p.a1}};
  }
  return prob;
}

double scalar_cosine_lambda(const ScalarCosineParams& p, double t) {
  return p.amp * std::cos(p.freq * t) + p.offset;
}

double mean_xi(const ScalarCosineParams& p, long n, double h) {
  if (p.freq == 0.0) return p.amp + p.offset;
  const double nd = static_cast<double>(n);
  return p.offset + p.amp * (std::sin(p.freq * (nd + 1.0) * h) - std::sin(p.freq * nd * h)) / (p.freq * h);
}

LinearProblem scalar_cosine_problem(const ScalarCosineParams& p) {
  LinearProblem prob;
  prob.name = "scalar_cosine";
  prob.dim = 1;
  prob.coefficient = [p](double t) { return Mat{{scalar_cosine_lambda(p, t)}}; };
  prob.flow = [p](std::span<const double> x, double s, double t) {
    double integral = p.offset * (t - s);
    integral += p.freq == 0.0 ? p.amp * (t - s) : p.amp * (std::sin(p.freq * t) - std::sin(p.freq * s)) / p.freq;
    return Vec{x[0] * std::exp(integral)};
  };
  prob.sacker_sell = std::vector<std::pair<double, double>>{{p.offset - std::abs(p.amp), p.offset + std::abs(p.amp)}};
  return prob;
}

LinearProblem constant_problem(const Mat& a) {
  if (!a.square() || a.empty()) throw Error(ErrorKind::Config, "constant coefficient must be a square matrix");
  LinearProblem prob;
  prob.name = "constant";
  prob.dim = a.rows();
  prob.coefficient = [a](double) { return a; };
  prob.flow = [a](std::span<const double> x, double s, double t) { return expm(a * (t - s)) * x; };
  return prob;
}

double tanh_rhs(const TanhForcedParams& p, double x, double t) { return p.a * x + std::tanh(t * t); }

OdeSystem tanh_forced_system(const TanhForcedParams& p) {
  OdeSystem sys;
  sys.dim = 1;
  sys.f = [p](std::span<const double> x, double t) { return Vec{tanh_rhs(p, x[0], t)}; };
  sys.jac = [p](std::span<const double>, double) { return Mat{{p.a}}; };
  return sys;
}

double tanh_forced_reference(const TanhForcedParams& p, double x_s, double s, double t, std::size_t panels) {
  const auto integrand = [&](double tau) { return std::exp(p.a * (t - tau)) * std::tanh(tau * tau); };
  const double homogeneous = std::exp(p.a * (t - s)) * x_s;
  const double coarse = homogeneous + gauss_legendre(integrand, s, t, panels);
  const double fine = homogeneous + gauss_legendre(integrand, s, t, 2 * panels);
  const double c[1] = {coarse}, f[1] = {fine};
  check_resolution(c, f, "tanh-forced variation-of-constants integral");
  return fine;
}

std::optional<std::string> check_bounded(const LinearProblem& prob, double t0, double t1, std::size_t samples,
                                         double bound) {
  if (samples < 2) samples = 2;
  for (std::size_t i = 0; i < samples; ++i) {
    const double t = t0 + (t1 - t0) * static_cast<double>(i) / static_cast<double>(samples - 1);
    const Mat a = prob.A(t);
    if (!a.all_finite() || norm_max(a) > bound) {
      std::ostringstream msg;
      msg << "coefficient of " << prob.name << " is not bounded by " << bound << " at t = " << t;
      return msg.str();
    }
  }
  return std::nullopt;
}

LinearProblem ProblemConfig::make() const {
  LinearProblem prob = type == "constant" ? constant_problem(constant) : rotating_cosine_problem(rotating);
  if (x0.size() != prob.dim) throw Error(ErrorKind::Config, "x0 does not match the problem dimension");
  return prob;
}

namespace {

double number_at(const nlohmann::json& j, const char* key) {
  const auto& v = j.at(key);
  if (!v.is_number()) throw Error(ErrorKind::Config, std::string("key '") + key + "' must be a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw Error(ErrorKind::Config, std::string("key '") + key + "' must be finite");
  return d;
}

Vec vector_from(const nlohmann::json& v, const char* key) {
  if (!v.is_array()) throw Error(ErrorKind::Config, std::string("key '") + key + "' must be an array");
  Vec out;
  for (const auto& e : v) {
    if (!e.is_number()) throw Error(ErrorKind::Config, std::string("key '") + key + "' must hold numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

}  // namespace

ProblemConfig problem_config_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::Config, std::string("problem block is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw Error(ErrorKind::Config, "problem block must be a JSON object");
  static const char* const allowed[] = {"type", "a1", "a2", "b1", "b2", "beta", "omega_rate",
                                        "resonant_h", "t0", "x0", "A"};
  for (const auto& [key, value] : j.items()) {
    if (std::find(std::begin(allowed), std::end(allowed), key) == std::end(allowed))
      throw Error(ErrorKind::Config, "unknown problem key '" + key + "'");
  }
  ProblemConfig cfg;
  if (j.contains("type")) {
    if (!j["type"].is_string()) throw Error(ErrorKind::Config, "key 'type' must be a string");
    cfg.type = j["type"].get<std::string>();
    if (cfg.type != "rotating_cosine" && cfg.type != "constant")
      throw Error(ErrorKind::Config, "unknown problem type '" + cfg.type + "'");
  }
  RotatingCosineParams& p = cfg.rotating;
  if (j.contains("a1")) p.a1 = number_at(j, "a1");
  if (j.contains("a2")) p.a2 = number_at(j, "a2");
  if (j.contains("b1")) p.b1 = number_at(j, "b1");
  if (j.contains("b2")) p.b2 = number_at(j, "b2");
  if (j.contains("beta")) p.beta = number_at(j, "beta");
  if (j.contains("omega_rate")) p.omega_rate = number_at(j, "omega_rate");
  if (j.contains("resonant_h") && !j["resonant_h"].is_null()) {
    p.resonant_h = number_at(j, "resonant_h");
    if (!(*p.resonant_h > 0.0)) throw Error(ErrorKind::Config, "resonant_h must be positive");
  }
  if (j.contains("t0")) cfg.t0 = number_at(j, "t0");
  if (cfg.type == "constant") {
    if (!j.contains("A")) throw Error(ErrorKind::Config, "constant problem needs key 'A'");
    const auto& rows = j["A"];
    if (!rows.is_array() || rows.empty()) throw Error(ErrorKind::Config, "key 'A' must be a non-empty array of rows");
    const std::size_t n = rows.size();
    cfg.constant = Mat(n, n);
    for (std::size_t i = 0; i < n; ++i) {
      const Vec r = vector_from(rows[i], "A");
      if (r.size() != n) throw Error(ErrorKind::Config, "key 'A' must be square");
      for (std::size_t c = 0; c < n; ++c) cfg.constant(i, c) = r[c];
    }
    cfg.x0 = Vec(n, 0.0);
    cfg.x0[0] = 1.0;
  }
  if (j.contains("x0")) cfg.x0 = vector_from(j["x0"], "x0");
  const std::size_t dim = cfg.type == "constant" ? cfg.constant.rows() : 2;
  if (cfg.x0.size() != dim) throw Error(ErrorKind::Config, "x0 does not match the problem dimension");
  return cfg;
}

std::string to_json(const ProblemConfig& cfg) {
  nlohmann::ordered_json j;
  j["type"] = cfg.type;
  if (cfg.type == "constant") {
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < cfg.constant.rows(); ++i) {
      nlohmann::ordered_json r = nlohmann::ordered_json::array();
      for (std::size_t c = 0; c < cfg.constant.cols(); ++c) r.push_back(cfg.constant(i, c));
      rows.push_back(r);
    }
    j["A"] = rows;
  } else {
    const RotatingCosineParams& p = cfg.rotating;
    j["a1"] = p.a1;
    j["a2"] = p.a2;
    j["b1"] = p.b1;
    j["b2"] = p.b2;
    j["beta"] = p.beta;
    j["omega_rate"] = p.omega_rate;
    j["resonant_h"] = p.resonant_h ? nlohmann::ordered_json(*p.resonant_h) : nlohmann::ordered_json(nullptr);
  }
  j["t0"] = cfg.t0;
  j["x0"] = cfg.x0;
  return j.dump();
}

}  // namespace glmstab
