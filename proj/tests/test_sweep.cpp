#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <atomic>
#include <cstring>
#include <stdexcept>

#include "glmstab/error.hpp"
#include "glmstab/sweep.hpp"

using namespace glmstab;

namespace {

bool bitwise_equal(const std::vector<double>& a, const std::vector<double>& b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

}  // namespace

TEST_CASE("for_each_index visits every index once") {
  for (Exec e : {Exec::Serial, Exec::Parallel}) {
    std::vector<std::atomic<int>> hits(1000);
    for_each_index(hits.size(), [&](std::size_t i) { hits[i]++; }, e);
    for (const auto& h : hits) CHECK(h.load() == 1);
  }
  CHECK(worker_threads() >= 1);
}

TEST_CASE("map_indices preserves order") {
  const auto sq = map_indices<double>(257, [](std::size_t i) { return static_cast<double>(i * i); }, Exec::Parallel);
  for (std::size_t i = 0; i < sq.size(); ++i) CHECK(sq[i] == static_cast<double>(i * i));
}

TEST_CASE("the lowest failing index is rethrown in both modes") {
  for (Exec e : {Exec::Serial, Exec::Parallel}) {
    try {
      for_each_index(500, [](std::size_t i) {
        if (i % 97 == 13) throw Error(ErrorKind::Singular, "at " + std::to_string(i));
      }, e);
      FAIL("expected an exception");
    } catch (const Error& err) {
      CHECK(err.kind() == ErrorKind::Singular);
      CHECK(std::string(err.what()).find("at 13") != std::string::npos);
    }
  }
}

TEST_CASE("serial and parallel LTE series are bitwise identical") {
  const LinearProblem prob = rotating_cosine_problem({});
  for (const auto& name : tableau_names()) {
    const GlmTableau tab = tableau_by_name(name);
    const double h = 0.05;
    const Vec x0{1.0, 0.0};
    const auto a = lte_series_exact(tab, prob, x0, 0.0, h, 300, Exec::Serial);
    const auto b = lte_series_exact(tab, prob, x0, 0.0, h, 300, Exec::Parallel);
    CHECK(bitwise_equal(a, b));
    CHECK(a.size() == 300);

    Trajectory traj(h, 0.0, 2, start_rk4(as_system(prob), x0, 0.0, h, tab.k), "rk4", prob.name);
    advance_linear(traj, tab, prob, 300);
    const auto c = lte_series_local(tab, prob, traj, Exec::Serial);
    const auto d = lte_series_local(tab, prob, traj, Exec::Parallel);
    CHECK(bitwise_equal(c, d));
    CHECK(c.size() == 300);
  }
}

TEST_CASE("exact series entries equal individual probes") {
  const LinearProblem prob = rotating_cosine_problem({});
  const GlmTableau tab = bdf2_tableau();
  const Vec x0{1.0, 0.0};
  const auto s = lte_series_exact(tab, prob, x0, 0.0, 0.1, 40, Exec::Parallel);
  for (std::size_t n : {0u, 7u, 39u}) CHECK(s[n] == doctest::Approx(lte_probe(tab, prob, x0, n, 0.1, 0.0)).epsilon(1e-10));
}
