#include <catch2/catch.hpp>

#include <cmath>

#include "wavedens/functions.hpp"
#include "wavedens/truth.hpp"

using namespace wavedens;

TEST_CASE("sine builtin matches its closed forms", "[functions]") {
  const AnalyticFunction fn = builtin_sine();
  REQUIRE(fn.L == 2.0);
  CHECK(fn.density(0.0) == Approx(1.0 / (kPi * kPi)).epsilon(1e-12));
  CHECK(fn.s(0.5) == Approx(0.0).margin(1e-12));
  CHECK(fn.s(1.5) == Approx(0.0).margin(1e-12));
  REQUIRE(fn.C.size() == 2);
  CHECK(fn.C[0] == Approx(-kPi));
  CHECK(fn.C[1] == Approx(kPi));
  CHECK(fn.B_true == Approx(kPi).epsilon(1e-5));
  CHECK(fn.B_true > kPi);
}

TEST_CASE("quadratic builtin matches its closed forms", "[functions]") {
  const AnalyticFunction fn = builtin_quadratic();
  CHECK(fn.density(0.5) == 1.0);
  CHECK(fn.density(-0.2) == 0.0);
  REQUIRE(fn.C.size() == 2);
  CHECK(fn.C[0] == 0.0);
  CHECK(fn.C[1] == 1.0);
  CHECK(fn.B_true == Approx(1.0 + 1e-6).epsilon(1e-12));
}

TEST_CASE("unknown builtin is rejected", "[functions]") {
  CHECK_THROWS_AS(find_builtin("cubic"), config_error);
}

TEST_CASE("functions with degenerate S'' cannot enter the catalog", "[functions]") {
  AnalyticFunction linear;
  linear.name = "linear";
  linear.L = 1.0;
  linear.S = [](double x) { return 2.0 * x; };
  linear.s = [](double) { return 2.0; };
  linear.Spp = [](double) { return 0.0; };
  CHECK_THROWS_AS(detail::check_second_derivative(linear), config_error);
}

TEST_CASE("sample evaluates S on the midpoint grid", "[functions]") {
  const AnalyticFunction sine = builtin_sine();
  const SampledFunction s4 = sample(sine, 4);
  REQUIRE(s4.N == 4);
  CHECK(s4.delta == Approx(0.5));
  CHECK(s4.y(0) == Approx(0.25));
  CHECK(s4.y(3) == Approx(1.75));
  CHECK(s4.values[0] == Approx(std::sin(-0.75 * kPi)));
  CHECK(s4.values[1] == Approx(std::sin(-0.25 * kPi)));
  CHECK(s4.values[2] == Approx(std::sin(0.25 * kPi)));
  CHECK(s4.values[3] == Approx(std::sin(0.75 * kPi)));

  const SampledFunction q4 = sample(builtin_quadratic(), 4);
  CHECK(q4.values[0] == Approx(1.0 / 128.0).epsilon(1e-15));
  CHECK(q4.values[1] == Approx(9.0 / 128.0).epsilon(1e-15));
  CHECK(q4.values[2] == Approx(25.0 / 128.0).epsilon(1e-15));
  CHECK(q4.values[3] == Approx(49.0 / 128.0).epsilon(1e-15));
}

TEST_CASE("sample rejects odd or undersized N", "[functions]") {
  const AnalyticFunction sine = builtin_sine();
  CHECK_THROWS_AS(sample(sine, 5), config_error);
  CHECK_THROWS_AS(sample(sine, 2), config_error);
  CHECK_THROWS_AS(sample(sine, 0), config_error);
}

TEST_CASE("sampling is reproducible bit for bit", "[functions]") {
  const AnalyticFunction sine = builtin_sine();
  const SampledFunction a = sample(sine, 512);
  const SampledFunction b = sample(sine, 512);
  for (int n = 0; n < a.N; ++n) {
    REQUIRE(a.values[static_cast<std::size_t>(n)] == b.values[static_cast<std::size_t>(n)]);
    REQUIRE(a.values[static_cast<std::size_t>(n)] == sine.S(a.y(n)));
  }
}

TEST_CASE("estimate_bound follows the forward-difference rule", "[functions]") {
  const AnalyticFunction quad = builtin_quadratic();
  // forward differences of x^2/2 on the midpoint grid evaluate s at the
  // interior nodes, so the max sits at x = (N-1)/N
  const double b64 = estimate_bound(sample(quad, 64), 1e-6);
  CHECK(b64 == Approx(63.0 / 64.0 + 1e-6).epsilon(1e-14));

  const AnalyticFunction sine = builtin_sine();
  const double b4096 = estimate_bound(sample(sine, 4096), 1e-6);
  CHECK(std::fabs(b4096 - kPi) < 1e-3);

  SampledFunction constant;
  constant.L = 1.0;
  constant.N = 16;
  constant.delta = 1.0 / 16.0;
  constant.values.assign(16, 3.25);
  CHECK(estimate_bound(constant, 1e-6) == 1e-6);

  CHECK_THROWS_AS(estimate_bound(constant, 0.0), config_error);
  CHECK_THROWS_AS(estimate_bound(constant, -1.0), config_error);
}

TEST_CASE("estimate_bound converges to B_true at rate 1/N", "[functions]") {
  for (const AnalyticFunction& fn : {builtin_sine(), builtin_quadratic()}) {
    std::vector<double> errs;
    std::vector<int> Ns;
    for (int p = 8; p <= 14; ++p) Ns.push_back(1 << p);
    for (int N : Ns) errs.push_back(std::fabs(estimate_bound(sample(fn, N), fn.beta) - fn.B_true));
    const double K = errs.front() * Ns.front();
    for (std::size_t i = 0; i < errs.size(); ++i) {
      if (i > 0) CHECK(errs[i] <= errs[i - 1] * (1.0 + 1e-12));
      CHECK(errs[i] <= K * (1.0 + 1e-9) / Ns[i]);
    }
  }
}

TEST_CASE("builtin densities integrate to one", "[functions]") {
  // sine: closed-form antiderivative (1/pi) asin(u/pi) makes the mass exact
  const AnalyticFunction sine = builtin_sine();
  const double eps = 0.02 * kPi;
  const double measured = true_interval_measure(sine, -kPi + eps, kPi - eps);
  const double expected = 2.0 / kPi * std::asin((kPi - eps) / kPi);
  CHECK(measured == Approx(expected).epsilon(1e-7));

  const AnalyticFunction quad = builtin_quadratic();
  const double m = true_interval_measure(quad, 0.02, 0.98);
  CHECK(m == Approx(0.96).epsilon(1e-9));
}
