#include <catch2/catch.hpp>

#include <cmath>

#include "wavedens/baselines.hpp"

using namespace wavedens;

TEST_CASE("derivative samples stay within the analytic bound", "[baselines]") {
  for (const AnalyticFunction& fn : {builtin_sine(), builtin_quadratic()}) {
    const SampledFunction smp = sample(fn, 1 << 10);
    const DerivativeSamples ds = derivative_samples(smp);
    REQUIRE(ds.values.size() == static_cast<std::size_t>(smp.N) - 1);
    for (double v : ds.values) {
      REQUIRE(std::isfinite(v));
      REQUIRE(std::fabs(v) <= fn.B_true + 10.0 * smp.delta);
    }
  }
}

TEST_CASE("histogram of the quadratic's derivative samples is flat", "[baselines]") {
  const AnalyticFunction quad = builtin_quadratic();
  const DerivativeSamples ds = derivative_samples(sample(quad, 1 << 12));
  const HistogramDensity h = histogram_density(ds, 64, 0.0, 1.0);
  REQUIRE(h.heights.size() == 64);
  for (double height : h.heights) CHECK(std::fabs(height - 1.0) < 0.2);
  CHECK(h.dropped_fraction == 0.0);
  // integrates to <= 1 over its range
  double mass = 0.0;
  for (double height : h.heights) mass += height * h.binwidth;
  CHECK(mass <= 1.0 + 1e-12);
  CHECK(mass == Approx(1.0).epsilon(1e-12));
}

TEST_CASE("histogram degenerate inputs", "[baselines]") {
  DerivativeSamples one;
  one.values = {0.4};
  const HistogramDensity h = histogram_density(one, 2, 0.0, 1.0);
  CHECK(h.heights[0] == Approx(1.0 / h.binwidth));
  CHECK(h.heights[1] == 0.0);

  DerivativeSamples equal;
  equal.values.assign(100, 0.25);
  const HistogramDensity he = histogram_density(equal, 4, 0.0, 1.0);
  CHECK(he.heights[1] == Approx(1.0 / he.binwidth));
  CHECK(he.heights[0] + he.heights[2] + he.heights[3] == 0.0);

  DerivativeSamples empty;
  CHECK_THROWS_AS(histogram_density(empty, 4, 0.0, 1.0), config_error);
  CHECK_THROWS_AS(histogram_density(one, 1, 0.0, 1.0), config_error);
  CHECK_THROWS_AS(histogram_density(one, 4, 1.0, 0.0), config_error);
}

TEST_CASE("histogram drops and reports out-of-range mass", "[baselines]") {
  DerivativeSamples ds;
  ds.values = {0.1, 0.2, 0.3, 5.0};
  const HistogramDensity h = histogram_density(ds, 4, 0.0, 1.0);
  CHECK(h.dropped_fraction == Approx(0.25));
  double mass = 0.0;
  for (double height : h.heights) mass += height * h.binwidth;
  CHECK(mass == Approx(0.75));
}

TEST_CASE("kernel density basics", "[baselines]") {
  DerivativeSamples one;
  one.values = {0.4};
  const double h = 0.07;
  CHECK(kernel_density(one, h, 0.4) == Approx(1.0 / (h * std::sqrt(2.0 * kPi))).epsilon(1e-12));
  CHECK(kernel_density(one, h, 0.4 + 11.0 * h) < 1e-20);
  CHECK_THROWS_AS(kernel_density(one, 0.0, 0.4), config_error);
  DerivativeSamples empty;
  CHECK_THROWS_AS(kernel_density(empty, h, 0.0), config_error);
}

TEST_CASE("kernel estimate near the oracle at an interior point", "[baselines]") {
  const AnalyticFunction quad = builtin_quadratic();
  const DerivativeSamples ds = derivative_samples(sample(quad, 1 << 12));
  const double h = silverman_bandwidth(ds);
  CHECK(h > 0.0);
  CHECK(std::fabs(kernel_density(ds, h, 0.5) - 1.0) < 0.1);
}

TEST_CASE("ise vanishes when the estimate is the oracle", "[baselines]") {
  const AnalyticFunction quad = builtin_quadratic();
  CHECK(ise(quad.density, quad, 2048) == 0.0);
  CHECK_THROWS_AS(ise(quad.density, quad, 100), config_error);
}

TEST_CASE("ise is positive for the real estimators", "[baselines]") {
  const AnalyticFunction quad = builtin_quadratic();
  const DerivativeSamples ds = derivative_samples(sample(quad, 1 << 10));
  const HistogramDensity h = histogram_density(ds, 11, ds.min(), ds.max());
  const double v = ise([&h](double u) { return h(u); }, quad, 2048, 0.05 * quad.B_true);
  CHECK(v > 0.0);
  CHECK(v < 1.0);
}
