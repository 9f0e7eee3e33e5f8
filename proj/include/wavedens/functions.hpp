#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "wavedens/common.hpp"

namespace wavedens {

/// A catalog entry: closed-form S with its first two derivatives, the
/// derivative bound B = sup|s| + beta, the exclusion set C (images of the
/// zeros of S'' plus the endpoint derivatives), and optionally the
/// closed-form derivative density on (-B, B) \ C.
struct AnalyticFunction {
  std::string name;
  double L = 0.0;
  std::function<double(double)> S;
  std::function<double(double)> s;
  std::function<double(double)> Spp;
  double B_true = 0.0;
  double beta = 0.0;
  std::vector<double> C;
  std::function<double(double)> density;  // empty when no closed form is known

  bool has_density() const { return static_cast<bool>(density); }

  /// S extended beyond [0, L] by the linear rule S(0) + s(0)x on the left
  /// and S(L) + s(L)(x - L) on the right, so s is constant on the margins.
  double S_extended(double x) const {
    if (x < 0.0) return S(0.0) + s(0.0) * x;
    if (x > L) return S(L) + s(L) * (x - L);
    return S(x);
  }
  double s_extended(double x) const {
    if (x < 0.0) return s(0.0);
    if (x > L) return s(L);
    return s(x);
  }
};

/// N uniform samples of S at y_n = (n + 1/2) * delta, delta = L / N.
struct SampledFunction {
  double L = 0.0;
  int N = 0;
  double delta = 0.0;
  std::vector<double> values;

  double y(int n) const { return (n + 0.5) * delta; }
};

namespace detail {

/// Rejects functions whose S'' vanishes on a positive-measure chunk of
/// [0, L] (e.g. linear S): the derivative density does not exist there.
inline void check_second_derivative(const AnalyticFunction& fn, int grid = 10000) {
  int vanishing = 0;
  double scale = 0.0;
  std::vector<double> vals(static_cast<std::size_t>(grid));
  for (int i = 0; i < grid; ++i) {
    const double x = (i + 0.5) * fn.L / grid;
    vals[static_cast<std::size_t>(i)] = std::fabs(fn.Spp(x));
    scale = std::max(scale, vals[static_cast<std::size_t>(i)]);
  }
  const double tol = 1e-12 * std::max(1.0, scale);
  for (double v : vals)
    if (v <= tol) ++vanishing;
  if (vanishing > grid / 20)
    throw config_error("function '" + fn.name +
                       "': S'' vanishes on a positive-measure set, density undefined");
}

inline double default_beta(double sup_s) { return 1e-6 * std::max(1.0, sup_s); }

}  // namespace detail

/// S(x) = sin(pi (x - 1)) on [0, 2]. The paper's experimental function:
/// two stationary points per frequency and a closed-form density
/// 1 / (pi sqrt(pi^2 - u^2)) on (-pi, pi).
inline AnalyticFunction builtin_sine() {
  AnalyticFunction fn;
  fn.name = "sine";
  fn.L = 2.0;
  fn.S = [](double x) { return std::sin(kPi * (x - 1.0)); };
  fn.s = [](double x) { return kPi * std::cos(kPi * (x - 1.0)); };
  fn.Spp = [](double x) { return -kPi * kPi * std::sin(kPi * (x - 1.0)); };
  fn.beta = detail::default_beta(kPi);
  fn.B_true = kPi + fn.beta;
  fn.C = {-kPi, kPi};
  fn.density = [](double u) {
    if (std::fabs(u) >= kPi) return 0.0;
    return 1.0 / (kPi * std::sqrt(kPi * kPi - u * u));
  };
  detail::check_second_derivative(fn);
  return fn;
}

/// S(x) = x^2 / 2 on [0, 1]: one stationary point per frequency, unit
/// density on (0, 1).
inline AnalyticFunction builtin_quadratic() {
  AnalyticFunction fn;
  fn.name = "quadratic";
  fn.L = 1.0;
  fn.S = [](double x) { return 0.5 * x * x; };
  fn.s = [](double x) { return x; };
  fn.Spp = [](double) { return 1.0; };
  fn.beta = detail::default_beta(1.0);
  fn.B_true = 1.0 + fn.beta;
  fn.C = {0.0, 1.0};
  fn.density = [](double u) { return (u > 0.0 && u < 1.0) ? 1.0 : 0.0; };
  detail::check_second_derivative(fn);
  return fn;
}

inline AnalyticFunction find_builtin(std::string_view name) {
  if (name == "sine") return builtin_sine();
  if (name == "quadratic") return builtin_quadratic();
  throw config_error("unknown builtin function '" + std::string(name) +
                     "' (available: sine, quadratic)");
}

/// Uniform midpoint samples of S. N must be even and at least 4.
inline SampledFunction sample(const AnalyticFunction& fn, int N) {
  if (N < 4 || N % 2 != 0)
    throw config_error("sample: N must be an even integer >= 4, got " + std::to_string(N));
  SampledFunction out;
  out.L = fn.L;
  out.N = N;
  out.delta = fn.L / N;
  out.values.resize(static_cast<std::size_t>(N));
  for (int n = 0; n < N; ++n)
    out.values[static_cast<std::size_t>(n)] = fn.S((n + 0.5) * out.delta);
  return out;
}

inline double max_abs_forward_difference(const SampledFunction& samples) {
  if (samples.N < 4) throw config_error("estimate_bound: need N >= 4");
  double m = 0.0;
  for (int n = 0; n + 1 < samples.N; ++n) {
    const double fd = (samples.values[static_cast<std::size_t>(n) + 1] -
                       samples.values[static_cast<std::size_t>(n)]) /
                      samples.delta;
    m = std::max(m, std::fabs(fd));
  }
  return m;
}

/// Derivative bound from forward differences: max_n |(S_{n+1} - S_n)/delta|
/// plus the slack beta. This is the B used when no analytic bound exists.
inline double estimate_bound(const SampledFunction& samples, double beta) {
  if (!(beta > 0.0)) throw config_error("estimate_bound: beta must be > 0");
  return max_abs_forward_difference(samples) + beta;
}

}  // namespace wavedens
