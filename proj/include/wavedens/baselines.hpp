#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "wavedens/common.hpp"
#include "wavedens/functions.hpp"
#include "wavedens/truth.hpp"

namespace wavedens {

/// Forward-difference derivative samples (S_{n+1} - S_n)/delta: the data the
/// classical estimators see.
struct DerivativeSamples {
  std::vector<double> values;

  double min() const { return *std::min_element(values.begin(), values.end()); }
  double max() const { return *std::max_element(values.begin(), values.end()); }
};

inline DerivativeSamples derivative_samples(const SampledFunction& samples) {
  if (samples.N < 2) throw config_error("derivative_samples: need N >= 2");
  DerivativeSamples ds;
  ds.values.reserve(static_cast<std::size_t>(samples.N) - 1);
  for (int n = 0; n + 1 < samples.N; ++n)
    ds.values.push_back((samples.values[static_cast<std::size_t>(n) + 1] -
                         samples.values[static_cast<std::size_t>(n)]) /
                        samples.delta);
  return ds;
}

/// Piecewise-constant histogram density: counts / (n * binwidth). Mass that
/// falls outside [a, b] is dropped and reported, so the estimate integrates
/// to at most 1 over its range.
struct HistogramDensity {
  double a = 0.0;
  double b = 0.0;
  double binwidth = 0.0;
  std::vector<double> heights;
  double dropped_fraction = 0.0;

  double operator()(double u) const {
    if (u < a || u >= b) return 0.0;
    auto i = static_cast<std::size_t>((u - a) / binwidth);
    if (i >= heights.size()) i = heights.size() - 1;
    return heights[i];
  }
};

inline HistogramDensity histogram_density(const DerivativeSamples& ds, int bins, double a,
                                          double b) {
  if (ds.values.empty()) throw config_error("histogram_density: empty sample set");
  if (bins < 2 || !(a < b)) throw config_error("histogram_density: need bins >= 2 and a < b");
  HistogramDensity h;
  h.a = a;
  h.b = b;
  h.binwidth = (b - a) / bins;
  h.heights.assign(static_cast<std::size_t>(bins), 0.0);
  std::size_t dropped = 0;
  for (double v : ds.values) {
    if (v < a || v > b) {
      ++dropped;
      continue;
    }
    auto i = static_cast<std::size_t>((v - a) / h.binwidth);
    if (i >= h.heights.size()) i = h.heights.size() - 1;  // v == b lands in the last bin
    h.heights[i] += 1.0;
  }
  const double n = static_cast<double>(ds.values.size());
  for (double& c : h.heights) c /= n * h.binwidth;
  h.dropped_fraction = static_cast<double>(dropped) / n;
  return h;
}

/// Gaussian Parzen-window estimate (1/(n h)) sum_i K((u - v_i)/h).
inline double kernel_density(const DerivativeSamples& ds, double bandwidth, double u) {
  if (ds.values.empty()) throw config_error("kernel_density: empty sample set");
  if (!(bandwidth > 0.0)) throw config_error("kernel_density: bandwidth must be > 0");
  constexpr double inv_sqrt_2pi = 0.3989422804014327;
  double acc = 0.0;
  for (double v : ds.values) {
    const double t = (u - v) / bandwidth;
    acc += std::exp(-0.5 * t * t);
  }
  return acc * inv_sqrt_2pi / (bandwidth * static_cast<double>(ds.values.size()));
}

/// Silverman-style rule-of-thumb bandwidth 1.06 sigma n^{-1/5}.
inline double silverman_bandwidth(const DerivativeSamples& ds) {
  const double n = static_cast<double>(ds.values.size());
  double mean = 0.0;
  for (double v : ds.values) mean += v;
  mean /= n;
  double var = 0.0;
  for (double v : ds.values) var += (v - mean) * (v - mean);
  var /= n;
  return 1.06 * std::sqrt(var) * std::pow(n, -0.2);
}

/// Fixed-design integrated squared error against the true density:
/// midpoint-Riemann sum of (P - P~)^2 over (-B + eps, B - eps), skipping
/// grid points inside the eps margin of any c in C (the density is
/// undefined there). The sample locations are deterministic, so this is ISE
/// for the single fixed design, not an IMSE.
inline double ise(const std::function<double(double)>& estimate, const AnalyticFunction& fn,
                  int grid, double eps = 0.0) {
  if (grid < 1000) throw config_error("ise: grid must be >= 1000");
  const double margin = (eps > 0.0) ? eps : eps_c_margin(fn);
  const double lo = -fn.B_true + margin;
  const double hi = fn.B_true - margin;
  const double step = (hi - lo) / grid;
  double acc = 0.0;
  for (int i = 0; i < grid; ++i) {
    const double u = lo + (i + 0.5) * step;
    if (distance_to_c(fn, u) < margin) continue;
    const double d = fn.has_density() ? fn.density(u) : density_bruteforce(fn, u);
    const double e = estimate(u);
    acc += (d - e) * (d - e);
  }
  return acc * step;
}

}  // namespace wavedens
