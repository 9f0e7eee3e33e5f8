#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "wavedens/common.hpp"
#include "wavedens/functions.hpp"
#include "wavedens/spectrum.hpp"
#include "wavedens/truth.hpp"

namespace wavedens {

/// K pairwise-disjoint closed intervals [c_j - alpha, c_j + alpha] inside
/// (-B + eps_c, B - eps_c), all clear of the C margin. alpha is fixed
/// independently of N and tau.
struct NeighborhoodSet {
  std::vector<double> centers;
  double half_width = 0.0;
  double B = 0.0;
  double eps_c = 0.0;

  int K() const { return static_cast<int>(centers.size()); }
  double lo(int j) const { return centers[static_cast<std::size_t>(j)] - half_width; }
  double hi(int j) const { return centers[static_cast<std::size_t>(j)] + half_width; }
};

/// Uniformly spaced centers c_j = -B + eps_c + (j - 1/2 + shift) * spacing,
/// spacing = 2(B - eps_c)/K. alpha <= 0 selects the default 0.4 * spacing,
/// which leaves 20% guard bands between intervals. shift (in units of the
/// spacing) exists for catalogs whose C contains interior points: the
/// default grid may land a center on C and is then rejected.
inline NeighborhoodSet build_neighborhoods(double B, int K, double alpha,
                                           const std::vector<double>& C, double eps_c,
                                           double shift = 0.0) {
  if (K < 1) throw config_error("build_neighborhoods: K must be >= 1");
  if (!(B > 0.0) || !(eps_c > 0.0) || eps_c >= B)
    throw config_error("build_neighborhoods: need B > 0 and 0 < eps_c < B");
  const double span = 2.0 * (B - eps_c);
  const double spacing = span / K;
  const double half = (alpha > 0.0) ? alpha : 0.4 * spacing;
  if (2.0 * half * K > span)
    throw config_error("build_neighborhoods: K intervals of half-width " +
                       std::to_string(half) + " cannot fit in (-B+eps_c, B-eps_c)");
  NeighborhoodSet nbs;
  nbs.half_width = half;
  nbs.B = B;
  nbs.eps_c = eps_c;
  nbs.centers.reserve(static_cast<std::size_t>(K));
  for (int j = 1; j <= K; ++j) {
    const double c = -B + eps_c + (j - 0.5 + shift) * spacing;
    if (c - half < -B + eps_c || c + half > B - eps_c)
      throw config_error("build_neighborhoods: interval around center " + std::to_string(c) +
                         " leaves (-B+eps_c, B-eps_c); adjust shift or alpha");
    for (double cc : C) {
      if (c - half <= cc + eps_c && cc - eps_c <= c + half)
        throw config_error("build_neighborhoods: interval around center " + std::to_string(c) +
                           " collides with the C margin at " + std::to_string(cc) +
                           "; supply a shifted-center variant");
    }
    nbs.centers.push_back(c);
  }
  for (std::size_t j = 1; j < nbs.centers.size(); ++j) {
    if (nbs.centers[j] - nbs.centers[j - 1] <= 2.0 * half)
      throw config_error("build_neighborhoods: intervals around " +
                         std::to_string(nbs.centers[j - 1]) + " and " +
                         std::to_string(nbs.centers[j]) + " overlap");
  }
  return nbs;
}

namespace detail {

struct BinRange {
  int lo = 0;
  int hi = -1;  // inclusive; empty when hi < lo
};

/// Indices k with u_k in [a, b], from u_k = du (k - N/2) with comparison
/// fixups at the boundaries.
inline BinRange bins_in_interval(const SpectrumEstimate& spec, double a, double b) {
  BinRange r;
  r.lo = static_cast<int>(std::ceil(a / spec.du)) + spec.N / 2;
  r.hi = static_cast<int>(std::floor(b / spec.du)) + spec.N / 2;
  r.lo = std::clamp(r.lo, 0, spec.N - 1);
  r.hi = std::clamp(r.hi, 0, spec.N - 1);
  while (r.lo > 0 && spec.u[static_cast<std::size_t>(r.lo) - 1] >= a) --r.lo;
  while (r.lo <= r.hi && spec.u[static_cast<std::size_t>(r.lo)] < a) ++r.lo;
  while (r.hi + 1 < spec.N && spec.u[static_cast<std::size_t>(r.hi) + 1] <= b) ++r.hi;
  while (r.hi >= r.lo && spec.u[static_cast<std::size_t>(r.hi)] > b) --r.hi;
  return r;
}

}  // namespace detail

/// Riemann sum of the discrete power spectrum over [a, b]:
/// du * sum_{k : u_k in [a, b]} P[k].
inline double estimated_interval_measure(const SpectrumEstimate& spec, double a, double b) {
  if (!(a < b)) throw config_error("estimated_interval_measure: need a < b");
  if (a < spec.u_min() || b > spec.u_max())
    throw numeric_error(
        "estimated_interval_measure: interval outside the spectral range "
        "(tau below the lower bound for this interval)");
  const detail::BinRange r = detail::bins_in_interval(spec, a, b);
  double acc = 0.0;
  for (int k = r.lo; k <= r.hi; ++k) acc += spec.P[static_cast<std::size_t>(k)];
  return spec.du * acc;
}

/// The averaged Riemann-sum discrepancy
///   Delta = (1/K) sum_j | sum_{k : u_k in nb_j} du (P[k] - P_true(u_k)) |
/// with du = 2 pi tau / (N delta). With exact_true_integral the pointwise
/// P_true sum is replaced by the exact interval integral of the density.
inline double delta_stat(const SpectrumEstimate& spec,
                         const std::function<double(double)>& true_density,
                         const NeighborhoodSet& nbs, bool exact_true_integral = false,
                         const AnalyticFunction* fn_for_exact = nullptr) {
  if (nbs.K() < 1) throw config_error("delta_stat: empty neighborhood set");
  if (exact_true_integral && fn_for_exact == nullptr)
    throw config_error("delta_stat: exact_true_integral needs the analytic function");
  double acc = 0.0;
  for (int j = 0; j < nbs.K(); ++j) {
    const double a = nbs.lo(j);
    const double b = nbs.hi(j);
    if (a < spec.u_min() || b > spec.u_max())
      throw numeric_error("delta_stat: neighborhood [" + std::to_string(a) + ", " +
                          std::to_string(b) + "] outside the spectral range");
    const detail::BinRange r = detail::bins_in_interval(spec, a, b);
    if (r.hi < r.lo)
      throw numeric_error("delta_stat: neighborhood around " +
                          std::to_string(nbs.centers[static_cast<std::size_t>(j)]) +
                          " holds no bins (N too small for this K/alpha)");
    double diff = 0.0;
    if (exact_true_integral) {
      double est = 0.0;
      for (int k = r.lo; k <= r.hi; ++k) est += spec.P[static_cast<std::size_t>(k)];
      diff = spec.du * est - true_interval_measure(*fn_for_exact, a, b);
    } else {
      for (int k = r.lo; k <= r.hi; ++k) {
        const std::size_t kk = static_cast<std::size_t>(k);
        diff += spec.P[kk] - true_density(spec.u[kk]);
      }
      diff *= spec.du;
    }
    acc += std::fabs(diff);
  }
  return acc / nbs.K();
}

inline double delta_stat(const SpectrumEstimate& spec, const AnalyticFunction& fn,
                         const NeighborhoodSet& nbs, bool exact_true_integral = false) {
  std::function<double(double)> dens;
  if (fn.has_density())
    dens = fn.density;
  else
    dens = [&fn](double u) { return density_bruteforce(fn, u); };
  return delta_stat(spec, dens, nbs, exact_true_integral, &fn);
}

struct SweepRow {
  std::int64_t N = 0;
  double tau = 0.0;
  double delta_stat = 0.0;
  bool below_bound = false;
  int neighborhoods_used = 0;
};

struct LinearFit {
  double slope = std::numeric_limits<double>::quiet_NaN();
  double intercept = std::numeric_limits<double>::quiet_NaN();
  double r2 = std::numeric_limits<double>::quiet_NaN();
  double slope_stderr = std::numeric_limits<double>::quiet_NaN();
  double slope_ci95_half = std::numeric_limits<double>::quiet_NaN();
  int n_points = 0;
  bool valid = false;
};

/// Ordinary least squares y = slope * x + intercept, equal weights.
inline LinearFit linear_fit(std::span<const double> x, std::span<const double> y) {
  LinearFit fit;
  fit.n_points = static_cast<int>(x.size());
  if (x.size() != y.size()) throw config_error("linear_fit: size mismatch");
  if (x.size() < 2) return fit;
  const double n = static_cast<double>(x.size());
  double sx = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / n;
  const double my = sy / n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0) return fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r2 = (syy == 0.0) ? 1.0 : (sxy * sxy) / (sxx * syy);
  fit.valid = true;
  if (x.size() > 2) {
    double ss_res = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double r = y[i] - (fit.slope * x[i] + fit.intercept);
      ss_res += r * r;
    }
    fit.slope_stderr = std::sqrt(ss_res / (n - 2.0) / sxx);
    // two-sided 97.5% Student-t quantiles, dof 1..30
    static constexpr double t975[] = {12.706, 4.303, 3.182, 2.776, 2.571, 2.447, 2.365,
                                      2.306,  2.262, 2.228, 2.201, 2.179, 2.160, 2.145,
                                      2.131,  2.120, 2.110, 2.101, 2.093, 2.086, 2.080,
                                      2.074,  2.069, 2.064, 2.060, 2.056, 2.052, 2.048,
                                      2.045,  2.042};
    const int dof = static_cast<int>(x.size()) - 2;
    const double t = (dof <= 30) ? t975[dof - 1] : 1.96;
    fit.slope_ci95_half = t * fit.slope_stderr;
  }
  return fit;
}

/// One sweep: rows plus the fitted slope. n_sweep fits log Delta vs log N,
/// tau_sweep fits Delta vs tau (linear, not log-log).
struct ConvergenceRecord {
  std::vector<SweepRow> rows;
  LinearFit fit;
  std::string fit_kind;  // "loglog_N" or "linear_tau"
};

namespace detail {

inline NeighborhoodSet experiment_neighborhoods(const AnalyticFunction& fn, int K,
                                                double alpha, double eps_c, double shift) {
  const double ec = (eps_c > 0.0) ? eps_c : eps_c_margin(fn);
  return build_neighborhoods(fn.B_true, K, alpha, fn.C, ec, shift);
}

inline SweepRow sweep_row(const AnalyticFunction& fn, std::int64_t N, double tau,
                          const NeighborhoodSet& nbs, bool exact_true_integral) {
  const SampledFunction smp = sample(fn, static_cast<int>(N));
  const WaveField wf = build_wavefield(smp, tau);
  const SpectrumEstimate spec = scaled_dft(wf);
  SweepRow row;
  row.N = N;
  row.tau = tau;
  const double bound = tau_lower_bound(fn.B_true, fn.L, static_cast<int>(N));
  row.below_bound = tau < bound * (1.0 - 1e-12);
  if (!row.below_bound) {
    row.delta_stat = delta_stat(spec, fn, nbs, exact_true_integral);
    row.neighborhoods_used = nbs.K();
  } else {
    // Spectral range no longer covers every neighborhood: compute the
    // diagnostic value over the neighborhoods still in range.
    std::function<double(double)> dens;
    if (fn.has_density())
      dens = fn.density;
    else
      dens = [&fn](double u) { return density_bruteforce(fn, u); };
    NeighborhoodSet inrange = nbs;
    inrange.centers.clear();
    for (int j = 0; j < nbs.K(); ++j)
      if (nbs.lo(j) >= spec.u_min() && nbs.hi(j) <= spec.u_max())
        inrange.centers.push_back(nbs.centers[static_cast<std::size_t>(j)]);
    row.neighborhoods_used = inrange.K();
    if (inrange.K() == 0)
      throw numeric_error("tau_sweep: no neighborhood fits the spectral range at tau = " +
                          std::to_string(tau));
    row.delta_stat = delta_stat(spec, dens, inrange, false, nullptr);
  }
  return row;
}

}  // namespace detail

/// Case-study-1 harness: tau at its per-N lower bound, one row per N,
/// log-log slope of Delta vs N. Theorem 1 predicts slope -1.
inline ConvergenceRecord n_sweep(const AnalyticFunction& fn,
                                 const std::vector<std::int64_t>& Ns, int K,
                                 double alpha = 0.0, double eps_c = 0.0, double shift = 0.0,
                                 bool exact_true_integral = false) {
  if (Ns.empty()) throw config_error("n_sweep: empty N list");
  for (std::size_t i = 0; i < Ns.size(); ++i) {
    if (Ns[i] < 4 || Ns[i] % 2 != 0)
      throw config_error("n_sweep: every N must be even and >= 4");
    if (i > 0 && Ns[i] <= Ns[i - 1]) throw config_error("n_sweep: N list must be ascending");
  }
  const NeighborhoodSet nbs = detail::experiment_neighborhoods(fn, K, alpha, eps_c, shift);
  ConvergenceRecord rec;
  rec.fit_kind = "loglog_N";
  rec.rows.resize(Ns.size());
  detail::parallel_for(Ns.size(), [&](std::size_t i) {
    const double tau = tau_lower_bound(fn.B_true, fn.L, static_cast<int>(Ns[i]));
    rec.rows[i] = detail::sweep_row(fn, Ns[i], tau, nbs, exact_true_integral);
  });
  if (rec.rows.size() >= 2) {
    std::vector<double> lx, ly;
    for (const auto& r : rec.rows) {
      lx.push_back(std::log(static_cast<double>(r.N)));
      ly.push_back(std::log(r.delta_stat));
    }
    rec.fit = linear_fit(lx, ly);
  }
  return rec;
}

/// Case-study-2 harness: fixed N0, descending tau list, linear fit of Delta
/// vs tau. Rows with tau below the lower bound are flagged and computed over
/// the in-range neighborhoods only.
inline ConvergenceRecord tau_sweep(const AnalyticFunction& fn, std::int64_t N0,
                                   const std::vector<double>& taus, int K,
                                   double alpha = 0.0, double eps_c = 0.0,
                                   double shift = 0.0) {
  if (taus.empty()) throw config_error("tau_sweep: empty tau list");
  if (N0 < 4 || N0 % 2 != 0) throw config_error("tau_sweep: N0 must be even and >= 4");
  for (std::size_t i = 1; i < taus.size(); ++i)
    if (taus[i] >= taus[i - 1]) throw config_error("tau_sweep: tau list must be descending");
  for (double t : taus)
    if (!(t > 0.0)) throw config_error("tau_sweep: tau must be > 0");
  const NeighborhoodSet nbs = detail::experiment_neighborhoods(fn, K, alpha, eps_c, shift);
  ConvergenceRecord rec;
  rec.fit_kind = "linear_tau";
  rec.rows.resize(taus.size());
  detail::parallel_for(taus.size(), [&](std::size_t i) {
    rec.rows[i] = detail::sweep_row(fn, N0, taus[i], nbs, false);
  });
  if (rec.rows.size() >= 2) {
    std::vector<double> xs, ys;
    for (const auto& r : rec.rows) {
      xs.push_back(r.tau);
      ys.push_back(r.delta_stat);
    }
    rec.fit = linear_fit(xs, ys);
  }
  return rec;
}

}  // namespace wavedens
