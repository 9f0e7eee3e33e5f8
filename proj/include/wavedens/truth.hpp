#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "wavedens/common.hpp"
#include "wavedens/functions.hpp"

namespace wavedens {

/// All x in [0, L] with s(x) = u, with S'' evaluated at each root.
struct RootSet {
  double u = 0.0;
  std::vector<double> roots;
  std::vector<double> Spp_at_roots;

  std::size_t count() const { return roots.size(); }
};

/// Exclusion margin around the set C where the density is undefined.
inline double eps_c_margin(const AnalyticFunction& fn) { return 0.01 * fn.B_true; }

inline double distance_to_c(const AnalyticFunction& fn, double u) {
  double d = std::numeric_limits<double>::infinity();
  for (double c : fn.C) d = std::min(d, std::fabs(u - c));
  return d;
}

namespace detail {

inline double bisect_root(const std::function<double(double)>& g, double a, double b,
                          double ga, double tol) {
  // g(a) and g(b) have opposite signs on entry
  double mid = 0.5 * (a + b);
  for (int iter = 0; iter < 200; ++iter) {
    mid = 0.5 * (a + b);
    const double gm = g(mid);
    if (std::fabs(gm) <= tol || (b - a) <= 1e-300) return mid;
    if ((gm < 0.0) == (ga < 0.0)) {
      a = mid;
      ga = gm;
    } else {
      b = mid;
    }
  }
  if (std::fabs(g(mid)) <= 1e3 * tol) return mid;
  throw numeric_error("find_roots: unresolved bracket (S'' ~ 0 near a root?)");
}

}  // namespace detail

/// Brackets every sign change of s(x) - u on a uniform grid, then refines by
/// bisection to |s(x) - u| <= 1e-12 (1 + |u|). Rejects u within the eps_C
/// margin of C, where the density is undefined.
inline RootSet find_roots(const AnalyticFunction& fn, double u, int grid_size = 100000) {
  if (grid_size < 1000) throw config_error("find_roots: grid_size must be >= 1000");
  const double margin = eps_c_margin(fn);
  if (distance_to_c(fn, u) < margin)
    throw config_error("find_roots: u = " + std::to_string(u) +
                       " is within the exclusion margin of C; density undefined there");

  const auto g = [&fn, u](double x) { return fn.s(x) - u; };
  const double tol = 1e-12 * (1.0 + std::fabs(u));
  const double h = fn.L / grid_size;

  RootSet rs;
  rs.u = u;
  double x_prev = 0.0;
  double g_prev = g(x_prev);
  for (int i = 1; i <= grid_size; ++i) {
    const double x = (i == grid_size) ? fn.L : i * h;
    const double gx = g(x);
    if (g_prev == 0.0) {
      rs.roots.push_back(x_prev);
    } else if (gx != 0.0 && (gx < 0.0) != (g_prev < 0.0)) {
      rs.roots.push_back(detail::bisect_root(g, x_prev, x, g_prev, tol));
    }
    x_prev = x;
    g_prev = gx;
  }
  if (g_prev == 0.0) rs.roots.push_back(x_prev);

  std::sort(rs.roots.begin(), rs.roots.end());
  rs.roots.erase(std::unique(rs.roots.begin(), rs.roots.end(),
                             [h](double a, double b) { return std::fabs(a - b) < 0.5 * h; }),
                 rs.roots.end());

  rs.Spp_at_roots.reserve(rs.roots.size());
  for (double x : rs.roots) {
    const double spp = fn.Spp(x);
    if (std::fabs(spp) <= 1e-10)
      throw numeric_error("find_roots: S'' vanishes at root x = " + std::to_string(x) +
                          " (u in the image of the degenerate set)");
    rs.Spp_at_roots.push_back(spp);
  }
  return rs;
}

/// Lemma-3 density by root enumeration: (1/L) sum_m 1/|S''(x_m)|, zero when
/// no roots exist.
inline double density_bruteforce(const AnalyticFunction& fn, double u, int grid_size = 100000) {
  const RootSet rs = find_roots(fn, u, grid_size);
  double acc = 0.0;
  for (double spp : rs.Spp_at_roots) acc += 1.0 / std::fabs(spp);
  return acc / fn.L;
}

namespace detail {

/// Adaptive Simpson with Richardson error control (absolute tolerance).
inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                               double fa, double fb, double fm, double whole, double tol,
                               int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double refined = left + right;
  const double err = (refined - whole) / 15.0;
  if (depth <= 0 || std::fabs(err) <= tol) return refined + err;
  return adaptive_simpson(f, a, m, fa, fm, flm, left, 0.5 * tol, depth - 1) +
         adaptive_simpson(f, m, b, fm, fb, frm, right, 0.5 * tol, depth - 1);
}

inline double integrate(const std::function<double(double)>& f, double a, double b,
                        double tol) {
  const double fa = f(a);
  const double fb = f(b);
  const double fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return adaptive_simpson(f, a, b, fa, fb, fm, whole, tol, 48);
}

}  // namespace detail

/// Integral of the true density over [a, b] (closed form when the catalog
/// provides one, Lemma-3 enumeration otherwise), absolute tolerance 1e-9.
/// The interval must sit inside (-B, B) and clear the C margin.
inline double true_interval_measure(const AnalyticFunction& fn, double a, double b,
                                    int grid_size = 100000) {
  if (!(a < b)) throw config_error("true_interval_measure: need a < b");
  if (a <= -fn.B_true || b >= fn.B_true)
    throw config_error("true_interval_measure: [a,b] must lie inside (-B, B)");
  const double margin = eps_c_margin(fn);
  for (double c : fn.C)
    if (a - margin <= c && c <= b + margin)
      throw config_error("true_interval_measure: interval touches the C margin at c = " +
                         std::to_string(c));
  std::function<double(double)> dens;
  if (fn.has_density())
    dens = fn.density;
  else
    dens = [&fn, grid_size](double u) { return density_bruteforce(fn, u, grid_size); };
  return detail::integrate(dens, a, b, 1e-9);
}

}  // namespace wavedens
