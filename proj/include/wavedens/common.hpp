#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <exception>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace wavedens {

inline constexpr double kPi = 3.14159265358979323846;

/// Invalid request or parameterization: rejected before any computation.
/// The CLI maps this to exit code 2.
class config_error : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// A numeric invariant failed or a computation is infeasible at the
/// requested resolution. The CLI maps this to exit code 3.
class numeric_error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

namespace detail {

/// Deterministic parallel loop: fixed contiguous partition over a fixed
/// thread count, so per-index outputs land in preallocated slots and any
/// later reduction happens in index order. The first worker exception is
/// rethrown on the calling thread.
template <typename Fn>
void parallel_for(std::size_t n, Fn&& body, unsigned threads = 0) {
  if (threads == 0) {
    threads = std::thread::hardware_concurrency();
    if (threads == 0) threads = 1;
  }
  if (n == 0) return;
  if (threads <= 1 || n < 2 * threads) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(threads);
  const std::size_t chunk = (n + threads - 1) / threads;
  std::vector<std::exception_ptr> errors(threads);
  for (unsigned t = 0; t < threads; ++t) {
    const std::size_t lo = t * chunk;
    const std::size_t hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([&body, &err = errors[t], lo, hi] {
      try {
        for (std::size_t i = lo; i < hi; ++i) body(i);
      } catch (...) {
        err = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace detail

}  // namespace wavedens
