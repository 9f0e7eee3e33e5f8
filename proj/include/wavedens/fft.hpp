#pragma once

#include <complex>
#include <mutex>
#include <vector>

#include <fftw3.h>

#include "wavedens/common.hpp"

namespace wavedens::detail {

// FFTW's planner is not thread-safe; plan execution on distinct plans is.
inline std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

/// Forward DFT, X[k] = sum_n x[n] exp(-2 pi i k n / N), any N >= 1.
/// FFTW_ESTIMATE keeps planning deterministic run to run.
inline std::vector<std::complex<double>> fft_forward(
    const std::vector<std::complex<double>>& x) {
  const std::size_t n = x.size();
  std::vector<std::complex<double>> in(x);
  std::vector<std::complex<double>> out(n);
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    plan = fftw_plan_dft_1d(static_cast<int>(n),
                            reinterpret_cast<fftw_complex*>(in.data()),
                            reinterpret_cast<fftw_complex*>(out.data()),
                            FFTW_FORWARD, FFTW_ESTIMATE | FFTW_PRESERVE_INPUT);
  }
  if (plan == nullptr) throw numeric_error("fft_forward: FFTW failed to plan");
  fftw_execute(plan);
  {
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    fftw_destroy_plan(plan);
  }
  return out;
}

}  // namespace wavedens::detail
