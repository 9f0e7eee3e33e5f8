#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

#include "wavedens/common.hpp"
#include "wavedens/fft.hpp"
#include "wavedens/functions.hpp"

namespace wavedens {

/// The wave field phi[n] = exp(i S(y_n) / tau) / sqrt(L) at the N sample
/// locations. Every entry has modulus 1/sqrt(L).
struct WaveField {
  double tau = 0.0;
  double L = 0.0;
  int N = 0;
  double delta = 0.0;
  std::vector<std::complex<double>> phi;
};

/// Centered scaled discrete power spectrum: u_k = 2 pi tau (k - N/2)/(N delta),
/// P[k] = |F_tau^D(u_k)|^2, bin spacing du = 2 pi tau / (N delta). By Parseval,
/// du * sum_k P[k] = 1 for any wave field and any tau > 0.
struct SpectrumEstimate {
  double tau = 0.0;
  double L = 0.0;
  int N = 0;
  double delta = 0.0;
  double du = 0.0;
  std::vector<double> u;
  std::vector<double> P;

  double u_min() const { return u.front(); }
  double u_max() const { return u.back(); }
};

/// Smallest tau whose spectral range [-pi tau/delta, pi tau/delta] covers
/// every derivative value: tau >= B delta / pi = B L / (pi N).
inline double tau_lower_bound(double B, double L, int N) {
  if (!(B > 0.0) || !(L > 0.0) || N < 4)
    throw config_error("tau_lower_bound: need B > 0, L > 0, N >= 4");
  return B * L / (kPi * N);
}

inline WaveField build_wavefield(const SampledFunction& samples, double tau) {
  if (!(tau > 0.0)) throw config_error("build_wavefield: tau must be > 0");
  WaveField wf;
  wf.tau = tau;
  wf.L = samples.L;
  wf.N = samples.N;
  wf.delta = samples.delta;
  wf.phi.resize(static_cast<std::size_t>(samples.N));
  const double amp = 1.0 / std::sqrt(samples.L);
  for (int n = 0; n < samples.N; ++n) {
    const double phase = samples.values[static_cast<std::size_t>(n)] / tau;
    wf.phi[static_cast<std::size_t>(n)] =
        std::complex<double>(amp * std::cos(phase), amp * std::sin(phase));
  }
  return wf;
}

namespace detail {

inline SpectrumEstimate spectrum_shell(const WaveField& wf) {
  if (wf.N < 4 || wf.N % 2 != 0)
    throw config_error("spectrum: wave field must have even N >= 4");
  SpectrumEstimate spec;
  spec.tau = wf.tau;
  spec.L = wf.L;
  spec.N = wf.N;
  spec.delta = wf.delta;
  spec.du = 2.0 * kPi * wf.tau / (wf.N * wf.delta);
  spec.u.resize(static_cast<std::size_t>(wf.N));
  spec.P.resize(static_cast<std::size_t>(wf.N));
  for (int k = 0; k < wf.N; ++k)
    spec.u[static_cast<std::size_t>(k)] = spec.du * (k - wf.N / 2);
  return spec;
}

}  // namespace detail

/// Fast path. With y_n = (n + 1/2) delta and centered bins the definition
/// rearranges to a stock DFT with pre-modulation by (-1)^n and a unit-modulus
/// post-twiddle exp(-i pi (k - N/2)/N):
///   F_tau^D(u_k) = delta/sqrt(2 pi tau) * e^{-i pi (k - N/2)/N} * X[k],
///   X = DFT(phi[n] * (-1)^n).
/// The post-twiddle drops out of P[k] = |F|^2. Pinned bin-for-bin against
/// direct_scaled_dft.
inline SpectrumEstimate scaled_dft(const WaveField& wf) {
  SpectrumEstimate spec = detail::spectrum_shell(wf);
  const int N = wf.N;
  std::vector<std::complex<double>> x(static_cast<std::size_t>(N));
  for (int n = 0; n < N; ++n)
    x[static_cast<std::size_t>(n)] =
        (n & 1) ? -wf.phi[static_cast<std::size_t>(n)] : wf.phi[static_cast<std::size_t>(n)];
  const std::vector<std::complex<double>> X = detail::fft_forward(x);
  const double scale = wf.delta * wf.delta / (2.0 * kPi * wf.tau);
  for (int k = 0; k < N; ++k)
    spec.P[static_cast<std::size_t>(k)] = scale * std::norm(X[static_cast<std::size_t>(k)]);
  return spec;
}

/// Reference implementation: literal double loop over bins and samples.
/// The phase u_k y_n / tau = pi (k - N/2)(2n + 1) / N is reduced mod 2 pi in
/// exact integer arithmetic before the trig evaluation, so large-N bins do
/// not lose phase precision. Guarded to N <= 4096.
inline SpectrumEstimate direct_scaled_dft(const WaveField& wf) {
  if (wf.N > 4096)
    throw config_error("direct_scaled_dft: N > 4096 (O(N^2) guard); use scaled_dft");
  SpectrumEstimate spec = detail::spectrum_shell(wf);
  const int N = wf.N;
  // twiddle[j] = exp(-i pi j / N), j in [0, 2N)
  std::vector<std::complex<double>> twiddle(static_cast<std::size_t>(2 * N));
  for (int j = 0; j < 2 * N; ++j) {
    const double a = -kPi * j / N;
    twiddle[static_cast<std::size_t>(j)] = std::complex<double>(std::cos(a), std::sin(a));
  }
  const double scale = wf.delta * wf.delta / (2.0 * kPi * wf.tau);
  for (int k = 0; k < N; ++k) {
    const std::int64_t m = k - N / 2;
    std::complex<double> acc(0.0, 0.0);
    for (int n = 0; n < N; ++n) {
      std::int64_t j = (m * (2 * n + 1)) % (2 * N);
      if (j < 0) j += 2 * N;
      acc += wf.phi[static_cast<std::size_t>(n)] * twiddle[static_cast<std::size_t>(j)];
    }
    spec.P[static_cast<std::size_t>(k)] = scale * std::norm(acc);
  }
  return spec;
}

}  // namespace wavedens
