#pragma once
// Iterative radix-2 FFT plus a Bluestein chirp path for arbitrary lengths and
// arbitrary-step spectral evaluation (used by the band-limited resampler).
#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace arof {

using cplx = std::complex<double>;

namespace detail {

// One half-length twiddle table per transform size, shared across calls.
inline const std::vector<cplx>& twiddles(size_t n) {
  static std::mutex mu;
  static std::map<size_t, std::unique_ptr<std::vector<cplx>>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[n];
  if (!slot) {
    auto t = std::make_unique<std::vector<cplx>>(n / 2);
    for (size_t k = 0; k < n / 2; ++k) {
      const double a = -2.0 * std::numbers::pi * double(k) / double(n);
      (*t)[k] = {std::cos(a), std::sin(a)};
    }
    slot = std::move(t);
  }
  return *slot;
}

inline void fft_pow2(std::vector<cplx>& a, bool inverse) {
  const size_t n = a.size();
  if (n < 2) return;
  if (std::popcount(n) != 1) throw std::invalid_argument("fft: length must be a power of two");
  for (size_t i = 1, j = 0; i < n; ++i) {
    size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  const auto& tw = twiddles(n);
  for (size_t len = 2; len <= n; len <<= 1) {
    const size_t stride = n / len;
    for (size_t i = 0; i < n; i += len) {
      for (size_t k = 0; k < len / 2; ++k) {
        cplx w = tw[k * stride];
        if (inverse) w = std::conj(w);
        const cplx u = a[i + k];
        const cplx v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
      }
    }
  }
  if (inverse) {
    const double s = 1.0 / double(n);
    for (auto& x : a) x *= s;
  }
}

// exp(-j*pi*alpha*idx^2) with the phase accumulated in long double; idx^2
// reaches ~1e13 for multi-megasample chirps and plain double would lose
// milliradians there.
inline cplx chirp_phasor(double alpha, uint64_t idx) {
  long double ph = -std::numbers::pi_v<long double> * static_cast<long double>(alpha) *
                   static_cast<long double>(idx) * static_cast<long double>(idx);
  ph = std::fmod(ph, 2.0L * std::numbers::pi_v<long double>);
  return {static_cast<double>(std::cos(ph)), static_cast<double>(std::sin(ph))};
}

}  // namespace detail

// Signed frequency of bin i for an n-point transform at a given sample rate.
inline double bin_freq_hz(size_t i, size_t n, double sample_rate_hz) {
  const double b = (i < (n + 1) / 2) ? double(i) : double(i) - double(n);
  return b * sample_rate_hz / double(n);
}

// Generalized DFT on the unit circle: y[k] = sum_n x[n] exp(-j 2 pi alpha n k),
// k = 0..m-1. alpha = 1/N reproduces the plain DFT; fractional alpha gives the
// chirp-z evaluation the resampler needs. Bluestein: nk = (n^2+k^2-(k-n)^2)/2.
inline std::vector<cplx> gdft(const std::vector<cplx>& x, size_t m, double alpha) {
  const size_t n = x.size();
  if (n == 0 || m == 0) return std::vector<cplx>(m, 0.0);
  const size_t l = std::bit_ceil(n + m);
  std::vector<cplx> a(l, 0.0), b(l, 0.0);
  for (size_t i = 0; i < n; ++i) a[i] = x[i] * detail::chirp_phasor(alpha, i);
  const size_t mx = std::max(n, m);
  for (size_t i = 0; i < mx; ++i) {
    const cplx c = std::conj(detail::chirp_phasor(alpha, i));
    if (i < m) b[i] = c;
    if (i > 0 && i < n) b[l - i] = c;
  }
  detail::fft_pow2(a, false);
  detail::fft_pow2(b, false);
  for (size_t i = 0; i < l; ++i) a[i] *= b[i];
  detail::fft_pow2(a, true);
  std::vector<cplx> y(m);
  for (size_t k = 0; k < m; ++k) y[k] = a[k] * detail::chirp_phasor(alpha, k);
  return y;
}

// Forward DFT (any length): X[k] = sum_n x[n] exp(-j 2 pi n k / N).
inline std::vector<cplx> fft(std::vector<cplx> x) {
  const size_t n = x.size();
  if (n < 2) return x;
  if (std::popcount(n) == 1) {
    detail::fft_pow2(x, false);
    return x;
  }
  return gdft(x, n, 1.0 / double(n));
}

// Inverse DFT (any length), scaled by 1/N so ifft(fft(x)) == x.
inline std::vector<cplx> ifft(std::vector<cplx> X) {
  const size_t n = X.size();
  if (n < 2) return X;
  if (std::popcount(n) == 1) {
    detail::fft_pow2(X, true);
    return X;
  }
  for (auto& v : X) v = std::conj(v);
  auto y = gdft(X, n, 1.0 / double(n));
  for (auto& v : y) v = std::conj(v) / double(n);
  return y;
}

}  // namespace arof
