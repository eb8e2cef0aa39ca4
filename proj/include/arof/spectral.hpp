#pragma once
// Spectral-domain primitives: shifting, band selection, noise injection and
// band-limited rate conversion. All filters are applied on a zero-padded
// power-of-two grid and truncated back, so edges see a short transient; frames
// carry zero lead-in to absorb it.
#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numbers>

#include "arof/errors.hpp"
#include "arof/fft.hpp"
#include "arof/rng.hpp"
#include "arof/waveform.hpp"

namespace arof {

namespace detail {

inline std::vector<cplx> padded_spectrum(const Waveform& w, size_t& n_fft) {
  std::vector<cplx> spec(w.samples);
  n_fft = std::max<size_t>(2, std::bit_ceil(spec.size()));
  spec.resize(n_fft, 0.0);
  fft_pow2(spec, false);
  return spec;
}

// raised-cosine edge mask: 1 inside [lo, hi], cosine skirt of width `roll`
// outside each edge, 0 beyond.
inline double edge_mask(double f, double lo, double hi, double roll) {
  if (f >= lo && f <= hi) return 1.0;
  if (roll <= 0.0) return 0.0;
  if (f < lo && f > lo - roll) return 0.5 * (1.0 + std::cos(std::numbers::pi * (lo - f) / roll));
  if (f > hi && f < hi + roll) return 0.5 * (1.0 + std::cos(std::numbers::pi * (f - hi) / roll));
  return 0.0;
}

}  // namespace detail

// Mean power falling in the absolute band [f_lo, f_hi].
inline double band_power(const Waveform& w, double f_lo, double f_hi) {
  check_rate(w, "band_power");
  if (w.samples.empty()) return 0.0;
  size_t m = 0;
  auto spec = detail::padded_spectrum(w, m);
  double acc = 0.0;
  for (size_t i = 0; i < m; ++i) {
    const double f = w.ref_freq_hz + bin_freq_hz(i, m, w.sample_rate_hz);
    if (f >= f_lo && f <= f_hi) acc += std::norm(spec[i]);
  }
  return acc / (double(m) * double(w.samples.size()));
}

// Power-weighted mean absolute frequency of the content inside [f_lo, f_hi]
// (whole spectrum if the band is unbounded).
inline double spectral_centroid(const Waveform& w,
                                double f_lo = -std::numeric_limits<double>::infinity(),
                                double f_hi = std::numeric_limits<double>::infinity()) {
  check_rate(w, "spectral_centroid");
  if (w.samples.empty()) throw FormatError("spectral_centroid: empty waveform");
  size_t m = 0;
  auto spec = detail::padded_spectrum(w, m);
  double pw = 0.0, fw = 0.0;
  for (size_t i = 0; i < m; ++i) {
    const double f = w.ref_freq_hz + bin_freq_hz(i, m, w.sample_rate_hz);
    if (f < f_lo || f > f_hi) continue;
    const double p = std::norm(spec[i]);
    pw += p;
    fw += p * f;
  }
  if (pw <= 0.0) throw FormatError("spectral_centroid: no power in requested band");
  return fw / pw;
}

// Multiply by exp(j 2 pi delta t). Content that the shift would push across
// the Nyquist edge would alias, so that raises BandError; an energy fraction
// of 1e-9 is tolerated to ignore numerical-floor leakage.
inline Waveform& frequency_shift(Waveform& w, double delta_hz) {
  check_rate(w, "frequency_shift");
  if (w.samples.empty() || delta_hz == 0.0) return w;
  size_t m = 0;
  auto spec = detail::padded_spectrum(w, m);
  const double nyq = w.sample_rate_hz / 2.0;
  double total = 0.0, wrapped = 0.0;
  for (size_t i = 0; i < m; ++i) {
    const double p = std::norm(spec[i]);
    total += p;
    const double f = bin_freq_hz(i, m, w.sample_rate_hz) + delta_hz;
    if (f >= nyq || f < -nyq) wrapped += p;
  }
  if (total > 0.0 && wrapped > 1e-9 * total)
    throw BandError("frequency_shift: shifting by " + std::to_string(delta_hz) +
                    " Hz pushes content across the Nyquist edge at " + std::to_string(nyq) + " Hz");
  const double step = 2.0 * std::numbers::pi * delta_hz / w.sample_rate_hz;
  for (size_t i = 0; i < w.samples.size(); ++i) {
    const double ph = step * double(i);
    w.samples[i] *= cplx(std::cos(ph), std::sin(ph));
  }
  return w;
}

// Keep [f_lo, f_hi] (absolute frequencies), attenuate the rest. A brick wall
// with a raised-cosine skirt of width roll_frac*(f_hi-f_lo) immediately
// outside each edge; roll_frac = 0 gives a hard mask.
inline Waveform bandpass(const Waveform& w, double f_lo, double f_hi, double roll_frac = 0.01) {
  check_rate(w, "bandpass");
  if (!(f_hi > f_lo)) throw ConfigError("bandpass: f_hi must exceed f_lo");
  if (!(roll_frac >= 0.0)) throw ConfigError("bandpass: roll_frac must be non-negative");
  Waveform out = w;
  if (w.samples.empty()) return out;
  const double nyq = w.sample_rate_hz / 2.0;
  const double r_lo = f_lo - w.ref_freq_hz;
  const double r_hi = f_hi - w.ref_freq_hz;
  if (r_hi <= -nyq || r_lo >= nyq)
    throw BandError("bandpass: passband [" + std::to_string(f_lo) + ", " + std::to_string(f_hi) +
                    "] Hz lies entirely outside the representable span of this waveform");
  size_t m = 0;
  auto spec = detail::padded_spectrum(w, m);
  const double roll = roll_frac * (f_hi - f_lo);
  for (size_t i = 0; i < m; ++i) {
    const double f = bin_freq_hz(i, m, w.sample_rate_hz);
    spec[i] *= detail::edge_mask(f, r_lo, r_hi, roll);
  }
  detail::fft_pow2(spec, true);
  std::copy(spec.begin(), spec.begin() + w.samples.size(), out.samples.begin());
  return out;
}

// Add white circular gaussian noise. The caller asserts the signal occupies
// signal_band_hz of spectrum; the noise PSD is sized so the portion falling in
// that width yields snr_db of in-band SNR. ref_power_override replaces the
// measured mean power as the signal-power reference when nonzero (used when
// gain ripple has deliberately detuned the signal level). +inf disables.
inline Waveform& add_awgn(Waveform& w, double snr_db, double signal_band_hz, uint64_t seed,
                          double ref_power_override = 0.0) {
  check_rate(w, "add_awgn");
  if (std::isinf(snr_db) && snr_db > 0) return w;
  if (!(signal_band_hz > 0.0)) throw ConfigError("add_awgn: signal_band_hz must be positive");
  if (signal_band_hz > w.sample_rate_hz)
    throw ConfigError("add_awgn: signal_band_hz exceeds the sample rate");
  const double p = ref_power_override > 0.0 ? ref_power_override : mean_power(w);
  if (!(p > 0.0)) throw ConfigError("add_awgn: zero-power input has no defined SNR");
  const double snr = std::pow(10.0, snr_db / 10.0);
  const double sigma2 = p * w.sample_rate_hz / (signal_band_hz * snr);
  Rng rng(seed);
  const double sc = std::sqrt(sigma2 / 2.0);
  for (auto& s : w.samples) s += rng.cgaussian(sc);
  return w;
}

namespace detail {

// exact power-of-two ratio check (both rates come from pow2-multiple grids in
// the fast paths we care about)
inline bool pow2_ratio(double hi, double lo, int& log2r) {
  if (!(hi > 0) || !(lo > 0) || hi < lo) return false;
  double r = hi / lo;
  int k = 0;
  while (r > 1.0 && k < 62) {
    r /= 2.0;
    ++k;
  }
  if (r == 1.0 && hi == std::ldexp(lo, k)) {
    log2r = k;
    return true;
  }
  return false;
}

}  // namespace detail

// Band-limited sample-rate conversion. Exact spectral pad/fold when the rate
// ratio is a power of two, chirp-z evaluation otherwise. Downsampling applies
// an anti-alias mask with a raised-cosine skirt occupying the top
// 2*roll_frac of the new Nyquist interval.
inline Waveform resample(const Waveform& w, double new_rate_hz, double roll_frac = 0.01) {
  check_rate(w, "resample");
  if (!(new_rate_hz > 0.0)) throw ConfigError("resample: target rate must be positive");
  Waveform out;
  out.sample_rate_hz = new_rate_hz;
  out.ref_freq_hz = w.ref_freq_hz;
  if (w.samples.empty() || new_rate_hz == w.sample_rate_hz) {
    out.samples = w.samples;
    out.sample_rate_hz = new_rate_hz;
    return out;
  }
  const size_t n = w.samples.size();
  const size_t out_n = std::max<size_t>(1, size_t(std::llround(double(n) * new_rate_hz / w.sample_rate_hz)));

  int k = 0;
  if (detail::pow2_ratio(new_rate_hz, w.sample_rate_hz, k)) {
    // upsample: re-seat bins on a grid 2^k times longer
    size_t n1 = 0;
    auto spec = detail::padded_spectrum(w, n1);
    const size_t n2 = n1 << k;
    std::vector<cplx> spec2(n2, 0.0);
    for (size_t i = 0; i < n1 / 2; ++i) spec2[i] = spec[i];
    for (size_t i = n1 / 2 + 1; i < n1; ++i) spec2[i + (n2 - n1)] = spec[i];
    spec2[n1 / 2] = spec[n1 / 2] * 0.5;
    spec2[n2 - n1 / 2] = spec[n1 / 2] * 0.5;
    const double g = double(n2) / double(n1);
    for (auto& v : spec2) v *= g;
    detail::fft_pow2(spec2, true);
    out.samples.assign(spec2.begin(), spec2.begin() + out_n);
    return out;
  }
  if (detail::pow2_ratio(w.sample_rate_hz, new_rate_hz, k)) {
    // downsample: anti-alias then keep the inner 1/2^k of the grid
    size_t n1 = 0;
    auto spec = detail::padded_spectrum(w, n1);
    const size_t n2 = n1 >> k;
    if (n2 < 2) throw ConfigError("resample: waveform too short for this decimation");
    const double nyq2 = new_rate_hz / 2.0;
    const double pass = nyq2 * (1.0 - 2.0 * roll_frac);
    for (size_t i = 0; i < n1; ++i) {
      const double f = bin_freq_hz(i, n1, w.sample_rate_hz);
      spec[i] *= detail::edge_mask(f, -pass, pass, nyq2 - pass);
    }
    std::vector<cplx> spec2(n2, 0.0);
    for (size_t i = 0; i < n2 / 2; ++i) spec2[i] = spec[i];
    for (size_t i = n2 / 2; i < n2; ++i) spec2[i] = spec[i + (n1 - n2)];
    const double g = double(n2) / double(n1);
    for (auto& v : spec2) v *= g;
    detail::fft_pow2(spec2, true);
    out.samples.assign(spec2.begin(), spec2.begin() + std::min(out_n, n2));
    out.samples.resize(out_n, 0.0);
    return out;
  }

  // general path: evaluate the band-limited interpolant on the new grid via
  // a chirp-z transform. Works on the exact-length spectrum (zero padding
  // would fabricate a truncation edge inside the block), masks only when
  // decimating, and assumes block-periodic extension like the paths above.
  auto spec = fft(w.samples);
  if (new_rate_hz < w.sample_rate_hz) {
    const double nyq2 = new_rate_hz / 2.0;
    const double pass = nyq2 * (1.0 - 2.0 * roll_frac);
    for (size_t i = 0; i < n; ++i) {
      const double f = bin_freq_hz(i, n, w.sample_rate_hz);
      spec[i] *= detail::edge_mask(f, -pass, pass, nyq2 - pass);
    }
  }
  std::vector<cplx> shifted(n);
  const size_t h = (n + 1) / 2;
  for (size_t i = 0; i < n; ++i) shifted[i] = spec[(i + h) % n];
  const double beta = w.sample_rate_hz / (double(n) * new_rate_hz);
  auto y = gdft(shifted, out_n, -beta);
  out.samples.resize(out_n);
  const long double wrap = -2.0L * std::numbers::pi_v<long double> *
                           static_cast<long double>(n / 2) * static_cast<long double>(beta);
  for (size_t i = 0; i < out_n; ++i) {
    long double ph = std::fmod(wrap * static_cast<long double>(i), 2.0L * std::numbers::pi_v<long double>);
    const cplx rot(static_cast<double>(std::cos(ph)), static_cast<double>(std::sin(ph)));
    out.samples[i] = y[i] * rot / double(n);
  }
  return out;
}

}  // namespace arof
