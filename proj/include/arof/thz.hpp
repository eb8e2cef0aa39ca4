#pragma once
// Sub-terahertz front end: square-law photodiode beat generation, the
// photodiode-antenna emitted-power curve, the multiplied local oscillator,
// the waveguide-band mixer and the capture converter.
#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <utility>
#include <vector>

#include "arof/errors.hpp"
#include "arof/optical.hpp"
#include "arof/rng.hpp"
#include "arof/spectral.hpp"
#include "arof/waveform.hpp"

namespace arof {

// Square-law detection: current = responsivity * |field|^2, then selection of
// one electrical band as a complex envelope referenced to the band centre.
// Two optical lines P1, P2 beat into an envelope of magnitude
// 2 * R * sqrt(P1 P2) at their difference frequency.
inline Waveform photodiode(const Waveform& field, double responsivity_a_w, double band_lo_hz,
                           double band_hi_hz, double roll_frac = 0.01) {
  check_rate(field, "photodiode");
  if (!(responsivity_a_w > 0.0)) throw ConfigError("photodiode: responsivity must be positive");
  if (!(band_hi_hz > band_lo_hz) || band_lo_hz < 0.0)
    throw ConfigError("photodiode: bad electrical band");
  if (band_lo_hz >= field.sample_rate_hz / 2.0)
    throw BandError("photodiode: electrical band lies beyond the simulation Nyquist");
  Waveform cur;
  cur.sample_rate_hz = field.sample_rate_hz;
  cur.ref_freq_hz = 0.0;
  cur.samples.resize(field.samples.size());
  for (size_t i = 0; i < field.samples.size(); ++i)
    cur.samples[i] = cplx(responsivity_a_w * std::norm(field.samples[i]), 0.0);

  // analytic envelope of the selected positive band: keep [lo, hi], double it,
  // and recentre on the band midpoint
  size_t m = 0;
  auto spec = detail::padded_spectrum(cur, m);
  const double roll = roll_frac * (band_hi_hz - band_lo_hz);
  for (size_t i = 0; i < m; ++i) {
    const double f = bin_freq_hz(i, m, cur.sample_rate_hz);
    spec[i] *= 2.0 * detail::edge_mask(f, band_lo_hz, band_hi_hz, roll);
  }
  detail::fft_pow2(spec, true);
  std::copy(spec.begin(), spec.begin() + cur.samples.size(), cur.samples.begin());
  const double center = 0.5 * (band_lo_hz + band_hi_hz);
  frequency_shift(cur, -center);
  cur.ref_freq_hz = center;
  return cur;
}

struct PdaParams {
  double responsivity_a_w = 0.3;
  double wireless_loss_db = 20.0;
  // (frequency Hz, emitted power W) anchors of the roll-off curve
  std::vector<std::pair<double, double>> power_points = {
      {115e9, 343e-6}, {500e9, 10e-6}, {1e12, 1.9e-6}};
};

// Emitted power from log-log interpolation between the anchor points.
// Frequencies outside the charted range raise BandError.
inline double pda_emitted_power_w(const PdaParams& p, double freq_hz) {
  if (p.power_points.size() < 2) throw ConfigError("pda: need at least two power anchors");
  for (size_t i = 1; i < p.power_points.size(); ++i) {
    if (!(p.power_points[i].first > p.power_points[i - 1].first))
      throw ConfigError("pda: power anchors must have increasing frequency");
    if (!(p.power_points[i].second > 0.0) || !(p.power_points[i - 1].second > 0.0))
      throw ConfigError("pda: power anchors must be positive");
  }
  if (freq_hz < p.power_points.front().first || freq_hz > p.power_points.back().first)
    throw BandError("pda: " + std::to_string(freq_hz) + " Hz is outside the charted emitter range");
  size_t i = 1;
  while (i + 1 < p.power_points.size() && freq_hz > p.power_points[i].first) ++i;
  const auto& [fa, pa] = p.power_points[i - 1];
  const auto& [fb, pb] = p.power_points[i];
  const double t = (std::log(freq_hz) - std::log(fa)) / (std::log(fb) - std::log(fa));
  return std::exp(std::log(pa) * (1.0 - t) + std::log(pb) * t);
}

struct ReceiverParams {
  double rf_source_freq_hz = 0.0;   // 0 = carrier separation / multiplier
  double rf_source_linewidth_hz = 0.0;
  double rf_source_jitter_hz = 0.0;
  int multiplier_factor = 6;
  double mixer_band_lo_hz = 170e9;
  double mixer_band_hi_hz = 260e9;
  double conversion_loss_db = 8.0;
  double adc_rate_hz = 0.0;  // 0 = auto
  int adc_bits = 0;          // 0 = ideal converter
  double rx_snr_db = 35.0;
};

inline void validate_params(const ReceiverParams& p) {
  if (p.multiplier_factor < 1) throw ConfigError("receiver: multiplier_factor must be >= 1");
  if (!(p.mixer_band_hi_hz > p.mixer_band_lo_hz) || p.mixer_band_lo_hz <= 0.0)
    throw ConfigError("receiver: bad mixer band");
  if (!(p.conversion_loss_db >= 0.0)) throw ConfigError("receiver: conversion loss must be >= 0");
  if (p.adc_bits < 0 || p.adc_bits > 24) throw ConfigError("receiver: adc_bits out of range");
  if (p.adc_rate_hz < 0.0) throw ConfigError("receiver: adc_rate_hz must be >= 0");
  if (p.rf_source_freq_hz < 0.0) throw ConfigError("receiver: rf_source_freq_hz must be >= 0");
}

// Multiplied-chain local oscillator: phase noise and jitter of the driving
// source scale by the multiplication factor. The LO must land inside the
// waveguide band, widened by 5% per edge for the roll-off region at the band
// limits.
inline Waveform gen_lo_from_path(double lo_freq_hz, const ReceiverParams& p, const PhasePath& src,
                                 size_t n, double rate_hz) {
  validate_params(p);
  const double lo_min = p.mixer_band_lo_hz * 0.95;
  const double lo_max = p.mixer_band_hi_hz * 1.05;
  if (lo_freq_hz < lo_min || lo_freq_hz > lo_max)
    throw BandError("gen_lo: " + std::to_string(lo_freq_hz) +
                    " Hz is outside the mixer waveguide range [" + std::to_string(lo_min) + ", " +
                    std::to_string(lo_max) + "]");
  Waveform w;
  w.sample_rate_hz = rate_hz;
  w.ref_freq_hz = lo_freq_hz;
  w.samples.resize(n);
  const double k = double(p.multiplier_factor);
  const double w0 = 2.0 * std::numbers::pi * k * src.delta_f_hz;
  for (size_t i = 0; i < n; ++i) {
    const double t = double(i) / rate_hz;
    const double ph = w0 * t + k * src.phi_at(t);
    w.samples[i] = cplx(std::cos(ph), std::sin(ph));
  }
  return w;
}

inline Waveform gen_lo(double lo_freq_hz, const ReceiverParams& p, size_t n, double rate_hz,
                       uint64_t seed) {
  LaserParams src;  // reuse the Wiener walk machinery for the RF source
  src.center_freq_hz = std::max(1.0, p.rf_source_freq_hz);
  src.linewidth_hz = p.rf_source_linewidth_hz;
  src.freq_jitter_hz = p.rf_source_jitter_hz;
  src.power_mw = 1.0;
  const auto path = gen_phase_path(src, double(n) / rate_hz, 1.0 / rate_hz, seed);
  return gen_lo_from_path(lo_freq_hz, p, path, n, rate_hz);
}

// Harmonic mixer: multiply by the conjugate LO and apply conversion loss. The
// input's spectral centre of mass must sit inside the waveguide band; the
// result is an IF waveform referenced to zero.
inline Waveform mixer_downconvert(const Waveform& thz, const Waveform& lo,
                                  const ReceiverParams& p) {
  validate_params(p);
  check_rate(thz, "mixer_downconvert");
  check_rate(lo, "mixer_downconvert");
  if (thz.samples.size() != lo.samples.size() || thz.sample_rate_hz != lo.sample_rate_hz)
    throw FormatError("mixer_downconvert: signal and LO grids differ");
  const double centroid = spectral_centroid(thz);
  if (centroid < p.mixer_band_lo_hz || centroid > p.mixer_band_hi_hz)
    throw BandError("mixer_downconvert: input centred at " + std::to_string(centroid) +
                    " Hz is outside the waveguide band [" + std::to_string(p.mixer_band_lo_hz) +
                    ", " + std::to_string(p.mixer_band_hi_hz) + "]");
  const double g = std::pow(10.0, -p.conversion_loss_db / 20.0);
  Waveform out;
  out.sample_rate_hz = thz.sample_rate_hz;
  out.ref_freq_hz = 0.0;
  out.samples.resize(thz.samples.size());
  for (size_t i = 0; i < out.samples.size(); ++i)
    out.samples[i] = thz.samples[i] * std::conj(lo.samples[i]) * g;
  // the product is referenced to (thz.ref - lo.ref); move it to absolute zero
  const double residual = thz.ref_freq_hz - lo.ref_freq_hz;
  if (residual != 0.0) frequency_shift(out, residual);
  return out;
}

// Mid-rise quantization with full scale at 4x the per-component RMS.
inline void quantize_inplace(Waveform& w, int bits) {
  if (bits <= 0) return;
  if (w.samples.empty()) return;
  double acc = 0.0;
  for (auto s : w.samples) acc += std::norm(s);
  const double rms_c = std::sqrt(acc / (2.0 * double(w.samples.size())));
  if (!(rms_c > 0.0)) return;
  const double fs = 4.0 * rms_c;
  const double delta = 2.0 * fs / double(1ull << bits);
  const double top = fs - delta / 2.0;
  auto q = [&](double x) {
    const double y = (std::floor(x / delta) + 0.5) * delta;
    return std::min(std::max(y, -top), top);
  };
  for (auto& s : w.samples) s = cplx(q(s.real()), q(s.imag()));
}

// Capture converter: resample to the converter rate, then optionally quantize.
inline Waveform adc_capture(const Waveform& w, double adc_rate_hz, int adc_bits) {
  check_rate(w, "adc_capture");
  if (!(adc_rate_hz > 0.0)) throw ConfigError("adc_capture: rate must be positive");
  Waveform out = resample(w, adc_rate_hz);
  quantize_inplace(out, adc_bits);
  return out;
}

}  // namespace arof
