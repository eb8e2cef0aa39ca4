#pragma once
// Optical front end: lasers with Wiener phase noise and frequency jitter,
// single/double-sideband modulation, amplification, coupling and dispersive
// fibre propagation. Optical fields are complex envelopes in sqrt(watts)
// referenced to an absolute optical frequency.
#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <vector>

#include "arof/errors.hpp"
#include "arof/rng.hpp"
#include "arof/spectral.hpp"
#include "arof/waveform.hpp"

namespace arof {

inline constexpr double kSpeedOfLight = 299792458.0;      // m/s
inline constexpr double kPlanck = 6.62607015e-34;          // J s

struct LaserParams {
  double center_freq_hz = kSpeedOfLight / 1550e-9;
  double linewidth_hz = 1e3;
  double freq_jitter_hz = 30e6;   // uniform draw bound for the per-run offset
  double drift_hz_per_s = 0.0;
  double power_mw = 10.0;
};

inline void validate_params(const LaserParams& p) {
  if (!(p.center_freq_hz > 0.0)) throw ConfigError("laser: center_freq_hz must be positive");
  if (!(p.linewidth_hz >= 0.0)) throw ConfigError("laser: linewidth_hz must be non-negative");
  if (!(p.freq_jitter_hz >= 0.0)) throw ConfigError("laser: freq_jitter_hz must be non-negative");
  if (!(p.power_mw > 0.0)) throw ConfigError("laser: power_mw must be positive");
}

// A phase realization on its own uniform grid, so the same draw can be played
// back at any sample rate (both simulation fidelities must see identical
// noise for a matched seed).
struct PhasePath {
  double dt = 0.0;
  std::vector<double> phi;    // Wiener phase at t = i*dt, phi[0] = 0
  double delta_f_hz = 0.0;    // per-run frequency offset draw
  double drift_hz_per_s = 0.0;

  double phi_at(double t) const {
    if (phi.empty()) return 0.0;
    const double x = t / dt;
    if (x <= 0.0) return phi.front();
    const size_t i = size_t(x);
    if (i + 1 >= phi.size()) return phi.back();
    const double f = x - double(i);
    return phi[i] * (1.0 - f) + phi[i + 1] * f;
  }
};

// Lorentzian-linewidth phase noise: independent gaussian increments with
// variance 2*pi*linewidth*dt. The jitter offset is drawn before the walk so
// the two consume deterministic positions of the stream.
inline PhasePath gen_phase_path(const LaserParams& p, double duration_s, double dt, uint64_t seed) {
  validate_params(p);
  if (!(dt > 0.0) || !(duration_s > 0.0)) throw ConfigError("gen_phase_path: bad grid");
  PhasePath path;
  path.dt = dt;
  path.drift_hz_per_s = p.drift_hz_per_s;
  Rng rng(seed);
  path.delta_f_hz = p.freq_jitter_hz > 0.0 ? rng.uniform(-p.freq_jitter_hz, p.freq_jitter_hz) : 0.0;
  const size_t n = size_t(std::ceil(duration_s / dt)) + 2;
  path.phi.resize(n);
  path.phi[0] = 0.0;
  const double sigma = std::sqrt(2.0 * std::numbers::pi * p.linewidth_hz * dt);
  for (size_t i = 1; i < n; ++i) path.phi[i] = path.phi[i - 1] + sigma * rng.gaussian();
  return path;
}

// Field samples from a phase path: sqrt(P) exp(j(2 pi (offset+df) t
// + pi drift t^2 + phi(t))), offset = center - ref. time_shift_s delays the
// phase path (used to model decorrelating group delay between two sources).
inline Waveform laser_field_from_path(const LaserParams& p, const PhasePath& path, size_t n,
                                      double rate_hz, double ref_freq_hz, double time_shift_s = 0.0) {
  validate_params(p);
  if (!(rate_hz > 0.0)) throw ConfigError("laser_field_from_path: rate must be positive");
  const double offset = p.center_freq_hz - ref_freq_hz + path.delta_f_hz;
  if (std::abs(offset) >= 0.45 * rate_hz)
    throw BandError("laser field at " + std::to_string(offset) +
                    " Hz offset does not fit the simulation bandwidth " + std::to_string(rate_hz));
  Waveform w;
  w.sample_rate_hz = rate_hz;
  w.ref_freq_hz = ref_freq_hz;
  w.samples.resize(n);
  const double amp = std::sqrt(p.power_mw * 1e-3);
  const double w0 = 2.0 * std::numbers::pi * offset;
  for (size_t i = 0; i < n; ++i) {
    const double t = double(i) / rate_hz;
    const double ph = w0 * t + std::numbers::pi * path.drift_hz_per_s * t * t +
                      path.phi_at(t - time_shift_s);
    w.samples[i] = amp * cplx(std::cos(ph), std::sin(ph));
  }
  return w;
}

inline Waveform gen_laser_field(const LaserParams& p, size_t n, double rate_hz, uint64_t seed) {
  const auto path = gen_phase_path(p, double(n) / rate_hz, 1.0 / rate_hz, seed);
  return laser_field_from_path(p, path, n, rate_hz, p.center_freq_hz);
}

enum class ModMode { ssb, dsb };

struct ModulatorParams {
  ModMode mode = ModMode::ssb;
  double index = 0.2;                    // RMS modulation depth
  double carrier_suppression_db = 20.0;  // residual carrier power below the sideband
  bool nonlinear = false;                // sin() Mach-Zehnder transfer instead of ideal
};

// Optical modulation of a carrier field by an electrical IF drive. The drive
// is normalized to unit RMS; in ssb mode its analytic (complex) form maps to
// a single sideband, in dsb mode only its real part drives the modulator and
// mirrored sidebands appear.  Ideal mode is linear: out = carrier * (alpha +
// index * s(t)), alpha = index * 10^(-supp/20). Nonlinear mode pushes the
// drive through sin(v + bias) per quadrature, which adds odd-order
// intermodulation and sets the residual carrier via the bias point.
inline Waveform ossb_modulate(const Waveform& carrier, const Waveform& drive,
                              const ModulatorParams& m) {
  check_rate(carrier, "ossb_modulate");
  check_rate(drive, "ossb_modulate");
  if (carrier.samples.size() != drive.samples.size())
    throw FormatError("ossb_modulate: carrier and drive lengths differ");
  if (carrier.sample_rate_hz != drive.sample_rate_hz)
    throw FormatError("ossb_modulate: carrier and drive rates differ");
  if (!(m.index > 0.0) || m.index > 1.5)
    throw ConfigError("ossb_modulate: modulation index must lie in (0, 1.5]");
  if (!(m.carrier_suppression_db >= 0.0))
    throw ConfigError("ossb_modulate: carrier suppression must be non-negative");
  const double drv_p = mean_power(drive);
  if (!(drv_p > 0.0)) throw ConfigError("ossb_modulate: drive has no power");
  const double inv_rms = 1.0 / std::sqrt(drv_p);
  const double alpha = m.index * std::pow(10.0, -m.carrier_suppression_db / 20.0);

  Waveform out = carrier;
  const size_t n = out.samples.size();
  if (!m.nonlinear) {
    for (size_t i = 0; i < n; ++i) {
      cplx s = drive.samples[i] * inv_rms;
      if (m.mode == ModMode::dsb) s = cplx(s.real() * std::sqrt(2.0), 0.0);
      out.samples[i] = carrier.samples[i] * (alpha + m.index * s);
    }
    return out;
  }
  // bias angle reproducing the ideal mode's carrier-to-sideband field ratio
  // alpha/index in the small-signal limit
  const double bias = std::atan(alpha / std::sqrt(2.0));
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  for (size_t i = 0; i < n; ++i) {
    cplx s = drive.samples[i] * inv_rms;
    if (m.mode == ModMode::dsb) s = cplx(s.real() * std::sqrt(2.0), 0.0);
    const double vi = m.index * s.real();
    const double vq = m.index * s.imag();
    out.samples[i] =
        carrier.samples[i] * (cplx(std::sin(vi + bias), std::sin(vq + bias)) * inv_sqrt2);
  }
  return out;
}

// Flat-gain amplifier with spontaneous-emission noise of PSD
// (F*G - 1) * h * nu / 2 (single polarization). nf_db = -inf disables noise.
inline Waveform edfa(const Waveform& in, double gain_db, double nf_db, uint64_t seed) {
  check_rate(in, "edfa");
  if (!(in.ref_freq_hz > 0.0)) throw ConfigError("edfa: needs an optical reference frequency");
  const double g = std::pow(10.0, gain_db / 20.0);
  Waveform out = in;
  for (auto& s : out.samples) s *= g;
  if (std::isinf(nf_db) && nf_db < 0) return out;
  const double f_lin = std::pow(10.0, nf_db / 10.0);
  const double g_lin = g * g;
  const double psd = std::max(0.0, f_lin * g_lin - 1.0) * kPlanck * in.ref_freq_hz / 2.0;
  const double sigma2 = psd * in.sample_rate_hz;
  Rng rng(seed);
  const double sc = std::sqrt(sigma2 / 2.0);
  for (auto& s : out.samples) s += rng.cgaussian(sc);
  return out;
}

// 2x1 coupler; include_split_loss keeps the physical 3 dB per-arm loss.
inline Waveform combine(const Waveform& a, const Waveform& b, bool include_split_loss = true) {
  check_rate(a, "combine");
  check_rate(b, "combine");
  if (a.samples.size() != b.samples.size() || a.sample_rate_hz != b.sample_rate_hz ||
      a.ref_freq_hz != b.ref_freq_hz)
    throw FormatError("combine: waveforms must share grid and reference frequency");
  Waveform out = a;
  const double g = include_split_loss ? 1.0 / std::sqrt(2.0) : 1.0;
  for (size_t i = 0; i < out.samples.size(); ++i) out.samples[i] = (a.samples[i] + b.samples[i]) * g;
  return out;
}

struct FiberParams {
  double length_km = 10.0;
  double dispersion_ps_nm_km = 17.0;
  double attenuation_db_km = 0.2;
  double ref_wavelength_nm = 1550.0;
};

inline void validate_params(const FiberParams& p) {
  if (!(p.length_km >= 0.0)) throw ConfigError("fiber: length_km must be non-negative");
  if (!(p.attenuation_db_km >= 0.0)) throw ConfigError("fiber: attenuation must be non-negative");
  if (!(p.ref_wavelength_nm > 0.0)) throw ConfigError("fiber: ref_wavelength_nm must be positive");
}

// Quadratic spectral phase about the fibre design frequency. With D > 0 the
// group delay grows toward longer wavelengths (lower frequencies), matching
// standard single-mode fibre above 1.3 um.
inline double dispersion_phase_rad(const FiberParams& p, double abs_freq_hz) {
  const double lambda = p.ref_wavelength_nm * 1e-9;
  const double d_si = p.dispersion_ps_nm_km * 1e-6;  // s/m/m
  const double len = p.length_km * 1e3;
  const double f0 = kSpeedOfLight / lambda;
  const double df = abs_freq_hz - f0;
  return std::numbers::pi * lambda * lambda * d_si * len * df * df / kSpeedOfLight;
}

// Group-delay difference between two absolute frequencies after the fibre.
inline double walkoff_s(const FiberParams& p, double f_a_hz, double f_b_hz) {
  const double lambda = p.ref_wavelength_nm * 1e-9;
  const double d_si = p.dispersion_ps_nm_km * 1e-6;
  const double len = p.length_km * 1e3;
  return lambda * lambda * d_si * len * (f_b_hz - f_a_hz) / kSpeedOfLight;
}

inline Waveform fiber_propagate(const Waveform& w, const FiberParams& p) {
  check_rate(w, "fiber_propagate");
  validate_params(p);
  Waveform out = w;
  if (w.samples.empty()) return out;
  size_t m = 0;
  auto spec = detail::padded_spectrum(w, m);
  for (size_t i = 0; i < m; ++i) {
    const double f = w.ref_freq_hz + bin_freq_hz(i, m, w.sample_rate_hz);
    const double ph = dispersion_phase_rad(p, f);
    spec[i] *= cplx(std::cos(ph), std::sin(ph));
  }
  detail::fft_pow2(spec, true);
  const double att = std::pow(10.0, -p.attenuation_db_km * p.length_km / 20.0);
  for (size_t i = 0; i < out.samples.size(); ++i) out.samples[i] = spec[i] * att;
  return out;
}

}  // namespace arof
