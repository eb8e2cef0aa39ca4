#pragma once
// End-to-end link chains. Two fidelities produce statistically matched
// captures from the same seed: the full-field path simulates optical fields
// on a wideband grid through modulator, fibre, photodiode and mixer; the
// equivalent-baseband path applies the composite carrier offset, the beating
// phase-noise process (with the fibre walk-off decorrelation) and the
// dispersion response directly to the IF signal. Shared phase paths keep the
// per-seed noise realizations identical across fidelities.
#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <string>

#include "arof/errors.hpp"
#include "arof/ofdm.hpp"
#include "arof/optical.hpp"
#include "arof/rxdsp.hpp"
#include "arof/thz.hpp"

namespace arof {

struct DspOptions {
  double max_fo_hz = 0.0;  // 0 = derive from the configured jitter bounds
  double sync_threshold = 0.5;
  int smooth_window = 16;
};

struct SimOptions {
  double memory_cap_mb = 4096.0;
  int jobs = 1;
  int lead_symbols = 2;
  int tail_symbols = 1;
};

struct LinkConfig {
  OfdmParams ofdm;
  LaserParams laser1;
  LaserParams laser2;
  ModulatorParams modulator;
  FiberParams fiber;
  PdaParams pda;
  ReceiverParams rx;
  DspOptions dsp;
  SimOptions sim;

  double carrier_separation_hz = 195e9;
  std::string fidelity = "equivalent_baseband";  // or "full_field"
  uint64_t seed = 1;

  // impairment switches
  bool phase_noise_on = true;
  bool fo_jitter_on = true;
  bool dispersion_on = true;
  bool additive_noise_on = true;

  double edfa_gain_db = 20.0;
  double edfa_nf_db = -std::numeric_limits<double>::infinity();  // off
  bool split_loss_on = true;

  // optional receive amplitude mask: (absolute Hz, power dB) pairs applied as
  // an SNR modifier at the sub-THz signal frequency
  std::vector<std::pair<double, double>> ripple_mask;

  std::string fingerprint;  // filled by the config loader

  double signal_freq_hz() const { return carrier_separation_hz + ofdm.if_hz; }
  double lo_freq_hz() const {
    return rx.rf_source_freq_hz > 0.0 ? rx.rf_source_freq_hz * rx.multiplier_factor
                                      : carrier_separation_hz;
  }
  double max_fo_bound_hz() const {
    double b = 0.0;
    if (fo_jitter_on)
      b = laser1.freq_jitter_hz + laser2.freq_jitter_hz +
          rx.multiplier_factor * rx.rf_source_jitter_hz;
    return b;
  }
};

inline void validate_link_config(const LinkConfig& cfg) {
  validate_params(cfg.ofdm);
  validate_params(cfg.laser1);
  validate_params(cfg.laser2);
  validate_params(cfg.fiber);
  validate_params(cfg.rx);
  if (!(cfg.carrier_separation_hz > 0.0))
    throw ConfigError("link: carrier_separation_hz must be positive");
  if (cfg.fidelity != "equivalent_baseband" && cfg.fidelity != "full_field")
    throw ConfigError("link: fidelity must be equivalent_baseband or full_field");
  if (cfg.laser2.center_freq_hz != cfg.laser1.center_freq_hz - cfg.carrier_separation_hz)
    throw ConfigError("link: laser2 centre must equal laser1 centre minus the carrier separation");
  const double f_sig = cfg.signal_freq_hz();
  if (f_sig < cfg.rx.mixer_band_lo_hz || f_sig > cfg.rx.mixer_band_hi_hz)
    throw BandError("link: sub-THz signal at " + std::to_string(f_sig) +
                    " Hz falls outside the mixer waveguide band [" +
                    std::to_string(cfg.rx.mixer_band_lo_hz) + ", " +
                    std::to_string(cfg.rx.mixer_band_hi_hz) + "]");
  if (cfg.ofdm.if_hz <= cfg.ofdm.occupied_bw_hz() / 2.0)
    throw ConfigError("link: IF must clear half the occupied bandwidth");
  if (cfg.sim.lead_symbols < 1 || cfg.sim.tail_symbols < 0)
    throw ConfigError("link: lead_symbols must be >= 1 and tail_symbols >= 0");
  if (!(cfg.sim.memory_cap_mb > 0.0)) throw ConfigError("link: memory cap must be positive");
}

struct GroundTruth {
  double fo_composite_hz = 0.0;
  double laser1_offset_hz = 0.0;
  double laser2_offset_hz = 0.0;
  double rf_source_offset_hz = 0.0;
  double walkoff_ps = 0.0;
  double emitted_power_w = std::numeric_limits<double>::quiet_NaN();
  double sim_rate_hz = std::numeric_limits<double>::quiet_NaN();
  double adc_rate_hz = 0.0;
  double snr_effective_db = std::numeric_limits<double>::quiet_NaN();
};

struct RunResult {
  DspReport report;
  GroundTruth truth;
  Waveform capture;
  FrameMeta meta;
};

namespace detail {

inline double auto_adc_rate(const LinkConfig& cfg) {
  if (cfg.rx.adc_rate_hz > 0.0) return cfg.rx.adc_rate_hz;
  const double need = 2.6 * (cfg.ofdm.if_hz + cfg.ofdm.occupied_bw_hz() / 2.0 +
                             cfg.max_fo_bound_hz());
  double r = cfg.ofdm.baseband_rate_hz();
  while (r < need) r *= 2.0;
  return r;
}

inline double ripple_gain_db(const LinkConfig& cfg, double freq_hz) {
  const auto& m = cfg.ripple_mask;
  if (m.empty()) return 0.0;
  if (freq_hz <= m.front().first) return m.front().second;
  if (freq_hz >= m.back().first) return m.back().second;
  for (size_t i = 1; i < m.size(); ++i) {
    if (freq_hz <= m[i].first) {
      const double t = (freq_hz - m[i - 1].first) / (m[i].first - m[i - 1].first);
      return m[i - 1].second * (1.0 - t) + m[i].second * t;
    }
  }
  return m.back().second;
}

struct SharedNoise {
  PhasePath laser1, laser2, rf_source;
  double fo_composite_hz = 0.0;
};

inline SharedNoise draw_noise(const LinkConfig& cfg, double duration_s) {
  LaserParams l1 = cfg.laser1, l2 = cfg.laser2;
  if (!cfg.phase_noise_on) l1.linewidth_hz = l2.linewidth_hz = 0.0;
  if (!cfg.fo_jitter_on) {
    l1.freq_jitter_hz = l2.freq_jitter_hz = 0.0;
    l1.drift_hz_per_s = l2.drift_hz_per_s = 0.0;
  }
  LaserParams src;
  src.center_freq_hz = std::max(1.0, cfg.rx.rf_source_freq_hz > 0.0
                                         ? cfg.rx.rf_source_freq_hz
                                         : cfg.carrier_separation_hz / cfg.rx.multiplier_factor);
  src.linewidth_hz = cfg.phase_noise_on ? cfg.rx.rf_source_linewidth_hz : 0.0;
  src.freq_jitter_hz = cfg.fo_jitter_on ? cfg.rx.rf_source_jitter_hz : 0.0;
  src.power_mw = 1.0;

  const double dt = 1.0 / cfg.ofdm.baseband_rate_hz();
  SharedNoise out;
  out.laser1 = gen_phase_path(l1, duration_s, dt, seed_child(cfg.seed, "laser1"));
  out.laser2 = gen_phase_path(l2, duration_s, dt, seed_child(cfg.seed, "laser2"));
  out.rf_source = gen_phase_path(src, duration_s, dt, seed_child(cfg.seed, "rf_source"));
  out.fo_composite_hz = out.laser1.delta_f_hz - out.laser2.delta_f_hz -
                        cfg.rx.multiplier_factor * out.rf_source.delta_f_hz;
  return out;
}

// modem-rate frame with zero lead-in/tail so sync has a noise floor to start
// from and spectral filters have settling room
inline std::pair<Waveform, FrameMeta> padded_frame(const LinkConfig& cfg) {
  auto bits = random_payload_bits(cfg.ofdm, seed_child(cfg.seed, "payload"));
  auto [wf, meta] = build_frame(cfg.ofdm, bits, seed_child(cfg.seed, "sequences"));
  const size_t sym = size_t(meta.symbol_len());
  wf.samples.insert(wf.samples.begin(), size_t(cfg.sim.lead_symbols) * sym, cplx(0.0, 0.0));
  wf.samples.insert(wf.samples.end(), size_t(cfg.sim.tail_symbols) * sym, cplx(0.0, 0.0));
  return {std::move(wf), std::move(meta)};
}

// Signal-power reference for noise injection: the frame energy spread over
// the frame's own duration, so the zero lead-in and tail do not dilute the
// SNR definition and the drawn frequency offset cannot modulate it.
inline double frame_ref_power(const Waveform& w, const FrameMeta& meta) {
  const double n_active = double(meta.frame_len()) * w.sample_rate_hz /
                          meta.params.baseband_rate_hz();
  const double e = total_energy(w);
  if (!(e > 0.0) || !(n_active > 0.0)) throw FormatError("frame_ref_power: no signal energy");
  return e / n_active;
}

inline RxOptions rx_options(const LinkConfig& cfg) {
  RxOptions o;
  o.max_fo_hz = cfg.dsp.max_fo_hz > 0.0
                    ? cfg.dsp.max_fo_hz
                    : std::max(cfg.max_fo_bound_hz() + 2.0 * cfg.ofdm.sc_spacing_hz,
                               2.0 * cfg.ofdm.sc_spacing_hz);
  o.sync_threshold = cfg.dsp.sync_threshold;
  o.smooth_window = cfg.dsp.smooth_window;
  return o;
}

inline void finish_report(const LinkConfig& cfg, RunResult& r) {
  r.report.fo_true_hz = r.truth.fo_composite_hz;
  r.report.walkoff_ps = r.truth.walkoff_ps;
  r.report.emitted_power_dbm = r.truth.emitted_power_w > 0.0
                                   ? 10.0 * std::log10(r.truth.emitted_power_w * 1e3)
                                   : std::numeric_limits<double>::quiet_NaN();
  r.report.sim_rate_hz = r.truth.sim_rate_hz;
  r.report.adc_rate_hz = r.truth.adc_rate_hz;
  r.report.fidelity = cfg.fidelity;
  r.report.seed = cfg.seed;
  r.report.config_fingerprint = cfg.fingerprint;
}

}  // namespace detail

// Equivalent-baseband fidelity: IF signal plus analytic channel effects.
inline RunResult run_equivalent_baseband(const LinkConfig& cfg) {
  validate_link_config(cfg);
  RunResult res;
  auto [modem_wf, meta] = detail::padded_frame(cfg);
  res.meta = meta;

  const double adc_rate = detail::auto_adc_rate(cfg);
  Waveform w = place_at_if(modem_wf, cfg.ofdm.if_hz, adc_rate);

  const double duration = duration_s(w) + 1e-9;
  auto noise = detail::draw_noise(cfg, duration);
  res.truth.fo_composite_hz = noise.fo_composite_hz;
  res.truth.laser1_offset_hz = noise.laser1.delta_f_hz;
  res.truth.laser2_offset_hz = noise.laser2.delta_f_hz;
  res.truth.rf_source_offset_hz = noise.rf_source.delta_f_hz;
  res.truth.adc_rate_hz = adc_rate;

  // fibre dispersion as the sideband sees it (quadratic spectral phase around
  // the optical carrier); amplitude effects are absorbed by the SNR reference
  const double walkoff =
      cfg.dispersion_on ? walkoff_s(cfg.fiber, cfg.laser1.center_freq_hz,
                                    cfg.laser2.center_freq_hz)
                        : 0.0;
  res.truth.walkoff_ps = std::abs(walkoff) * 1e12;
  if (cfg.dispersion_on) {
    size_t m = 0;
    auto spec = detail::padded_spectrum(w, m);
    for (size_t i = 0; i < m; ++i) {
      const double u = bin_freq_hz(i, m, w.sample_rate_hz);
      const double ph = dispersion_phase_rad(cfg.fiber, cfg.laser1.center_freq_hz + u);
      spec[i] *= cplx(std::cos(ph), std::sin(ph));
    }
    detail::fft_pow2(spec, true);
    std::copy(spec.begin(), spec.begin() + w.samples.size(), w.samples.begin());
  }

  // composite oscillator process: laser beat with dispersive walk-off
  // decorrelation, minus the multiplied RF source
  {
    const double k = double(cfg.rx.multiplier_factor);
    const double two_pi = 2.0 * std::numbers::pi;
    const double drift = noise.laser1.drift_hz_per_s - noise.laser2.drift_hz_per_s;
    for (size_t i = 0; i < w.samples.size(); ++i) {
      const double t = double(i) / w.sample_rate_hz;
      const double ph = two_pi * noise.fo_composite_hz * t + std::numbers::pi * drift * t * t +
                        noise.laser1.phi_at(t) - noise.laser2.phi_at(t - std::abs(walkoff)) -
                        k * noise.rf_source.phi_at(t);
      w.samples[i] *= cplx(std::cos(ph), std::sin(ph));
    }
  }

  const double snr_eff = cfg.rx.rx_snr_db + detail::ripple_gain_db(cfg, cfg.signal_freq_hz());
  res.truth.snr_effective_db = snr_eff;
  if (cfg.additive_noise_on)
    add_awgn(w, snr_eff, cfg.ofdm.occupied_bw_hz(), seed_child(cfg.seed, "rx_noise"),
             detail::frame_ref_power(w, meta));
  quantize_inplace(w, cfg.rx.adc_bits);

  res.capture = std::move(w);
  res.report = run_rx_chain(res.capture, meta, detail::rx_options(cfg));
  detail::finish_report(cfg, res);
  return res;
}

// Full-field fidelity: optical field simulation on a wideband grid.
inline RunResult run_full_field(const LinkConfig& cfg) {
  validate_link_config(cfg);
  RunResult res;
  auto [modem_wf, meta] = detail::padded_frame(cfg);
  res.meta = meta;

  // simulation grid: power-of-two multiple of the modem rate covering the
  // sub-THz beat with margin
  const double need = 2.2 * (cfg.carrier_separation_hz + cfg.ofdm.if_hz +
                             cfg.ofdm.occupied_bw_hz() / 2.0 + cfg.max_fo_bound_hz() + 1e9);
  double sim_rate = cfg.ofdm.baseband_rate_hz();
  while (sim_rate < need) sim_rate *= 2.0;
  res.truth.sim_rate_hz = sim_rate;

  const size_t sim_n = size_t(std::llround(double(modem_wf.samples.size()) * sim_rate /
                                           modem_wf.sample_rate_hz));
  const double est_mb = double(sim_n) * 16.0 * 6.0 / 1e6 +
                        double(std::bit_ceil(sim_n)) * 16.0 * 2.0 / 1e6;
  if (est_mb > cfg.sim.memory_cap_mb)
    throw ConfigError("full_field: estimated working set " + std::to_string(est_mb) +
                      " MB exceeds sim.memory_cap_mb; raise the cap or use the "
                      "equivalent_baseband fidelity");

  const double duration = double(sim_n) / sim_rate + 1e-9;
  auto noise = detail::draw_noise(cfg, duration);
  res.truth.fo_composite_hz = noise.fo_composite_hz;
  res.truth.laser1_offset_hz = noise.laser1.delta_f_hz;
  res.truth.laser2_offset_hz = noise.laser2.delta_f_hz;
  res.truth.rf_source_offset_hz = noise.rf_source.delta_f_hz;
  FiberParams fiber = cfg.fiber;
  if (!cfg.dispersion_on) fiber.dispersion_ps_nm_km = 0.0;
  res.truth.walkoff_ps =
      std::abs(walkoff_s(fiber, cfg.laser1.center_freq_hz, cfg.laser2.center_freq_hz)) * 1e12;

  // optical reference midway between the lasers keeps both inside the grid
  const double bw_half = cfg.ofdm.occupied_bw_hz() / 2.0;
  const double ref_opt =
      cfg.laser1.center_freq_hz + (cfg.ofdm.if_hz + bw_half - cfg.carrier_separation_hz) / 2.0;

  Waveform drive = place_at_if(modem_wf, cfg.ofdm.if_hz, sim_rate);
  Waveform laser1 =
      laser_field_from_path(cfg.laser1, noise.laser1, sim_n, sim_rate, ref_opt);
  Waveform mod = ossb_modulate(laser1, drive, cfg.modulator);
  laser1.samples.clear();
  drive.samples.clear();

  // band-select filter after the modulator; in dsb mode the lower sideband is
  // part of the signal and stays inside the passband
  const double guard = 2e9;
  const double obpf_lo = cfg.modulator.mode == ModMode::dsb
                             ? cfg.laser1.center_freq_hz - cfg.ofdm.if_hz - bw_half - guard
                             : cfg.laser1.center_freq_hz - guard;
  mod = bandpass(mod, obpf_lo, cfg.laser1.center_freq_hz + cfg.ofdm.if_hz + bw_half + guard);
  mod = edfa(mod, cfg.edfa_gain_db, cfg.edfa_nf_db, seed_child(cfg.seed, "edfa"));

  Waveform laser2 =
      laser_field_from_path(cfg.laser2, noise.laser2, sim_n, sim_rate, ref_opt);
  Waveform field = combine(mod, laser2, cfg.split_loss_on);
  mod.samples.clear();
  laser2.samples.clear();
  field = fiber_propagate(field, fiber);

  // photodiode band: carrier beat through signal beat plus margin (the lower
  // sideband's beat as well in dsb mode)
  const double f_sig = cfg.signal_freq_hz();
  const double pd_lo = (cfg.modulator.mode == ModMode::dsb
                            ? cfg.carrier_separation_hz - cfg.ofdm.if_hz - bw_half
                            : cfg.carrier_separation_hz) -
                       guard;
  const double pd_hi = f_sig + bw_half + guard;
  Waveform thz = photodiode(field, cfg.pda.responsivity_a_w, pd_lo, pd_hi);
  field.samples.clear();

  const double emitted = pda_emitted_power_w(cfg.pda, f_sig);
  res.truth.emitted_power_w = emitted;
  const double p_now = mean_power(thz);
  if (!(p_now > 0.0)) throw FormatError("full_field: photodiode produced no beat power");
  scale(thz, std::sqrt(emitted / p_now) * std::pow(10.0, -cfg.pda.wireless_loss_db / 20.0));

  Waveform lo = gen_lo_from_path(cfg.lo_freq_hz(), cfg.rx, noise.rf_source, thz.samples.size(),
                                 sim_rate);
  Waveform ifw = mixer_downconvert(thz, lo, cfg.rx);
  thz.samples.clear();
  lo.samples.clear();

  const double adc_rate = detail::auto_adc_rate(cfg);
  res.truth.adc_rate_hz = adc_rate;
  Waveform capture = adc_capture(ifw, adc_rate, 0);
  ifw.samples.clear();

  const double snr_eff = cfg.rx.rx_snr_db + detail::ripple_gain_db(cfg, f_sig);
  res.truth.snr_effective_db = snr_eff;
  if (cfg.additive_noise_on)
    add_awgn(capture, snr_eff, cfg.ofdm.occupied_bw_hz(), seed_child(cfg.seed, "rx_noise"),
             detail::frame_ref_power(capture, meta));
  quantize_inplace(capture, cfg.rx.adc_bits);

  res.capture = std::move(capture);
  res.report = run_rx_chain(res.capture, meta, detail::rx_options(cfg));
  detail::finish_report(cfg, res);
  return res;
}

inline RunResult run_link(const LinkConfig& cfg) {
  validate_link_config(cfg);
  return cfg.fidelity == "full_field" ? run_full_field(cfg) : run_equivalent_baseband(cfg);
}

}  // namespace arof
