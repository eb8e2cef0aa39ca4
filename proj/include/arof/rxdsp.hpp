#pragma once
// Receiver DSP: half-symbol autocorrelation sync with integer-bin offset
// recovery, matched-filter timing refinement, least-squares channel estimate
// with phase-ramp-aware smoothing, pilot common-phase tracking, and the
// EVM/BER metrics. run_rx_chain stitches the stages together and reports a
// constellation snapshot after each one.
#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <map>
#include <numbers>
#include <string>
#include <vector>

#include "arof/errors.hpp"
#include "arof/ofdm.hpp"
#include "arof/spectral.hpp"
#include "arof/waveform.hpp"

namespace arof {

struct SyncResult {
  bool detected = false;
  size_t start_index = 0;  // useful (post-CP) start of the preamble
  double metric_peak = 0.0;
  double fo_fractional_hz = 0.0;  // canonical residual, |x| <= spacing/2
  int fo_integer_bins = 0;
  double fo_total_hz = 0.0;
};

// Half-symbol repetition sync. The preamble occupies even subcarriers only,
// so its time signal repeats with period nfft/2 across the whole symbol
// including the CP; the timing metric plateaus over the CP span and the
// autocorrelation angle encodes the frequency offset modulo one subcarrier
// spacing. A differential spectral correlation against the known preamble
// then pins the integer-bin part; it is immune to the residual phase ramp a
// timing error leaves behind. rx must run at oversample * the modem rate
// (oversample a power of two): large offsets push content past the plain
// modem-rate Nyquist, so estimation happens on the wider grid.
inline SyncResult sc_synchronize(const Waveform& rx, const FrameMeta& meta,
                                 double max_fo_hz, double threshold = 0.5,
                                 int oversample = 1) {
  check_rate(rx, "sc_synchronize");
  if (oversample < 1) throw ConfigError("sc_synchronize: oversample must be >= 1");
  SyncResult res;
  const int n = meta.nfft * oversample;
  const int half = n / 2;
  const int cp = meta.cp * oversample;
  const auto& r = rx.samples;
  if (r.size() < size_t(n) + 1) return res;

  // normalize by the full-window energy, not just the second half's: that
  // bounds the metric to <= 1 and kills the spurious peak where the window
  // straddles the end of the frame into near-silence
  const size_t d_max = r.size() - size_t(n);
  cplx p(0.0, 0.0);
  double e1 = 0.0, e2 = 0.0;
  for (int m = 0; m < half; ++m) {
    p += std::conj(r[size_t(m)]) * r[size_t(m + half)];
    e1 += std::norm(r[size_t(m)]);
    e2 += std::norm(r[size_t(m + half)]);
  }
  std::vector<double> metric(d_max + 1, 0.0);
  std::vector<cplx> pcorr(d_max + 1);
  for (size_t d = 0;; ++d) {
    const double e = 0.5 * (e1 + e2);
    metric[d] = e > 1e-300 ? std::norm(p) / (e * e) : 0.0;
    pcorr[d] = p;
    if (d == d_max) break;
    p -= std::conj(r[d]) * r[d + size_t(half)];
    p += std::conj(r[d + size_t(half)]) * r[d + size_t(n)];
    e1 -= std::norm(r[d]);
    e1 += std::norm(r[d + size_t(half)]);
    e2 -= std::norm(r[d + size_t(half)]);
    e2 += std::norm(r[d + size_t(n)]);
  }

  size_t d_peak = 0;
  for (size_t d = 1; d <= d_max; ++d)
    if (metric[d] > metric[d_peak]) d_peak = d;
  res.metric_peak = metric[d_peak];
  if (res.metric_peak < threshold) return res;

  // plateau midpoint; the plateau spans the CP, so its centre sits cp/2
  // before the useful start
  const double hold = 0.9 * res.metric_peak;
  size_t lo = d_peak, hi = d_peak;
  while (lo > 0 && d_peak - (lo - 1) <= size_t(2 * cp) && metric[lo - 1] >= hold) --lo;
  while (hi < d_max && (hi + 1) - d_peak <= size_t(2 * cp) && metric[hi + 1] >= hold) ++hi;
  const size_t mid = (lo + hi) / 2;
  res.start_index = mid + size_t((cp + 1) / 2);

  const double spacing = meta.params.sc_spacing_hz;
  const double fo_frac_raw = std::arg(pcorr[mid]) * spacing / std::numbers::pi;

  // integer part: derotate one FFT window and correlate differential spectra
  if (r.size() < res.start_index + size_t(n)) return res;
  std::vector<cplx> win(static_cast<size_t>(n));
  const double step = -2.0 * std::numbers::pi * fo_frac_raw / rx.sample_rate_hz;
  for (int i = 0; i < n; ++i) {
    const double ph = step * double(i);
    win[size_t(i)] = r[res.start_index + size_t(i)] * cplx(std::cos(ph), std::sin(ph));
  }
  auto spec = fft(std::move(win));

  // n-point FFT of the oversampled window keeps bin spacing equal to the
  // subcarrier spacing, so subcarrier k sits at index k mod n
  std::vector<cplx> ref_bin(size_t(n), 0.0);
  for (size_t i = 0; i < meta.occupied.size(); ++i)
    ref_bin[size_t((meta.occupied[i] + n) % n)] = meta.preamble_bins[i];
  std::vector<std::pair<int, cplx>> diffs;  // (k, C_k * conj(C_{k-2}))
  for (int k : meta.occupied) {
    const cplx a = ref_bin[size_t((k + n) % n)];
    const cplx b = ref_bin[size_t((k - 2 + n) % n)];
    if (std::norm(a) > 0.0 && std::norm(b) > 0.0) diffs.emplace_back(k, a * std::conj(b));
  }
  const int w_bins = int(std::ceil(std::abs(max_fo_hz) / spacing)) + 1;
  if (meta.occupied.back() + w_bins + 2 >= n / 2)
    throw ConfigError("sc_synchronize: oversample too small for this offset search range");
  int g_best = 0;
  double m_best = -1.0;
  for (int g = -w_bins; g <= w_bins; ++g) {
    cplx acc(0.0, 0.0);
    for (const auto& [k, dv] : diffs) {
      const cplx ra = spec[size_t(((k + g) % n + n) % n)];
      const cplx rb = spec[size_t(((k - 2 + g) % n + n) % n)];
      acc += ra * std::conj(rb) * std::conj(dv);
    }
    const double m = std::abs(acc);
    if (m > m_best) {
      m_best = m;
      g_best = g;
    }
  }

  res.fo_total_hz = fo_frac_raw + double(g_best) * spacing;
  res.fo_integer_bins = int(std::lround(res.fo_total_hz / spacing));
  res.fo_fractional_hz = res.fo_total_hz - double(res.fo_integer_bins) * spacing;
  res.detected = true;
  return res;
}

// Remove an estimated carrier offset (multiplies by exp(-j 2 pi fo t)). The
// receiver rotates its own capture here, so the channel-model aliasing policy
// of frequency_shift does not apply.
inline Waveform& correct_fo(Waveform& w, double fo_hz) {
  check_rate(w, "correct_fo");
  const double step = -2.0 * std::numbers::pi * fo_hz / w.sample_rate_hz;
  for (size_t i = 0; i < w.samples.size(); ++i) {
    const double ph = step * double(i);
    w.samples[i] *= cplx(std::cos(ph), std::sin(ph));
  }
  return w;
}

struct TimingRefinement {
  size_t start_index = 0;
  double corr = 0.0;  // normalized matched-filter power, 1 = perfect
};

// Matched-filter polish of the coarse timing after FO correction. The search
// span must stay below half the preamble period (nfft/2) or the repeated
// structure becomes ambiguous.
inline TimingRefinement refine_timing(const Waveform& rx, const FrameMeta& meta,
                                      size_t coarse_start, int span = -1) {
  if (span < 0) span = meta.cp;
  span = std::min(span, meta.nfft / 2 - 1);
  const auto tpl = preamble_time(meta);
  double tpl_e = 0.0;
  for (auto v : tpl) tpl_e += std::norm(v);
  const auto& r = rx.samples;
  TimingRefinement best;
  const size_t lo = coarse_start > size_t(span) ? coarse_start - size_t(span) : 0;
  const size_t hi = coarse_start + size_t(span);
  for (size_t d = lo; d <= hi; ++d) {
    if (d + tpl.size() > r.size()) break;
    cplx acc(0.0, 0.0);
    double e = 0.0;
    for (size_t i = 0; i < tpl.size(); ++i) {
      acc += r[d + i] * std::conj(tpl[i]);
      e += std::norm(r[d + i]);
    }
    const double c = e > 1e-300 ? std::norm(acc) / (e * tpl_e) : 0.0;
    if (c > best.corr) {
      best.corr = c;
      best.start_index = d;
    }
  }
  return best;
}

// Per-subcarrier least-squares channel estimate from the training symbol.
inline std::vector<cplx> estimate_channel(const SymbolGrid& grid, const FrameMeta& meta) {
  if (grid.bins.empty() || grid.bins[0].size() != meta.occupied.size())
    throw FormatError("estimate_channel: grid does not match the frame layout");
  std::vector<cplx> h(meta.occupied.size());
  for (size_t i = 0; i < h.size(); ++i) h[i] = grid.bins[0][i] / meta.training_bins[i];
  return h;
}

// Noise smoothing that respects a timing-offset phase ramp: estimate the
// linear phase across subcarriers from adjacent-bin products, flatten it,
// boxcar-average, then restore the ramp. Averaging the raw estimate directly
// would shrink its magnitude and bias every equalized symbol.
inline std::vector<cplx> smooth_channel(const std::vector<cplx>& h, const FrameMeta& meta,
                                        int window = 16) {
  if (h.size() != meta.occupied.size())
    throw FormatError("smooth_channel: estimate length does not match the grid");
  if (window <= 1 || h.size() < 3) return h;
  cplx slope_acc(0.0, 0.0);
  for (size_t i = 0; i + 1 < h.size(); ++i)
    if (meta.occupied[i + 1] - meta.occupied[i] == 1) slope_acc += h[i + 1] * std::conj(h[i]);
  const double slope = std::arg(slope_acc);
  std::vector<cplx> flat(h.size());
  for (size_t i = 0; i < h.size(); ++i) {
    const double ph = -slope * double(meta.occupied[i]);
    flat[i] = h[i] * cplx(std::cos(ph), std::sin(ph));
  }
  std::vector<cplx> out(h.size());
  const int hw = window / 2;
  std::vector<cplx> prefix(h.size() + 1, cplx(0.0, 0.0));
  for (size_t i = 0; i < h.size(); ++i) prefix[i + 1] = prefix[i] + flat[i];
  for (size_t i = 0; i < h.size(); ++i) {
    const size_t a = i > size_t(hw) ? i - size_t(hw) : 0;
    const size_t b = std::min(h.size(), i + size_t(hw) + 1);
    out[i] = (prefix[b] - prefix[a]) / double(b - a);
    const double ph = slope * double(meta.occupied[i]);
    out[i] *= cplx(std::cos(ph), std::sin(ph));
  }
  return out;
}

inline SymbolGrid equalize(const SymbolGrid& grid, const std::vector<cplx>& h) {
  double h_max = 0.0;
  for (auto v : h) h_max = std::max(h_max, std::abs(v));
  SymbolGrid out = grid;
  for (auto& row : out.bins) {
    if (row.size() != h.size()) throw FormatError("equalize: grid/channel size mismatch");
    for (size_t i = 0; i < row.size(); ++i) {
      if (std::abs(h[i]) < 1e-12 * h_max)
        throw FormatError("equalize: channel null at an occupied subcarrier");
      row[i] /= h[i];
    }
  }
  return out;
}

// Common-phase estimate per payload symbol, applied in place to the payload
// rows of an equalized grid. Pilot tones give the initial angle; one
// decision-directed pass over the data subcarriers then sharpens it, since
// eight pilots alone leave a noticeable estimation-noise pedestal on the EVM.
// Returns the applied angles.
inline std::vector<double> cpe_correct(SymbolGrid& grid, const FrameMeta& meta) {
  std::vector<double> theta(grid.bins.size() > 0 ? grid.bins.size() - 1 : 0, 0.0);
  for (size_t t = 1; t < grid.bins.size(); ++t) {
    auto& row = grid.bins[t];
    cplx acc(0.0, 0.0);
    for (int slot : meta.pilots) acc += row[size_t(slot)] * std::conj(meta.pilot_value);
    const double th0 = std::arg(acc);
    const cplx derot(std::cos(th0), -std::sin(th0));
    cplx acc2(0.0, 0.0);
    for (int slot : meta.pilots) acc2 += row[size_t(slot)] * derot * std::conj(meta.pilot_value);
    for (int slot : meta.data) {
      const cplx y = row[size_t(slot)] * derot;
      acc2 += y * std::conj(qam_nearest(y, meta.params.qam_order));
    }
    const double th = th0 + std::arg(acc2);
    theta[t - 1] = th;
    const cplx rot(std::cos(th), -std::sin(th));
    for (auto& v : row) v *= rot;
  }
  return theta;
}

// Root-mean-square error vector magnitude in percent of the reference RMS.
inline double compute_evm(const std::vector<cplx>& meas, const std::vector<cplx>& ref) {
  if (meas.size() != ref.size()) throw FormatError("compute_evm: length mismatch");
  if (meas.empty()) throw FormatError("compute_evm: empty input");
  double err = 0.0, p = 0.0;
  for (size_t i = 0; i < meas.size(); ++i) {
    err += std::norm(meas[i] - ref[i]);
    p += std::norm(ref[i]);
  }
  if (!(p > 0.0)) throw FormatError("compute_evm: zero-power reference");
  return 100.0 * std::sqrt(err / p);
}

// EVM after the best single complex gain fit of the measurement onto the
// reference. Used for the pre-equalizer stages, where absolute gain and a
// global phase are not yet meaningful.
inline double compute_evm_aligned(const std::vector<cplx>& meas, const std::vector<cplx>& ref) {
  if (meas.size() != ref.size() || meas.empty()) throw FormatError("compute_evm_aligned: bad input");
  cplx num(0.0, 0.0);
  double den = 0.0;
  for (size_t i = 0; i < meas.size(); ++i) {
    num += ref[i] * std::conj(meas[i]);
    den += std::norm(meas[i]);
  }
  if (!(den > 0.0)) throw FormatError("compute_evm_aligned: zero-power measurement");
  const cplx a = num / den;
  std::vector<cplx> fitted(meas.size());
  for (size_t i = 0; i < meas.size(); ++i) fitted[i] = a * meas[i];
  return compute_evm(fitted, ref);
}

inline double compute_ber(const std::vector<uint8_t>& rx_bits, const std::vector<uint8_t>& ref_bits,
                          uint64_t* n_err = nullptr) {
  if (rx_bits.size() != ref_bits.size()) throw FormatError("compute_ber: length mismatch");
  if (rx_bits.empty()) throw FormatError("compute_ber: empty input");
  uint64_t e = 0;
  for (size_t i = 0; i < rx_bits.size(); ++i) e += (rx_bits[i] ^ ref_bits[i]) & 1;
  if (n_err) *n_err = e;
  return double(e) / double(rx_bits.size());
}

// Per-symbol complex gain fit of measured points onto their references,
// then the fraction of fitted points within `radius` of the reference. A
// clean QAM constellation keeps nearly all points inside a half-decision
// radius; residual carrier effects scatter them.
inline double capture_fraction(const std::vector<std::vector<cplx>>& pts,
                               const std::vector<std::vector<cplx>>& refs, double radius) {
  if (pts.size() != refs.size() || pts.empty()) throw FormatError("capture_fraction: bad input");
  size_t inside = 0, total = 0;
  for (size_t t = 0; t < pts.size(); ++t) {
    if (pts[t].size() != refs[t].size() || pts[t].empty())
      throw FormatError("capture_fraction: bad symbol row");
    cplx num(0.0, 0.0);
    double den = 0.0;
    for (size_t i = 0; i < pts[t].size(); ++i) {
      num += refs[t][i] * std::conj(pts[t][i]);
      den += std::norm(pts[t][i]);
    }
    const cplx a = den > 0.0 ? num / den : cplx(0.0, 0.0);
    for (size_t i = 0; i < pts[t].size(); ++i) {
      if (std::abs(a * pts[t][i] - refs[t][i]) <= radius) ++inside;
      ++total;
    }
  }
  return double(inside) / double(total);
}

// Per-symbol common-phase angle of the best-fit gain, for rotation statistics.
inline std::vector<double> per_symbol_phase(const std::vector<std::vector<cplx>>& pts,
                                            const std::vector<std::vector<cplx>>& refs) {
  if (pts.size() != refs.size()) throw FormatError("per_symbol_phase: length mismatch");
  std::vector<double> out(pts.size(), 0.0);
  for (size_t t = 0; t < pts.size(); ++t) {
    cplx num(0.0, 0.0);
    for (size_t i = 0; i < pts[t].size(); ++i) num += pts[t][i] * std::conj(refs[t][i]);
    out[t] = std::arg(num);
  }
  return out;
}

struct RxOptions {
  double max_fo_hz = 65e6;
  double sync_threshold = 0.5;
  double refine_min_corr = 0.25;
  int smooth_window = 16;
  bool keep_constellations = true;
};

struct DspReport {
  std::string status = "ok";  // ok | no_frame_found | sync_unreliable
  double evm_percent = std::numeric_limits<double>::quiet_NaN();
  bool pass_3gpp = false;
  double ber = std::numeric_limits<double>::quiet_NaN();
  uint64_t n_bits = 0;
  uint64_t n_bit_errors = 0;
  double fo_est_hz = std::numeric_limits<double>::quiet_NaN();
  double fo_fractional_hz = std::numeric_limits<double>::quiet_NaN();
  int fo_integer_bins = 0;
  size_t frame_start = 0;
  double sync_metric = 0.0;
  double timing_corr = 0.0;
  // stage order: raw, post_fo, post_eq, post_cpe. raw/post_fo EVMs are
  // gain-fit aligned; post_eq/post_cpe use the plain definition.
  std::vector<std::pair<std::string, double>> stage_evm;
  // stage -> per payload symbol -> per data subcarrier
  std::map<std::string, std::vector<std::vector<cplx>>> constellations;
  std::vector<double> cpe_rad;
  // link-layer bookkeeping, NaN/empty when not applicable
  double fo_true_hz = std::numeric_limits<double>::quiet_NaN();
  double walkoff_ps = std::numeric_limits<double>::quiet_NaN();
  double emitted_power_dbm = std::numeric_limits<double>::quiet_NaN();
  double sim_rate_hz = std::numeric_limits<double>::quiet_NaN();
  double adc_rate_hz = std::numeric_limits<double>::quiet_NaN();
  std::string fidelity;
  uint64_t seed = 0;
  std::string config_fingerprint;
};

inline constexpr double k3gppEvmLimitPercent = 8.0;

namespace detail {

inline std::vector<std::vector<cplx>> data_points(const SymbolGrid& g, const FrameMeta& meta) {
  std::vector<std::vector<cplx>> out;
  out.reserve(g.bins.size() > 0 ? g.bins.size() - 1 : 0);
  for (size_t t = 1; t < g.bins.size(); ++t) {
    std::vector<cplx> row(meta.data.size());
    for (size_t d = 0; d < meta.data.size(); ++d) row[d] = g.bins[t][size_t(meta.data[d])];
    out.push_back(std::move(row));
  }
  return out;
}

inline std::vector<cplx> flatten(const std::vector<std::vector<cplx>>& v) {
  std::vector<cplx> out;
  for (const auto& row : v) out.insert(out.end(), row.begin(), row.end());
  return out;
}

// Residual rotation rate from the per-symbol common-phase sequence: unwrap,
// least-squares line, slope converted to Hz via the symbol period.
inline double phase_slope_hz(const std::vector<double>& theta, const FrameMeta& meta) {
  const size_t n = theta.size();
  if (n < 3) return 0.0;
  std::vector<double> u(theta);
  for (size_t i = 1; i < n; ++i) {
    double d = u[i] - theta[i - 1];
    d -= 2.0 * std::numbers::pi * std::round(d / (2.0 * std::numbers::pi));
    u[i] = u[i - 1] + d;
  }
  const double kbar = double(n - 1) / 2.0;
  double num = 0.0, den = 0.0;
  for (size_t i = 0; i < n; ++i) {
    const double dk = double(i) - kbar;
    num += dk * u[i];
    den += dk * dk;
  }
  const double slope = num / den;  // rad per symbol
  const double t_sym = double(meta.symbol_len()) / meta.params.baseband_rate_hz();
  return slope / (2.0 * std::numbers::pi * t_sym);
}

}  // namespace detail

// Full receive chain on an IF capture (ref_freq 0, content centred near the
// numerology's IF). Stages: coarse sync without FO correction (raw), FO
// correction plus matched-filter timing (post_fo), channel equalization
// (post_eq), pilot common-phase removal (post_cpe, the headline EVM).
inline DspReport run_rx_chain(const Waveform& capture, const FrameMeta& meta,
                              const RxOptions& opt = {}) {
  check_rate(capture, "run_rx_chain");
  DspReport rep;
  const auto flat_ref = detail::flatten(meta.payload_ref);

  // channel-select filter around the IF, wide enough for the full FO search
  // range, then rotate the channel down to baseband (a receiver-side mix, so
  // no aliasing policy applies)
  Waveform shifted = capture;
  if (meta.params.if_hz > 0.0) {
    const double half = meta.params.occupied_bw_hz() / 2.0 + opt.max_fo_hz +
                        4.0 * meta.params.sc_spacing_hz;
    shifted = bandpass(shifted, meta.params.if_hz - half, meta.params.if_hz + half);
    correct_fo(shifted, meta.params.if_hz);
  }

  // estimation rate: a power-of-two multiple of the modem rate wide enough to
  // hold the occupied band plus the FO search range without aliasing
  const double modem_rate = meta.params.baseband_rate_hz();
  const double need_nyq =
      (double(meta.params.n_occupied()) / 2.0 + 2.0) * meta.params.sc_spacing_hz + opt.max_fo_hz;
  int q = 1;
  while (q * modem_rate / 2.0 < need_nyq || meta.occupied.back() + int(std::ceil(opt.max_fo_hz / meta.params.sc_spacing_hz)) + 3 >= q * meta.nfft / 2)
    q <<= 1;
  Waveform wide = shifted.sample_rate_hz == q * modem_rate ? shifted : resample(shifted, q * modem_rate);

  const auto sync = sc_synchronize(wide, meta, opt.max_fo_hz, opt.sync_threshold, q);
  rep.sync_metric = sync.metric_peak;
  if (!sync.detected) {
    rep.status = "no_frame_found";
    return rep;
  }
  rep.fo_est_hz = sync.fo_total_hz;
  rep.fo_fractional_hz = sync.fo_fractional_hz;
  rep.fo_integer_bins = sync.fo_integer_bins;

  // raw stage: strided decimation and a slice at the coarse estimate, no FO
  // correction; out-of-band energy folds in, which is the honest picture of
  // skipping the correction
  const size_t cp = size_t(meta.cp);
  {
    const size_t cp_w = cp * size_t(q);
    const size_t raw_start_w = sync.start_index > cp_w ? sync.start_index - cp_w : 0;
    Waveform raw_bb;
    raw_bb.sample_rate_hz = modem_rate;
    raw_bb.ref_freq_hz = 0.0;
    raw_bb.samples.reserve(meta.frame_len());
    for (size_t i = raw_start_w; i < wide.samples.size() && raw_bb.samples.size() < meta.frame_len();
         i += size_t(q))
      raw_bb.samples.push_back(wide.samples[i]);
    if (raw_bb.samples.size() < meta.frame_len()) {
      rep.status = "no_frame_found";
      return rep;
    }
    const auto raw_grid = demodulate(raw_bb, meta, 0);
    auto raw_pts = detail::data_points(raw_grid, meta);
    rep.stage_evm.emplace_back("raw", compute_evm_aligned(detail::flatten(raw_pts), flat_ref));
    if (opt.keep_constellations) rep.constellations["raw"] = std::move(raw_pts);
  }

  correct_fo(wide, sync.fo_total_hz);
  Waveform corr = q == 1 ? std::move(wide) : resample(wide, modem_rate);
  const auto ref_t = refine_timing(corr, meta, sync.start_index / size_t(q));
  rep.timing_corr = ref_t.corr;
  if (ref_t.corr < opt.refine_min_corr) {
    rep.status = "sync_unreliable";
    return rep;
  }
  const size_t frame_start = ref_t.start_index > cp ? ref_t.start_index - cp : 0;
  rep.frame_start = frame_start;
  if (corr.samples.size() < frame_start + meta.frame_len()) {
    rep.status = "no_frame_found";
    return rep;
  }

  // The half-symbol autocorrelation angle only sees one short lag, so its
  // fractional estimate carries tens of kHz of phase-noise-driven error; the
  // leftover intra-symbol rotation is invisible to per-symbol CPE and costs
  // real EVM. A first demodulation pass measures that residue as the slope of
  // the common-phase sequence across the frame, then the capture is re-rotated
  // and demodulated again.
  {
    auto grid_a = demodulate(corr, meta, frame_start);
    auto eq_a = equalize(grid_a, smooth_channel(estimate_channel(grid_a, meta), meta,
                                                opt.smooth_window));
    const auto cpe_a = cpe_correct(eq_a, meta);
    const double f_res = detail::phase_slope_hz(cpe_a, meta);
    if (std::isfinite(f_res) && f_res != 0.0) correct_fo(corr, f_res);
    rep.fo_est_hz = sync.fo_total_hz + f_res;
    rep.fo_integer_bins = int(std::lround(rep.fo_est_hz / meta.params.sc_spacing_hz));
    rep.fo_fractional_hz = rep.fo_est_hz - double(rep.fo_integer_bins) * meta.params.sc_spacing_hz;
  }

  const auto grid = demodulate(corr, meta, frame_start);
  {
    auto pts = detail::data_points(grid, meta);
    rep.stage_evm.emplace_back("post_fo", compute_evm_aligned(detail::flatten(pts), flat_ref));
    if (opt.keep_constellations) rep.constellations["post_fo"] = std::move(pts);
  }

  const auto h = smooth_channel(estimate_channel(grid, meta), meta, opt.smooth_window);
  auto eq = equalize(grid, h);
  {
    auto pts = detail::data_points(eq, meta);
    rep.stage_evm.emplace_back("post_eq", compute_evm(detail::flatten(pts), flat_ref));
    if (opt.keep_constellations) rep.constellations["post_eq"] = std::move(pts);
  }

  rep.cpe_rad = cpe_correct(eq, meta);
  auto pts = detail::data_points(eq, meta);
  const auto flat = detail::flatten(pts);
  rep.evm_percent = compute_evm(flat, flat_ref);
  rep.stage_evm.emplace_back("post_cpe", rep.evm_percent);
  rep.pass_3gpp = rep.evm_percent <= k3gppEvmLimitPercent;

  std::vector<uint8_t> rx_bits;
  rx_bits.reserve(meta.payload_bits.size());
  for (auto s : flat) qam_demap_symbol(s, meta.params.qam_order, rx_bits);
  rep.ber = compute_ber(rx_bits, meta.payload_bits, &rep.n_bit_errors);
  rep.n_bits = rx_bits.size();
  if (opt.keep_constellations) rep.constellations["post_cpe"] = std::move(pts);
  return rep;
}

}  // namespace arof
