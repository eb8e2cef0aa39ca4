// Acceptance gate for the calibrated 200 GHz operating point. Each criterion
// prints one [PASS]/[FAIL] line with the measured numbers and its pinned
// tolerances; the exit code is the number of failed criteria.
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "analytic_refs.hpp"
#include "arof/config.hpp"
#include "arof/link.hpp"
#include "arof/optical.hpp"
#include "arof/report.hpp"
#include "arof/rxdsp.hpp"
#include "arof/sweep.hpp"
#include "arof/thz.hpp"

using arof::cplx;

namespace {

int g_failures = 0;

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

void verdict(int idx, const char* name, bool ok, const std::string& detail) {
  std::printf("[%s] %d %s: %s\n", ok ? "PASS" : "FAIL", idx, name, detail.c_str());
  std::fflush(stdout);
  if (!ok) ++g_failures;
}

double now_s() {
  return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

double variance(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m += x;
  m /= double(v.size());
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return s / double(v.size());
}

// minimum distance between distinct ideal constellation points
double min_ref_distance(const std::vector<std::vector<cplx>>& refs) {
  std::vector<cplx> uniq;
  for (const auto& row : refs)
    for (const auto& p : row) {
      bool seen = false;
      for (const auto& u : uniq)
        if (std::abs(u - p) < 1e-9) {
          seen = true;
          break;
        }
      if (!seen) uniq.push_back(p);
    }
  double dmin = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < uniq.size(); ++i)
    for (size_t j = i + 1; j < uniq.size(); ++j)
      dmin = std::min(dmin, std::abs(uniq[i] - uniq[j]));
  return dmin;
}

std::vector<double> point_means(const arof::SweepResult& s, const std::vector<double>& xs,
                                int n_seeds) {
  std::vector<double> out;
  for (double x : xs) {
    double sum = 0.0;
    int n = 0;
    for (const auto& r : s.rows)
      if (r.x_value == x && r.status == "ok") {
        sum += r.evm_percent;
        ++n;
      }
    out.push_back(n == n_seeds ? sum / n : std::numeric_limits<double>::quiet_NaN());
  }
  return out;
}

// rebias applied by the bandwidth sweep: constant transmit power
arof::LinkConfig at_spacing(const arof::LinkConfig& base, double spacing) {
  arof::LinkConfig c = base;
  c.ofdm.sc_spacing_hz = spacing;
  c.rx.rx_snr_db = base.rx.rx_snr_db - 10.0 * std::log10(spacing / base.ofdm.sc_spacing_hz);
  return c;
}

// Independent FO reference: locates the frame on the raw ADC record with a
// frame-length in-band power gate, takes one useful-length window per known
// symbol (offset back into the cyclic prefix so timing slop is a cyclic
// shift), zero-pads the FFT x32 and scans candidate offsets densely with
// parabolic refinement. The score at each candidate is the coherent sum of
// adjacent-tone products from the preamble, the training symbol and the
// payload pilots rotated by the known transmit pattern, which cancels the
// timing phase ramp, rejects whole-comb aliases that a magnitude-only comb
// cannot separate, and averages the laser drift over the whole frame the same
// way the frame-wide composite offset does.
double oracle_fo(const arof::RunResult& r, const arof::LinkConfig& c, double span_hz) {
  const auto& cap = r.capture;
  const double rate = cap.sample_rate_hz;
  const double sp = c.ofdm.sc_spacing_hz;
  const size_t cp_n = size_t(std::llround(c.ofdm.cp_fraction / sp * rate));
  const size_t use_n = size_t(std::llround(rate / sp));
  const size_t sym_n = use_n + cp_n;
  const size_t frame_n = size_t(2 + c.ofdm.n_payload_symbols) * sym_n;

  arof::Waveform filt = arof::bandpass(cap, c.ofdm.if_hz - 150e6, c.ofdm.if_hz + 150e6);
  if (filt.samples.size() < frame_n + use_n)
    throw arof::FormatError("oracle: capture too short");
  std::vector<double> pref(filt.samples.size() + 1, 0.0);
  for (size_t i = 0; i < filt.samples.size(); ++i)
    pref[i + 1] = pref[i] + std::norm(filt.samples[i]);
  size_t f0 = 0;
  double best_g = -1.0;
  for (size_t k = 0; k + frame_n <= filt.samples.size(); ++k) {
    const double g = pref[k + frame_n] - pref[k];
    if (g > best_g) {
      best_g = g;
      f0 = k;
    }
  }
  const size_t start = f0 + cp_n - cp_n / 4;
  if (start + frame_n > cap.samples.size())
    throw arof::FormatError("oracle: frame at capture edge");

  size_t m = 0;
  auto spec_at = [&](size_t st) {
    arof::Waveform win;
    win.sample_rate_hz = rate;
    win.ref_freq_hz = 0.0;
    win.samples.assign(cap.samples.begin() + long(st), cap.samples.begin() + long(st + use_n));
    win.samples.resize(use_n * 32, cplx(0.0, 0.0));
    return arof::detail::padded_spectrum(win, m);
  };
  const auto spec0 = spec_at(start);
  const double df = rate / double(m);
  std::vector<double> cand;
  for (double f = -span_hz; f <= span_hz; f += df) cand.push_back(f);
  std::vector<double> total(cand.size(), 0.0);

  struct TonePair {
    double ta, tb;
    cplx rot;
  };
  // consecutive loaded tones grouped by subcarrier gap: the timing phase ramp
  // is a common rotation within each group, and the common-phase term cancels
  // inside each product, so a group stays coherent across every symbol
  std::map<int, std::vector<cplx>> acc;
  auto add_window = [&](const std::vector<cplx>& spec, const std::vector<cplx>& bins) {
    std::map<int, std::vector<TonePair>> groups;
    int prev = -1;
    for (size_t s = 0; s < r.meta.occupied.size(); ++s) {
      if (std::abs(bins[s]) <= 0.0) continue;
      if (prev >= 0)
        groups[r.meta.occupied[s] - r.meta.occupied[prev]].push_back(
            {c.ofdm.if_hz + r.meta.occupied[prev] * sp, c.ofdm.if_hz + r.meta.occupied[s] * sp,
             std::conj(bins[prev]) * bins[s]});
      prev = int(s);
    }
    auto bin_at = [&](double q) {
      long idx = std::llround(q / df);
      idx %= long(m);
      if (idx < 0) idx += long(m);
      return spec[size_t(idx)];
    };
    for (const auto& [gap, ps] : groups) {
      auto& vec = acc[gap];
      if (vec.empty()) vec.assign(cand.size(), cplx(0.0, 0.0));
      for (size_t i = 0; i < cand.size(); ++i) {
        cplx s2{0.0, 0.0};
        for (const auto& p : ps)
          s2 += p.rot * bin_at(p.ta + cand[i]) * std::conj(bin_at(p.tb + cand[i]));
        vec[i] += s2;
      }
    }
  };

  add_window(spec0, r.meta.preamble_bins);
  add_window(spec_at(start + sym_n), r.meta.training_bins);
  std::vector<cplx> pilot_bins(r.meta.occupied.size(), cplx(0.0, 0.0));
  for (int pslot : r.meta.pilots) pilot_bins[size_t(pslot)] = r.meta.pilot_value;
  for (int k = 0; k < c.ofdm.n_payload_symbols; ++k)
    add_window(spec_at(start + size_t(2 + k) * sym_n), pilot_bins);
  for (const auto& [gap, vec] : acc)
    for (size_t i = 0; i < cand.size(); ++i) total[i] += std::abs(vec[i]);

  size_t best_i = 0;
  for (size_t i = 1; i < cand.size(); ++i)
    if (total[i] > total[best_i]) best_i = i;
  double best_f = cand[best_i];
  if (best_i > 0 && best_i + 1 < cand.size()) {
    const double lo = total[best_i - 1], hi = total[best_i + 1];
    const double den = lo - 2.0 * total[best_i] + hi;
    if (den < 0.0) best_f += 0.5 * df * (lo - hi) / den;
  }

  // fine stage: cyclic-prefix correlation at one useful-length lag, summed
  // over every symbol of the frame. Each tone completes an integer number of
  // cycles per useful length, so the lag phase measures the offset alone,
  // free of the spectral leakage that biases the windowed scan; the scan
  // result only resolves the whole-spacing ambiguity of the phase
  cplx rsum{0.0, 0.0};
  const size_t guard = cp_n / 4;
  for (size_t k = 0; k < size_t(2 + c.ofdm.n_payload_symbols); ++k) {
    const size_t b = f0 + k * sym_n;
    for (size_t i = b + guard; i < b + cp_n; ++i)
      rsum += filt.samples[i + use_n] * std::conj(filt.samples[i]);
  }
  const double frac = std::arg(rsum) * sp / (2.0 * std::numbers::pi);
  return std::round((best_f - frac) / sp) * sp + frac;
}

void criterion1(const arof::LinkConfig& base) {
  const double t0 = now_s();
  const auto r = arof::run_link(base);
  const double dt = now_s() - t0;
  const auto& refs = r.meta.payload_ref;
  const double radius = 0.5 * min_ref_distance(refs);
  const double cap_raw = arof::capture_fraction(r.report.constellations.at("raw"), refs, radius);
  const double cap_fo = arof::capture_fraction(r.report.constellations.at("post_fo"), refs, radius);
  const double var_fo = variance(arof::per_symbol_phase(r.report.constellations.at("post_fo"), refs));
  const double var_cpe =
      variance(arof::per_symbol_phase(r.report.constellations.at("post_cpe"), refs));
  const double ratio = var_fo / var_cpe;
  const bool ok = r.report.status == "ok" && cap_raw < 0.95 && cap_fo >= 0.95 && ratio > 10.0 &&
                  r.report.evm_percent <= 3.5 && dt < 30.0;
  verdict(1, "stage constellations", ok,
          fmt("raw cluster capture %.3f (<0.95), post-FO %.3f (>=0.95), symbol-phase variance "
              "x%.0f (>x10), post-CPE EVM %.2f%% (<=3.5%%), %.1f s (<30 s)",
              cap_raw, cap_fo, ratio, r.report.evm_percent, dt));
}

void criterion2(const arof::LinkConfig& base) {
  const double t0 = now_s();
  const std::vector<double> xs = {2e6, 10e6, 20e6, 40e6};
  const int n_seeds = 20;
  const auto sw = arof::sweep_bandwidth(base, xs, n_seeds);
  const auto means = point_means(sw, xs, n_seeds);
  const bool increasing =
      means[0] < means[1] && means[1] < means[2] && means[2] < means[3];
  const bool window = means[3] >= 6.0 && means[3] <= 10.0;

  // the 3GPP flag must read false above 8% and true below it, with both
  // outcomes present at the 4 GHz point
  int above = 0, below = 0;
  bool flags_ok = true;
  for (const auto& row : sw.rows) {
    if (row.x_value != 40e6 || row.status != "ok") continue;
    (row.evm_percent > 8.0 ? above : below)++;
  }
  for (int side = 0; side < 2; ++side) {
    for (const auto& row : sw.rows) {
      if (row.x_value != 40e6 || row.status != "ok") continue;
      if ((row.evm_percent > 8.0) != (side == 0)) continue;
      arof::LinkConfig c = at_spacing(base, 40e6);
      c.seed = row.seed;
      const auto rr = arof::run_link(c);
      flags_ok = flags_ok && rr.report.pass_3gpp == (rr.report.evm_percent <= 8.0) &&
                 std::abs(rr.report.evm_percent - row.evm_percent) < 1e-9 &&
                 rr.report.pass_3gpp == (side != 0);
      break;
    }
  }
  const double dt = now_s() - t0;
  const bool ok = increasing && window && above > 0 && below > 0 && flags_ok && dt < 300.0;
  verdict(2, "constant-power bandwidth sweep", ok,
          fmt("means %.2f/%.2f/%.2f/%.2f%% increasing=%d, 4 GHz point %.2f%% in [6,10], "
              "flag split %d fail / %d pass at 8%% (consistent=%d), %.0f s (<300 s)",
              means[0], means[1], means[2], means[3], int(increasing), means[3], above, below,
              int(flags_ok), dt));
}

void criterion3(const arof::LinkConfig& base) {
  arof::LinkConfig c = at_spacing(base, 40e6);
  uint64_t bits = 0, errs = 0;
  double evm_sum = 0.0;
  int n = 0;
  for (int i = 0; bits < 1000000; ++i) {
    c.seed = arof::seed_child(base.seed, "ber_rep", uint64_t(i));
    const auto r = arof::run_link(c);
    if (r.report.status != "ok") continue;
    bits += r.report.n_bits;
    errs += r.report.n_bit_errors;
    evm_sum += r.report.evm_percent;
    ++n;
  }
  const double ber = double(errs) / double(bits);
  const double mean_evm = evm_sum / n;
  const double snr_db = -20.0 * std::log10(mean_evm / 100.0);
  const double oracle = refs::gray_qam_ber(64, snr_db);
  const bool ok = bits >= 1000000 && ber <= 3.0 * 2.2e-3 && ber >= 2.2e-3 / 3.0 &&
                  ber <= 2.0 * oracle && ber >= oracle / 2.0;
  verdict(3, "uncoded 64-QAM BER", ok,
          fmt("BER %.3e over %llu bits at EVM %.2f%%, reference 2.2e-3 (x%.2f, within x3), "
              "Gray-QAM analytic %.3e (x%.2f, within x2)",
              ber, (unsigned long long)bits, mean_evm, ber / 2.2e-3, oracle, ber / oracle));
}

void criterion4(const arof::LinkConfig& base) {
  std::vector<double> xs;
  for (double f = 170e9; f <= 260e9; f += 10e9) xs.push_back(f);
  const int n_seeds = 20;
  const auto sw = arof::sweep_carrier(base, xs, n_seeds);
  const auto means = point_means(sw, xs, n_seeds);
  double lo = 1e9, hi = -1e9;
  bool all_ok = true;
  for (double m : means) {
    lo = std::min(lo, m);
    hi = std::max(hi, m);
  }
  for (const auto& row : sw.rows)
    all_ok = all_ok && row.status == "ok" && row.evm_percent < 8.0;
  const double spread = hi - lo;

  const auto bad = arof::sweep_carrier(base, {165e9, 265e9}, 1);
  bool out_flagged = bad.rows.size() == 2;
  for (const auto& row : bad.rows) out_flagged = out_flagged && row.status == "band_error";
  bool thrown = false;
  try {
    arof::LinkConfig c = base;
    c.carrier_separation_hz = 265e9 - base.ofdm.if_hz;
    c.laser2.center_freq_hz = c.laser1.center_freq_hz - c.carrier_separation_hz;
    arof::run_link(c);
  } catch (const arof::BandError&) {
    thrown = true;
  }
  const bool ok = spread < 0.3 && all_ok && out_flagged && thrown;
  verdict(4, "carrier sweep flatness", ok,
          fmt("mean EVM %.2f..%.2f%% across 170-260 GHz, spread %.3f pp (<0.3), all rows ok "
              "and <8%%=%d, out-of-band rows flagged=%d, direct run throws band error=%d",
              lo, hi, spread, int(all_ok), int(out_flagged), int(thrown)));
}

void criterion5(const arof::LinkConfig& base) {
  const double t0 = now_s();
  arof::LinkConfig c = base;
  c.ofdm.n_payload_symbols = 8;
  double sum = 0.0;
  const int n = 20;
  for (int i = 0; i < n; ++i) {
    c.seed = arof::seed_child(base.seed, "fid_rep", uint64_t(i));
    c.fidelity = "equivalent_baseband";
    const double eb = arof::run_link(c).report.evm_percent;
    c.fidelity = "full_field";
    const double ff = arof::run_link(c).report.evm_percent;
    sum += std::abs(ff - eb);
  }
  const double mean_delta = sum / n;
  const double dt = now_s() - t0;
  const bool ok = mean_delta < 0.5 && dt < 600.0;
  verdict(5, "fidelity equivalence", ok,
          fmt("mean |EVM_ff - EVM_eb| %.3f pp over %d matched seeds (<0.5), %.0f s (<600 s)",
              mean_delta, n, dt));
}

void criterion6(const arof::LinkConfig& base) {
  arof::LinkConfig c = base;
  c.rx.rx_snr_db = 15.0;
  const int n = 200;
  double err_sum = 0.0, oracle_sum = 0.0, oracle_true_sum = 0.0;
  int int_fail = 0, bad = 0;
  for (int i = 0; i < n; ++i) {
    c.seed = arof::seed_child(base.seed, "fo_rep", uint64_t(i));
    const auto r = arof::run_link(c);
    if (r.report.status != "ok") {
      ++bad;
      continue;
    }
    const double err = r.report.fo_est_hz - r.report.fo_true_hz;
    err_sum += std::abs(err);
    if (std::abs(err) > c.ofdm.sc_spacing_hz / 2.0) ++int_fail;
    const double orc = oracle_fo(r, c, 31e6);
    oracle_sum += std::abs(r.report.fo_est_hz - orc);
    oracle_true_sum += std::abs(orc - r.report.fo_true_hz);
  }
  const double mean_err = err_sum / (n - bad);
  const double mean_vs_oracle = oracle_sum / (n - bad);
  const bool ok = bad == 0 && mean_err < 20e3 && int_fail == 0 && mean_vs_oracle < 20e3;
  verdict(6, "frequency-offset estimator", ok,
          fmt("mean |error| %.1f kHz (<20), integer-bin failures %d (=0), mean |est - dense-scan "
              "reference| %.1f kHz (<20, reference itself %.1f kHz from truth), %d/%d decoded",
              mean_err / 1e3, int_fail, mean_vs_oracle / 1e3, oracle_true_sum / (n - bad) / 1e3,
              n - bad, n));
}

void criterion7(const arof::LinkConfig& base) {
  // (a) dispersion fading: DSB nulls where the analytic phase predicts, SSB flat
  arof::LaserParams lp;
  lp.center_freq_hz = arof::kSpeedOfLight / 1550e-9;
  lp.linewidth_hz = 0.0;
  lp.freq_jitter_hz = 0.0;
  lp.power_mw = 10.0;
  const double rate = 131.072e9;
  const size_t n = 16384;
  const auto carrier = arof::gen_laser_field(lp, n, rate, 1);
  arof::FiberParams fp;
  fp.length_km = 10.0;
  fp.dispersion_ps_nm_km = 17.0;
  fp.attenuation_db_km = 0.2;
  fp.ref_wavelength_nm = 1550.0;
  arof::ModulatorParams mm;
  mm.index = 0.2;
  mm.carrier_suppression_db = 20.0;
  mm.nonlinear = false;
  auto tone_resp = [&](double f, arof::ModMode mode) {
    arof::Waveform d;
    d.sample_rate_hz = rate;
    d.ref_freq_hz = 0.0;
    d.samples.resize(n);
    for (size_t i = 0; i < n; ++i) {
      const double ph = 2.0 * std::numbers::pi * f * double(i) / rate;
      d.samples[i] = cplx(std::cos(ph), std::sin(ph));
    }
    mm.mode = mode;
    const auto cur = arof::photodiode(arof::fiber_propagate(arof::ossb_modulate(carrier, d, mm), fp),
                                      0.3, 0.5e9, 45e9);
    // the photodiode envelope is recentred on the electrical band midpoint
    size_t m = 0;
    const auto spec = arof::detail::padded_spectrum(cur, m);
    long long idx = std::llround((f - cur.ref_freq_hz) / (rate / double(m)));
    idx = ((idx % (long long)m) + (long long)m) % (long long)m;
    return std::norm(spec[size_t(idx)]);
  };
  double null_f = 0.0, null_p = std::numeric_limits<double>::infinity();
  for (double f = 18.0e9; f <= 20.4e9; f += 40e6) {
    const double p = tone_resp(f, arof::ModMode::dsb);
    if (p < null_p) {
      null_p = p;
      null_f = f;
    }
  }
  const double lambda = 1550e-9;
  const double null_ref =
      std::sqrt(arof::kSpeedOfLight / (2.0 * 17e-6 * 1e4 * lambda * lambda));
  const bool dsb_ok = std::abs(null_f - null_ref) / null_ref < 0.01;
  double smin = std::numeric_limits<double>::infinity(), smax = 0.0;
  for (double f = 4e9; f <= 40e9; f += 4e9) {
    const double p = tone_resp(f, arof::ModMode::ssb);
    smin = std::min(smin, p);
    smax = std::max(smax, p);
  }
  const double ssb_ripple_db = 10.0 * std::log10(smax / smin);
  const bool ssb_ok = ssb_ripple_db < 1.0;

  // (b) two-laser walk-off through the same fibre
  const double wo_ps =
      std::abs(arof::walkoff_s(fp, lp.center_freq_hz, lp.center_freq_hz - 195e9)) * 1e12;
  const bool wo_ok = std::abs(wo_ps - 265.0) <= 3.0;

  // (c) multiplied LO phase-noise scaling
  arof::LaserParams src;
  src.center_freq_hz = 32.5e9;
  src.linewidth_hz = 1e5;
  src.freq_jitter_hz = 0.0;
  src.power_mw = 1.0;
  const double lo_rate = 1e8;
  const size_t lo_n = size_t(1) << 19;
  const auto path = arof::gen_phase_path(src, double(lo_n) / lo_rate, 1.0 / lo_rate, 7);
  arof::ReceiverParams rp;
  rp.rf_source_freq_hz = 32.5e9;
  rp.rf_source_linewidth_hz = 1e5;
  rp.multiplier_factor = 6;
  const auto lo = arof::gen_lo_from_path(195e9, rp, path, lo_n, lo_rate);
  std::vector<double> incr(lo_n - 1);
  for (size_t i = 0; i + 1 < lo_n; ++i)
    incr[i] = std::arg(lo.samples[i + 1] * std::conj(lo.samples[i]));
  const double beta_eff = variance(incr) / (2.0 * std::numbers::pi / lo_rate);
  const double lo_ratio = beta_eff / src.linewidth_hz;
  const bool lo_ok = std::abs(lo_ratio - 36.0) <= 9.0;

  // (d) EVM equals the AWGN identity
  arof::Rng rng(arof::seed_child(base.seed, "awgn_identity"));
  const size_t nsym = size_t(1) << 18;
  std::vector<uint8_t> bits(nsym * 6);
  for (auto& b : bits) b = rng.uniform() < 0.5 ? 1 : 0;
  const auto syms = arof::qam_map(bits, 64);
  double pref = 0.0;
  for (const auto& s : syms) pref += std::norm(s);
  pref /= double(syms.size());
  const double sigma = std::sqrt(pref) * std::pow(10.0, -20.0 / 20.0);
  std::vector<cplx> noisy(syms.size());
  for (size_t i = 0; i < syms.size(); ++i)
    noisy[i] = syms[i] + rng.cgaussian(sigma / std::sqrt(2.0));
  const double evm = arof::compute_evm(noisy, syms);
  const bool awgn_ok = std::abs(evm - 10.0) <= 0.1;

  // (e) raw-rate endpoints
  arof::OfdmParams op = base.ofdm;
  const double rate_lo = arof::compute_raw_rate(op);
  op.sc_spacing_hz = 40e6;
  const double rate_hi = arof::compute_raw_rate(op);
  const bool rate_ok = rate_lo == 1.2e9 && rate_hi == 24e9;

  const bool ok = dsb_ok && ssb_ok && wo_ok && lo_ok && awgn_ok && rate_ok;
  verdict(7, "physics identities", ok,
          fmt("dsb null %.2f GHz (ref %.2f, 1%%), ssb ripple %.2f dB (<1), walkoff %.1f ps "
              "(265+-3), lo scaling x%.1f (36+-25%%), awgn evm %.3f%% (10+-0.1), raw rates "
              "%.1f/%.0f Gb/s (exact)",
              null_f / 1e9, null_ref / 1e9, ssb_ripple_db, wo_ps, lo_ratio, evm, rate_lo / 1e9,
              rate_hi / 1e9));
}

void criterion8(const arof::LinkConfig& base) {
  const auto ra = arof::run_link(base);
  const auto rb = arof::run_link(base);
  const bool json_same =
      arof::report_to_json(ra, base).dump(2) == arof::report_to_json(rb, base).dump(2);
  const bool cons_same = arof::constellations_to_csv(ra) == arof::constellations_to_csv(rb);
  const bool caps_same = ra.capture.samples == rb.capture.samples;
  const auto s1 = arof::sweep_to_csv(arof::sweep_bandwidth(base, {2e6, 10e6}, 3));
  const auto s2 = arof::sweep_to_csv(arof::sweep_bandwidth(base, {2e6, 10e6}, 3));
  arof::LinkConfig jobs = base;
  jobs.sim.jobs = 3;
  const auto s3 = arof::sweep_to_csv(arof::sweep_bandwidth(jobs, {2e6, 10e6}, 3));
  const bool sweep_same = s1 == s2 && s1 == s3;
  const bool ok = json_same && cons_same && caps_same && sweep_same;
  verdict(8, "determinism", ok,
          fmt("repeat report json identical=%d, constellation csv identical=%d, capture samples "
              "identical=%d, sweep csv identical across repeats and worker counts=%d",
              int(json_same), int(cons_same), int(caps_same), int(sweep_same)));
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::fprintf(stderr, "usage: acceptance <config-file>\n");
    return 2;
  }
  arof::LinkConfig base;
  try {
    std::ifstream f(argv[1], std::ios::binary);
    if (!f) throw arof::ConfigError(std::string("cannot open ") + argv[1]);
    std::ostringstream ss;
    ss << f.rdbuf();
    base = arof::load_link_config(ss.str());
  } catch (const std::exception& e) {
    std::fprintf(stderr, "config load failed: %s\n", e.what());
    return 2;
  }

  struct Entry {
    void (*fn)(const arof::LinkConfig&);
    const char* name;
  };
  const Entry entries[] = {
      {criterion1, "stage constellations"}, {criterion2, "constant-power bandwidth sweep"},
      {criterion3, "uncoded 64-QAM BER"},   {criterion4, "carrier sweep flatness"},
      {criterion5, "fidelity equivalence"}, {criterion6, "frequency-offset estimator"},
      {criterion7, "physics identities"},   {criterion8, "determinism"},
  };
  for (int i = 0; i < 8; ++i) {
    try {
      entries[i].fn(base);
    } catch (const std::exception& e) {
      verdict(i + 1, entries[i].name, false, fmt("exception: %s", e.what()));
    }
  }
  std::printf("%d/8 criteria passed\n", 8 - g_failures);
  return g_failures;
}
