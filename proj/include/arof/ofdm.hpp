#pragma once
// OFDM framing: half-repeated preamble for timing/frequency sync, one
// full-grid QPSK training symbol for channel estimation, then Gray-QAM payload
// symbols carrying unit-amplitude pilot tones for common-phase tracking.
#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

#include "arof/errors.hpp"
#include "arof/fft.hpp"
#include "arof/qam.hpp"
#include "arof/rng.hpp"
#include "arof/spectral.hpp"
#include "arof/waveform.hpp"

namespace arof {

struct OfdmParams {
  double sc_spacing_hz = 2e6;
  int n_data_sc = 100;
  int n_pilot = 8;
  int qam_order = 64;
  double cp_fraction = 0.125;  // of the FFT length
  int n_payload_symbols = 16;
  double if_hz = 5e9;

  int n_occupied() const { return n_data_sc + n_pilot; }
  int nfft() const { return int(std::bit_ceil(unsigned(n_occupied() + 1))); }
  int cp_len() const { return int(std::lround(cp_fraction * nfft())); }
  int symbol_len() const { return nfft() + cp_len(); }
  double baseband_rate_hz() const { return sc_spacing_hz * nfft(); }
  // reference width for in-band SNR bookkeeping; the unused DC slot is excluded
  double occupied_bw_hz() const { return sc_spacing_hz * n_occupied(); }
};

inline void validate_params(const OfdmParams& p) {
  if (!(p.sc_spacing_hz > 0.0)) throw ConfigError("ofdm: sc_spacing_hz must be positive");
  if (p.n_data_sc < 1) throw ConfigError("ofdm: n_data_sc must be at least 1");
  if (p.n_pilot < 1) throw ConfigError("ofdm: n_pilot must be at least 1");
  if (p.n_occupied() % 2 != 0)
    throw ConfigError("ofdm: n_data_sc + n_pilot must be even to straddle DC symmetrically");
  if (p.n_pilot >= p.n_occupied()) throw ConfigError("ofdm: pilots must leave room for data");
  qam_bits_per_symbol(p.qam_order);
  if (!(p.cp_fraction > 0.0) || p.cp_fraction >= 1.0)
    throw ConfigError("ofdm: cp_fraction must lie in (0, 1)");
  const double cp = p.cp_fraction * p.nfft();
  if (std::abs(cp - std::lround(cp)) > 1e-9)
    throw ConfigError("ofdm: cp_fraction times the FFT length must be an integer sample count");
  if (p.n_payload_symbols < 1) throw ConfigError("ofdm: n_payload_symbols must be at least 1");
  if (!(p.if_hz >= 0.0)) throw ConfigError("ofdm: if_hz must be non-negative");
}

// Occupied subcarrier indices: -half..-1 then 1..half, DC unused.
inline std::vector<int> occupied_subcarriers(const OfdmParams& p) {
  const int half = p.n_occupied() / 2;
  std::vector<int> ks;
  ks.reserve(p.n_occupied());
  for (int k = -half; k <= half; ++k)
    if (k != 0) ks.push_back(k);
  return ks;
}

// Pilot positions as indices into the occupied-subcarrier list, spread evenly
// with a half-step offset from the band edge.
inline std::vector<int> pilot_slots(const OfdmParams& p) {
  const double step = double(p.n_occupied()) / double(p.n_pilot);
  std::vector<int> slots(p.n_pilot);
  for (int i = 0; i < p.n_pilot; ++i)
    slots[i] = int(std::lround(i * step + step / 2.0));
  for (int i = 1; i < p.n_pilot; ++i)
    if (slots[i] <= slots[i - 1]) throw ConfigError("ofdm: pilot slots must be strictly increasing");
  if (slots.back() >= p.n_occupied()) throw ConfigError("ofdm: pilot slot past band edge");
  return slots;
}

struct FrameMeta {
  OfdmParams params;
  uint64_t seq_seed = 0;
  std::vector<int> occupied;       // subcarrier indices, ascending
  std::vector<int> pilots;         // slots within `occupied`
  std::vector<int> data;           // remaining slots
  std::vector<cplx> preamble_bins; // per occupied slot; zero on odd subcarriers
  std::vector<cplx> training_bins; // per occupied slot
  cplx pilot_value{1.0, 0.0};
  std::vector<uint8_t> payload_bits;               // as transmitted, MSB first
  std::vector<std::vector<cplx>> payload_ref;      // per payload symbol, per data slot

  int nfft = 0, cp = 0;
  int symbol_len() const { return nfft + cp; }
  // symbols: 0 = preamble, 1 = training, 2.. = payload
  int n_symbols() const { return 2 + params.n_payload_symbols; }
  size_t frame_len() const { return size_t(n_symbols()) * size_t(symbol_len()); }
  // first sample of the useful (post-CP) part of symbol i
  size_t useful_start(int i) const { return size_t(i) * size_t(symbol_len()) + size_t(cp); }
  size_t bits_per_frame() const {
    return size_t(params.n_payload_symbols) * size_t(params.n_data_sc) *
           size_t(qam_bits_per_symbol(params.qam_order));
  }
};

namespace detail {

// spectrum over occupied slots -> one time-domain symbol (with CP), appended
inline void append_symbol(std::vector<cplx>& out, const std::vector<cplx>& bins,
                          const FrameMeta& meta) {
  const int n = meta.nfft;
  std::vector<cplx> spec(size_t(n), 0.0);
  for (size_t i = 0; i < meta.occupied.size(); ++i) {
    const int k = meta.occupied[i];
    spec[size_t((k + n) % n)] = bins[i];
  }
  auto t = ifft(std::move(spec));
  const double u = std::sqrt(double(n));
  for (auto& v : t) v *= u;
  for (int i = n - meta.cp; i < n; ++i) out.push_back(t[size_t(i)]);
  out.insert(out.end(), t.begin(), t.end());
}

}  // namespace detail

// Frame assembly at the modem rate (nfft * spacing), ref_freq 0. payload_bits
// must hold exactly bits_per_frame() entries of 0/1. seq_seed drives the
// preamble/training sequences so receiver and transmitter can share them.
inline std::pair<Waveform, FrameMeta> build_frame(const OfdmParams& p,
                                                  const std::vector<uint8_t>& payload_bits,
                                                  uint64_t seq_seed) {
  validate_params(p);
  FrameMeta meta;
  meta.params = p;
  meta.seq_seed = seq_seed;
  meta.nfft = p.nfft();
  meta.cp = p.cp_len();
  meta.occupied = occupied_subcarriers(p);
  meta.pilots = pilot_slots(p);
  for (int s = 0; s < p.n_occupied(); ++s)
    if (!std::binary_search(meta.pilots.begin(), meta.pilots.end(), s)) meta.data.push_back(s);

  if (payload_bits.size() != meta.bits_per_frame())
    throw FormatError("build_frame: payload must hold exactly " + std::to_string(meta.bits_per_frame()) +
                      " bits, got " + std::to_string(payload_bits.size()));
  for (auto b : payload_bits)
    if (b > 1) throw FormatError("build_frame: payload entries must be 0 or 1");
  meta.payload_bits = payload_bits;

  // preamble: boosted QPSK on even subcarriers makes the two symbol halves
  // identical in time; odd subcarriers stay empty
  Rng pre(seed_child(seq_seed, "preamble"));
  meta.preamble_bins.assign(meta.occupied.size(), 0.0);
  const double boost = std::sqrt(2.0);
  for (size_t i = 0; i < meta.occupied.size(); ++i) {
    if (meta.occupied[i] % 2 != 0) continue;
    const double re = pre.uniform() < 0.5 ? -1.0 : 1.0;
    const double im = pre.uniform() < 0.5 ? -1.0 : 1.0;
    meta.preamble_bins[i] = cplx(re, im) * (boost / std::sqrt(2.0));
  }
  // training: unit QPSK on every occupied subcarrier
  Rng tr(seed_child(seq_seed, "training"));
  meta.training_bins.resize(meta.occupied.size());
  for (auto& v : meta.training_bins) {
    const double re = tr.uniform() < 0.5 ? -1.0 : 1.0;
    const double im = tr.uniform() < 0.5 ? -1.0 : 1.0;
    v = cplx(re, im) / std::sqrt(2.0);
  }

  Waveform w;
  w.sample_rate_hz = p.baseband_rate_hz();
  w.ref_freq_hz = 0.0;
  w.samples.reserve(meta.frame_len());
  detail::append_symbol(w.samples, meta.preamble_bins, meta);
  detail::append_symbol(w.samples, meta.training_bins, meta);

  const int m = qam_bits_per_symbol(p.qam_order);
  meta.payload_ref.resize(size_t(p.n_payload_symbols));
  size_t bit = 0;
  std::vector<cplx> bins(meta.occupied.size());
  for (int t = 0; t < p.n_payload_symbols; ++t) {
    std::fill(bins.begin(), bins.end(), cplx(0.0, 0.0));
    for (int slot : meta.pilots) bins[size_t(slot)] = meta.pilot_value;
    auto& ref = meta.payload_ref[size_t(t)];
    ref.resize(meta.data.size());
    for (size_t d = 0; d < meta.data.size(); ++d) {
      const cplx s = qam_map_symbol(payload_bits.data() + bit, p.qam_order);
      bit += size_t(m);
      bins[size_t(meta.data[d])] = s;
      ref[d] = s;
    }
    detail::append_symbol(w.samples, bins, meta);
  }
  return {std::move(w), std::move(meta)};
}

// convenience: random payload from a seed
inline std::vector<uint8_t> random_payload_bits(const OfdmParams& p, uint64_t seed) {
  validate_params(p);
  const size_t n = size_t(p.n_payload_symbols) * size_t(p.n_data_sc) *
                   size_t(qam_bits_per_symbol(p.qam_order));
  Rng rng(seed);
  std::vector<uint8_t> bits(n);
  for (auto& b : bits) b = uint8_t(rng.next_u64() & 1);
  return bits;
}

// the useful (post-CP) part of the preamble in time, for matched filtering
inline std::vector<cplx> preamble_time(const FrameMeta& meta) {
  std::vector<cplx> buf;
  detail::append_symbol(buf, meta.preamble_bins, meta);
  return std::vector<cplx>(buf.begin() + meta.cp, buf.end());
}

struct SymbolGrid {
  // [symbol][occupied slot]; symbol 0 = training, 1.. = payload
  std::vector<std::vector<cplx>> bins;
};

// FFT demodulation of a frame whose first sample (preamble CP start) sits at
// frame_start in rx. rx must be at the modem rate, content at baseband.
inline SymbolGrid demodulate(const Waveform& rx, const FrameMeta& meta, size_t frame_start) {
  if (rx.samples.size() < frame_start + meta.frame_len())
    throw FormatError("demodulate: capture too short for a full frame at this offset");
  SymbolGrid g;
  g.bins.resize(size_t(meta.n_symbols() - 1));
  const int n = meta.nfft;
  const double u = 1.0 / std::sqrt(double(n));
  std::vector<cplx> buf(static_cast<size_t>(n));
  for (int s = 1; s < meta.n_symbols(); ++s) {
    const size_t at = frame_start + meta.useful_start(s);
    std::copy(rx.samples.begin() + at, rx.samples.begin() + at + size_t(n), buf.begin());
    auto spec = fft(buf);
    auto& row = g.bins[size_t(s - 1)];
    row.resize(meta.occupied.size());
    for (size_t i = 0; i < meta.occupied.size(); ++i) {
      const int k = meta.occupied[i];
      row[i] = spec[size_t((k + n) % n)] * u;
    }
  }
  return g;
}

// DAC stage: interpolate to the converter rate and mix up to the IF.
inline Waveform place_at_if(const Waveform& baseband, double if_hz, double dac_rate_hz) {
  check_rate(baseband, "place_at_if");
  if (!(if_hz > 0.0)) throw ConfigError("place_at_if: if_hz must be positive");
  if (!(dac_rate_hz >= baseband.sample_rate_hz))
    throw ConfigError("place_at_if: converter rate below the modem rate");
  Waveform w = resample(baseband, dac_rate_hz);
  frequency_shift(w, if_hz);
  return w;
}

// uncoded air rate implied by the numerology, bit/s
inline double compute_raw_rate(const OfdmParams& p) {
  validate_params(p);
  return double(p.n_data_sc) * double(qam_bits_per_symbol(p.qam_order)) * p.sc_spacing_hz;
}

}  // namespace arof
