#pragma once
// Complex-envelope waveform container shared by every stage of the link.
#include <cmath>
#include <complex>
#include <vector>

#include "arof/errors.hpp"

namespace arof {

// samples hold a complex envelope; ref_freq_hz is the absolute frequency that
// baseband zero represents (0 for electrical signals, ~193 THz for optical
// fields). |sample|^2 is instantaneous power in the domain's natural unit
// (watts for optical fields and THz beats, normalized units elsewhere).
struct Waveform {
  std::vector<std::complex<double>> samples;
  double sample_rate_hz = 0.0;
  double ref_freq_hz = 0.0;
};

inline void check_rate(const Waveform& w, const char* who) {
  if (!(w.sample_rate_hz > 0.0)) throw FormatError(std::string(who) + ": sample_rate_hz must be positive");
  if (!(w.ref_freq_hz >= 0.0)) throw FormatError(std::string(who) + ": ref_freq_hz must be non-negative");
}

// Full invariant scan (rate fields plus every sample finite). O(n), intended
// for I/O boundaries and tests rather than inner loops.
inline void validate(const Waveform& w) {
  check_rate(w, "waveform");
  for (const auto& s : w.samples)
    if (!std::isfinite(s.real()) || !std::isfinite(s.imag()))
      throw FormatError("waveform: non-finite sample");
}

inline double duration_s(const Waveform& w) {
  check_rate(w, "duration_s");
  return double(w.samples.size()) / w.sample_rate_hz;
}

inline double mean_power(const Waveform& w) {
  if (w.samples.empty()) return 0.0;
  double acc = 0.0;
  for (const auto& s : w.samples) acc += std::norm(s);
  return acc / double(w.samples.size());
}

inline double total_energy(const Waveform& w) {
  double acc = 0.0;
  for (const auto& s : w.samples) acc += std::norm(s);
  return acc;
}

inline Waveform& scale(Waveform& w, double gain) {
  for (auto& s : w.samples) s *= gain;
  return w;
}

}  // namespace arof
