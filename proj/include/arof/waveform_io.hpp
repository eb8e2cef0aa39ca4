#pragma once
// Binary capture format: magic "AROF", u32 version, f64 sample_rate, f64
// ref_freq, u64 count, then interleaved f32 I/Q, all little-endian.
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>

#include "arof/errors.hpp"
#include "arof/waveform.hpp"

namespace arof {

static_assert(std::endian::native == std::endian::little, "capture format assumes a little-endian host");

inline constexpr uint32_t kCaptureVersion = 1;

inline void write_capture(const std::string& path, const Waveform& w) {
  validate(w);
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw FormatError("write_capture: cannot open " + path);
  f.write("AROF", 4);
  auto put = [&](const void* p, size_t n) { f.write(static_cast<const char*>(p), std::streamsize(n)); };
  uint32_t ver = kCaptureVersion;
  put(&ver, 4);
  put(&w.sample_rate_hz, 8);
  put(&w.ref_freq_hz, 8);
  uint64_t n = w.samples.size();
  put(&n, 8);
  std::vector<float> iq(2 * w.samples.size());
  for (size_t i = 0; i < w.samples.size(); ++i) {
    iq[2 * i] = float(w.samples[i].real());
    iq[2 * i + 1] = float(w.samples[i].imag());
  }
  if (!iq.empty()) put(iq.data(), iq.size() * 4);
  if (!f) throw FormatError("write_capture: short write to " + path);
}

inline Waveform read_capture(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw FormatError("read_capture: cannot open " + path);
  char magic[4] = {};
  f.read(magic, 4);
  if (!f || std::memcmp(magic, "AROF", 4) != 0)
    throw FormatError("read_capture: bad magic in " + path);
  auto get = [&](void* p, size_t n) {
    f.read(static_cast<char*>(p), std::streamsize(n));
    if (!f) throw FormatError("read_capture: truncated file " + path);
  };
  uint32_t ver = 0;
  get(&ver, 4);
  if (ver != kCaptureVersion)
    throw FormatError("read_capture: unsupported version " + std::to_string(ver));
  Waveform w;
  get(&w.sample_rate_hz, 8);
  get(&w.ref_freq_hz, 8);
  uint64_t n = 0;
  get(&n, 8);
  std::vector<float> iq(2 * n);
  if (n) get(iq.data(), iq.size() * 4);
  w.samples.resize(n);
  for (size_t i = 0; i < n; ++i) w.samples[i] = {double(iq[2 * i]), double(iq[2 * i + 1])};
  validate(w);
  return w;
}

}  // namespace arof
