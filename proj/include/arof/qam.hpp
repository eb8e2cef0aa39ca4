#pragma once
// Gray-coded square-QAM mapping and hard-decision demapping. Per axis, the
// bit group is a reflected Gray codeword for the amplitude level, so adjacent
// levels differ in exactly one bit and axis negation flips exactly one bit.
#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

#include "arof/errors.hpp"

namespace arof {

inline int qam_bits_per_symbol(int order) {
  switch (order) {
    case 4: return 2;
    case 16: return 4;
    case 64: return 6;
    case 256: return 8;
  }
  throw ConfigError("qam: order must be one of 4, 16, 64, 256");
}

namespace detail {

inline int gray_encode(int i) { return i ^ (i >> 1); }

inline int gray_decode(int g) {
  int b = 0;
  for (; g; g >>= 1) b ^= g;
  return b;
}

inline int bits_to_int(const uint8_t* bits, int n) {
  int v = 0;
  for (int i = 0; i < n; ++i) v = (v << 1) | (bits[i] & 1);
  return v;
}

}  // namespace detail

// amplitude step that gives the constellation unit average energy
inline double qam_scale(int order) {
  const int l = int(std::lround(std::sqrt(double(order))));
  return std::sqrt(3.0 / (2.0 * (double(l) * double(l) - 1.0)));
}

// One symbol from bits_per_symbol bits, MSB first; first half selects I.
inline std::complex<double> qam_map_symbol(const uint8_t* bits, int order) {
  const int m = qam_bits_per_symbol(order);
  const int half = m / 2;
  const int l = 1 << half;
  const double sc = qam_scale(order);
  const int gi = detail::bits_to_int(bits, half);
  const int gq = detail::bits_to_int(bits + half, half);
  const int li = detail::gray_decode(gi);
  const int lq = detail::gray_decode(gq);
  return {sc * double(2 * li - (l - 1)), sc * double(2 * lq - (l - 1))};
}

inline std::vector<std::complex<double>> qam_map(const std::vector<uint8_t>& bits, int order) {
  const int m = qam_bits_per_symbol(order);
  if (bits.size() % size_t(m) != 0)
    throw FormatError("qam_map: bit count is not a multiple of bits-per-symbol");
  std::vector<std::complex<double>> out(bits.size() / size_t(m));
  for (size_t i = 0; i < out.size(); ++i) out[i] = qam_map_symbol(bits.data() + i * size_t(m), order);
  return out;
}

// Hard-decision demap of one symbol, appending bits_per_symbol bits.
inline void qam_demap_symbol(std::complex<double> s, int order, std::vector<uint8_t>& bits_out) {
  const int m = qam_bits_per_symbol(order);
  const int half = m / 2;
  const int l = 1 << half;
  const double sc = qam_scale(order);
  auto level = [&](double x) {
    int i = int(std::lround((x / sc + double(l - 1)) / 2.0));
    return std::min(std::max(i, 0), l - 1);
  };
  const int gi = detail::gray_encode(level(s.real()));
  const int gq = detail::gray_encode(level(s.imag()));
  for (int i = half - 1; i >= 0; --i) bits_out.push_back(uint8_t((gi >> i) & 1));
  for (int i = half - 1; i >= 0; --i) bits_out.push_back(uint8_t((gq >> i) & 1));
}

// Nearest constellation point (the hard decision itself).
inline std::complex<double> qam_nearest(std::complex<double> s, int order) {
  const int half = qam_bits_per_symbol(order) / 2;
  const int l = 1 << half;
  const double sc = qam_scale(order);
  auto snap = [&](double x) {
    int i = int(std::lround((x / sc + double(l - 1)) / 2.0));
    i = std::min(std::max(i, 0), l - 1);
    return sc * double(2 * i - (l - 1));
  };
  return {snap(s.real()), snap(s.imag())};
}

inline std::vector<uint8_t> qam_demap(const std::vector<std::complex<double>>& syms, int order) {
  std::vector<uint8_t> bits;
  bits.reserve(syms.size() * size_t(qam_bits_per_symbol(order)));
  for (auto s : syms) qam_demap_symbol(s, order, bits);
  return bits;
}

}  // namespace arof
