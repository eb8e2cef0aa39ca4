// Gray-coded QAM mapping properties: unit energy, single-bit adjacency on
// each axis, corner placement, and demap consistency under noise-free and
// boundary conditions.
#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <set>
#include <vector>

#include "arof/qam.hpp"
#include "arof/rng.hpp"

namespace {

std::vector<uint8_t> int_to_bits(int v, int m) {
  std::vector<uint8_t> b(static_cast<size_t>(m));
  for (int i = 0; i < m; ++i) b[size_t(i)] = uint8_t((v >> (m - 1 - i)) & 1);
  return b;
}

}  // namespace

TEST(Qam, BitsPerSymbolAndScale) {
  EXPECT_EQ(arof::qam_bits_per_symbol(4), 2);
  EXPECT_EQ(arof::qam_bits_per_symbol(16), 4);
  EXPECT_EQ(arof::qam_bits_per_symbol(64), 6);
  EXPECT_EQ(arof::qam_bits_per_symbol(256), 8);
  EXPECT_THROW(arof::qam_bits_per_symbol(32), arof::ConfigError);
  EXPECT_NEAR(arof::qam_scale(64), 1.0 / std::sqrt(42.0), 1e-15);
  EXPECT_NEAR(arof::qam_scale(4), 1.0 / std::sqrt(2.0), 1e-15);
}

TEST(Qam, ConstellationHasUnitAverageEnergyAndDistinctPoints) {
  for (int order : {4, 16, 64, 256}) {
    const int m = arof::qam_bits_per_symbol(order);
    double e = 0.0;
    std::set<std::pair<long, long>> seen;
    for (int v = 0; v < order; ++v) {
      const auto s = arof::qam_map_symbol(int_to_bits(v, m).data(), order);
      e += std::norm(s);
      seen.insert({std::lround(s.real() * 1e9), std::lround(s.imag() * 1e9)});
    }
    EXPECT_NEAR(e / order, 1.0, 1e-12) << "order " << order;
    EXPECT_EQ(seen.size(), size_t(order)) << "order " << order;
  }
}

TEST(Qam, SixtyFourQamCornerIsSevenOverSqrt42) {
  // all-zero bit group maps per axis to Gray code 0 -> level 0 -> amplitude
  // -(L-1)*scale; corners therefore sit at (+-7, +-7)/sqrt(42)
  const double c = 7.0 / std::sqrt(42.0);
  const auto s = arof::qam_map_symbol(int_to_bits(0, 6).data(), 64);
  EXPECT_NEAR(std::abs(s.real()), c, 1e-12);
  EXPECT_NEAR(std::abs(s.imag()), c, 1e-12);
}

TEST(Qam, GrayAdjacencyOnEachAxis) {
  // neighbors along one axis differ in exactly one bit
  for (int order : {16, 64, 256}) {
    const int m = arof::qam_bits_per_symbol(order);
    const int l = 1 << (m / 2);
    const double sc = arof::qam_scale(order);
    for (int li = 0; li + 1 < l; ++li) {
      for (int pass = 0; pass < 2; ++pass) {
        const double x0 = sc * double(2 * li - (l - 1));
        const double x1 = sc * double(2 * (li + 1) - (l - 1));
        const double other = sc * double(2 * (l / 3) - (l - 1));
        const std::complex<double> a = pass ? std::complex<double>(other, x0)
                                            : std::complex<double>(x0, other);
        const std::complex<double> b = pass ? std::complex<double>(other, x1)
                                            : std::complex<double>(x1, other);
        std::vector<uint8_t> ba, bb;
        arof::qam_demap_symbol(a, order, ba);
        arof::qam_demap_symbol(b, order, bb);
        int diff = 0;
        for (size_t i = 0; i < ba.size(); ++i) diff += ba[i] ^ bb[i];
        EXPECT_EQ(diff, 1) << "order " << order << " level " << li << " pass " << pass;
      }
    }
  }
}

TEST(Qam, AxisNegationFlipsExactlyOneBit) {
  for (int order : {4, 16, 64, 256}) {
    const int m = arof::qam_bits_per_symbol(order);
    arof::Rng rng(11);
    for (int trial = 0; trial < 50; ++trial) {
      const int v = int(rng.next_u64() % uint64_t(order));
      const auto bits = int_to_bits(v, m);
      const auto s = arof::qam_map_symbol(bits.data(), order);
      std::vector<uint8_t> neg;
      arof::qam_demap_symbol({-s.real(), s.imag()}, order, neg);
      int diff = 0;
      for (size_t i = 0; i < bits.size(); ++i) diff += bits[i] ^ neg[i];
      EXPECT_EQ(diff, 1) << "order " << order;
    }
  }
}

TEST(Qam, MapDemapLoopback) {
  for (int order : {4, 16, 64, 256}) {
    const int m = arof::qam_bits_per_symbol(order);
    arof::Rng rng(23);
    std::vector<uint8_t> bits(size_t(m) * 500);
    for (auto& b : bits) b = uint8_t(rng.next_u64() & 1);
    const auto syms = arof::qam_map(bits, order);
    EXPECT_EQ(arof::qam_demap(syms, order), bits) << "order " << order;
  }
}

TEST(Qam, DemapClampsOutsideGrid) {
  // far outside the grid still decides the nearest corner
  std::vector<uint8_t> bits;
  arof::qam_demap_symbol({10.0, -10.0}, 64, bits);
  const auto corner = arof::qam_map_symbol(bits.data(), 64);
  EXPECT_NEAR(corner.real(), 7.0 / std::sqrt(42.0), 1e-12);
  EXPECT_NEAR(corner.imag(), -7.0 / std::sqrt(42.0), 1e-12);
}

TEST(Qam, NearestPointIsIdempotentAndCorrect) {
  arof::Rng rng(31);
  for (int order : {16, 64}) {
    const int m = arof::qam_bits_per_symbol(order);
    for (int trial = 0; trial < 200; ++trial) {
      const int v = int(rng.next_u64() % uint64_t(order));
      const auto s = arof::qam_map_symbol(int_to_bits(v, m).data(), order);
      // perturb by less than half the minimum distance: decision unchanged
      const auto p = s + std::complex<double>(0.9, -0.7) * (0.49 * arof::qam_scale(order));
      const auto dec = arof::qam_nearest(p, order);
      EXPECT_NEAR(dec.real(), s.real(), 1e-12);
      EXPECT_NEAR(dec.imag(), s.imag(), 1e-12);
    }
  }
}

TEST(Qam, MapRejectsRaggedBitCount) {
  std::vector<uint8_t> bits(7, 0);
  EXPECT_THROW(arof::qam_map(bits, 64), arof::FormatError);
}
