#pragma once
// Self-contained deterministic RNG (xoshiro256++ with splitmix64 seeding).
// std::normal_distribution is implementation-defined, so gaussians come from
// an explicit Box-Muller transform to keep output byte-stable across builds.
#include <cmath>
#include <complex>
#include <cstdint>
#include <string_view>

namespace arof {

inline uint64_t splitmix64(uint64_t& state) {
  uint64_t z = (state += 0x9e3779b97f4a7c15ull);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

inline uint64_t fnv1a64(std::string_view s) {
  uint64_t h = 0xcbf29ce484222325ull;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ull;
  }
  return h;
}

// Deterministic per-purpose sub-seed. The same (master, label, index) always
// yields the same stream; distinct labels give statistically independent ones.
inline uint64_t seed_child(uint64_t master, std::string_view label, uint64_t index = 0) {
  uint64_t s = master ^ (fnv1a64(label) + 0x9e3779b97f4a7c15ull * (index + 1));
  uint64_t out = splitmix64(s);
  out ^= splitmix64(s);
  return out;
}

class Rng {
 public:
  explicit Rng(uint64_t seed) {
    uint64_t sm = seed;
    for (auto& w : s_) w = splitmix64(sm);
  }

  uint64_t next_u64() {
    const uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  // uniform in [0, 1)
  double uniform() { return double(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // standard normal
  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1;
    do {
      u1 = uniform();
    } while (u1 <= 0.0);
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double th = 6.283185307179586476925287 * uniform();
    spare_ = r * std::sin(th);
    have_spare_ = true;
    return r * std::cos(th);
  }

  // circular complex gaussian, E|z|^2 = 2*sigma_component^2
  std::complex<double> cgaussian(double sigma_component) {
    const double re = gaussian() * sigma_component;
    return {re, gaussian() * sigma_component};
  }

 private:
  static uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
  uint64_t s_[4];
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace arof
