#pragma once

// Deterministic 64-bit RNG used everywhere randomness is needed.
//
// Generator: xoshiro256** 1.0 (Blackman & Vigna), state seeded from the user
// seed through four rounds of splitmix64. The sequence of draws for each
// consumer is part of the file-format-level contract of this library:
//
//   count sketch:   bucket[i] = next() % s   for i = 0..m-1, then
//                   sign[i]   = (next() >> 63) ? -1.0 : +1.0   for i = 0..m-1
//   uniform(a,b):   a + (b-a) * ((next() >> 11) * 2^-53)
//   normal():       Box-Muller pairs from two uniforms in (0,1]
//
// so that identical seeds reproduce identical sketches, feature sets and
// synthetic right-hand sides across builds and platforms.

#include <array>
#include <cmath>
#include <cstdint>

namespace cslsq {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) {
    std::uint64_t x = seed;
    for (auto& si : s_) si = splitmix64(x);
  }

  std::uint64_t next() {
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  // uniform integer in [0, bound); modulo draw, documented above
  std::uint64_t bounded(std::uint64_t bound) { return next() % bound; }

  // uniform double in [0, 1) with 53-bit resolution
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double a, double b) { return a + (b - a) * uniform01(); }

  // standard normal via Box-Muller; second member of each pair is cached
  double normal() {
    if (have_cached_) {
      have_cached_ = false;
      return cached_;
    }
    // u1 in (0,1] so log is finite
    const double u1 = (static_cast<double>(next() >> 11) + 1.0) * 0x1.0p-53;
    const double u2 = static_cast<double>(next() >> 11) * 0x1.0p-53;
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 6.283185307179586476925286766559 * u2;
    cached_ = r * std::sin(a);
    have_cached_ = true;
    return r * std::cos(a);
  }

 private:
  static std::uint64_t splitmix64(std::uint64_t& x) {
    std::uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  std::array<std::uint64_t, 4> s_{};
  double cached_ = 0.0;
  bool have_cached_ = false;
};

}  // namespace cslsq
