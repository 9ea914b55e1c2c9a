#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>

namespace trackadv {

// SplitMix64 (Steele/Lea/Flood constants). The state is a plain 64-bit
// counter advanced by a fixed odd increment and passed through a finalizer,
// so sequences are identical on every platform and can be reproduced from
// the seed alone.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform double in [0, 1), 53 mantissa bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, n). n must be > 0.
  std::uint64_t uniform_index(std::uint64_t n) { return next() % n; }

  bool bernoulli(double p) { return uniform() < p; }

  /// Random sign, +1 or -1 with equal probability.
  double sign() { return (next() & 1ULL) ? 1.0 : -1.0; }

  /// Standard normal via Box-Muller; consumes exactly two draws.
  double gaussian() {
    double u1 = uniform();
    double u2 = uniform();
    if (u1 < 1e-300) u1 = 1e-300;
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * 3.141592653589793 * u2);
  }

 private:
  std::uint64_t state_;
};

/// SplitMix64 finalizer as a standalone hash step.
inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// FNV-1a for hashing names into seed material.
inline std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Deterministic seed for a derived stream. Combining is order-sensitive so
/// distinct (video, attack, objective, kernel) tuples get distinct streams
/// regardless of worker scheduling.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a,
                                 std::uint64_t b = 0, std::uint64_t c = 0,
                                 std::uint64_t d = 0) {
  std::uint64_t h = mix64(master ^ 0x6a09e667f3bcc909ULL);
  h = mix64(h ^ (a + 0x9e3779b97f4a7c15ULL));
  h = mix64(h ^ (b + 0xbb67ae8584caa73bULL));
  h = mix64(h ^ (c + 0x3c6ef372fe94f82bULL));
  h = mix64(h ^ (d + 0xa54ff53a5f1d36f1ULL));
  return h;
}

}  // namespace trackadv
