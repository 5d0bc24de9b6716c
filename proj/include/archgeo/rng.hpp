#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string_view>

namespace archgeo {

/// 64-bit FNV-1a over a byte string, optionally chained with a seed.
/// Used for config hashes and for per-architecture deterministic noise.
inline std::uint64_t fnv1a64(std::string_view bytes,
                             std::uint64_t seed = 14695981039346656037ull) {
  std::uint64_t h = seed;
  for (unsigned char c : bytes) {
    h ^= static_cast<std::uint64_t>(c);
    h *= 1099511628211ull;
  }
  return h;
}

namespace detail {
inline std::uint64_t splitmix64_next(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}
}  // namespace detail

/// Deterministic RNG with a fixed cross-platform output sequence.
/// Distribution helpers are implemented here rather than via std::uniform_*
/// so that seeded results do not depend on the standard library vendor.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() { return detail::splitmix64_next(state_); }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, n). Rejection sampling, unbiased.
  std::uint64_t below(std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("SplitMix64::below: n must be > 0");
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t v;
    do {
      v = next_u64();
    } while (v >= limit);
    return v % n;
  }

  /// Standard normal via Box-Muller (no spare caching: one draw per call).
  double normal() {
    const double u1 = (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * 3.141592653589793238462643383279502884 * u2);
  }

  /// Derived generator for an independent named stream. This is the fixed
  /// sub-seed splitting scheme used by the CLI: one flat seed per job.
  SplitMix64 split(std::string_view tag) const {
    return SplitMix64(fnv1a64(tag, state_ ^ 0x5851f42d4c957f2dull));
  }

 private:
  std::uint64_t state_;
};

/// Deterministic sub-seed derivation (same scheme as SplitMix64::split).
inline std::uint64_t derive_seed(std::uint64_t master, std::string_view tag) {
  return fnv1a64(tag, master ^ 0x5851f42d4c957f2dull);
}

}  // namespace archgeo
