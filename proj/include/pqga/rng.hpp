#pragma once

#include <complex>
#include <cstdint>
#include <random>
#include <string_view>

namespace pqga {

/// Seeded random stream with a fixed, self-contained normal transform so
/// that identical seeds reproduce identical draws regardless of the
/// standard library's distribution internals.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  /// Uniform draw in [0, 1).
  double uniform() {
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }

  /// Uniform draw in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal via Box-Muller. Consumes two uniforms per call; the
  /// sine branch is deliberately discarded to keep call sites stateless.
  double normal() {
    const double u1 = 1.0 - uniform();  // (0, 1], keeps log finite
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }

  double normal(double mean, double stddev) { return mean + stddev * normal(); }

  /// Circular complex Gaussian with E|z|^2 = variance. Uses both Box-Muller
  /// branches, so one call consumes exactly two uniforms.
  std::complex<double> cnormal(double variance) {
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-std::log(u1) * variance);
    return {r * std::cos(2.0 * M_PI * u2), r * std::sin(2.0 * M_PI * u2)};
  }

 private:
  std::mt19937_64 gen_;
};

namespace detail {
inline std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}
}  // namespace detail

/// Child stream derived from a root seed and a fixed label. Streams with
/// distinct labels are statistically independent and stable across runs.
inline RngStream derive_stream(std::uint64_t root_seed, std::string_view label) {
  return RngStream(detail::splitmix64(root_seed ^ detail::fnv1a(label)));
}

}  // namespace pqga
