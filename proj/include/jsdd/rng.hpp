#pragma once

#include <complex>
#include <cmath>
#include <cstdint>
#include <random>

namespace jsdd {

/// Seeded random stream with platform-stable output.
///
/// Wraps std::mt19937_64 (whose output sequence is pinned by the standard)
/// and derives uniforms and Gaussians from raw bits directly, so results do
/// not depend on the standard library's distribution implementations.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : gen_(seed) {}

  /// Derives an independent stream from a seed and up to three stream tags
  /// (e.g. block index, user index, purpose id).
  static RngStream derive(std::uint64_t seed, std::uint64_t a,
                          std::uint64_t b = 0, std::uint64_t c = 0) {
    std::uint64_t s = seed;
    s = split_mix(s ^ split_mix(a + 0x9e3779b97f4a7c15ull));
    s = split_mix(s ^ split_mix(b + 0x7f4a7c159e3779b9ull));
    s = split_mix(s ^ split_mix(c + 0x2545f4914f6cdd1dull));
    return RngStream(s);
  }

  std::uint64_t next_u64() { return gen_(); }

  /// Uniform in [0, 1), 53-bit resolution.
  double u01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  /// Standard normal via Box-Muller (one spare value cached).
  double gaussian() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = 1.0 - u01();  // (0, 1]
    const double u2 = u01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double t = 2.0 * M_PI * u2;
    spare_ = r * std::sin(t);
    has_spare_ = true;
    return r * std::cos(t);
  }

  /// Circularly symmetric complex Gaussian CN(0, 1).
  std::complex<double> cgauss() {
    const double re = gaussian();
    const double im = gaussian();
    return {re * M_SQRT1_2, im * M_SQRT1_2};
  }

  static std::uint64_t split_mix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
  }

 private:
  std::mt19937_64 gen_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace jsdd
