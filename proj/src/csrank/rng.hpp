#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace csrank {

// Seeded generator used by the synthetic-data path and by randomized tests.
// Only the raw mt19937_64 output stream is consumed; the standard pins that
// stream down bit for bit, whereas <random> distributions are free to differ
// between library implementations. Keeping distribution math here makes the
// generated bytes reproducible for a given seed on any platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t bits() { return eng_(); }

  // Uniform in [0, 1) with 53 random mantissa bits.
  double uniform01() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, n). The modulo bias is irrelevant here; the value
  // only has to be deterministic.
  std::uint64_t below(std::uint64_t n) { return n == 0 ? 0 : eng_() % n; }

  // Uniform integer in [lo, hi] inclusive.
  std::int64_t range(std::int64_t lo, std::int64_t hi) {
    return lo + static_cast<std::int64_t>(below(static_cast<std::uint64_t>(hi - lo + 1)));
  }

  // Standard normal via Box-Muller; two uniforms per call, no caching, so the
  // draw count per sample is fixed.
  double normal() {
    double u1 = 1.0 - uniform01();  // (0, 1], keeps the log finite
    double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
  }

 private:
  std::mt19937_64 eng_;
};

}  // namespace csrank
