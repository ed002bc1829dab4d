#pragma once

// Platform-stable random variates. std:: distributions are implementation
// defined, so seeded data generation goes through these helpers instead.

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>

namespace mkg2d {

using Rng = std::mt19937_64;

/// Uniform double in [0, 1) from the top 53 bits.
inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

inline double uniform(Rng& rng, double lo, double hi) { return lo + (hi - lo) * uniform01(rng); }

/// Standard normal via Box-Muller (one variate per call).
inline double normal01(Rng& rng) {
  double u1 = uniform01(rng);
  double u2 = uniform01(rng);
  if (u1 <= 0.0) u1 = 0x1.0p-53;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

/// Circularly symmetric complex normal with E|z|^2 = 1.
inline std::complex<double> complex_normal(Rng& rng) {
  return {normal01(rng) * std::numbers::sqrt2 / 2.0, normal01(rng) * std::numbers::sqrt2 / 2.0};
}

inline std::complex<double> unit_phase(Rng& rng) {
  const double theta = 2.0 * std::numbers::pi * uniform01(rng);
  return {std::cos(theta), std::sin(theta)};
}

/// Log-uniform on [lo, hi], lo > 0.
inline double log_uniform(Rng& rng, double lo, double hi) {
  return lo * std::exp(uniform01(rng) * std::log(hi / lo));
}

}  // namespace mkg2d
