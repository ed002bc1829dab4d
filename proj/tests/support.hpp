#pragma once

// Shared fixtures for the unit and acceptance suites.

#include <algorithm>
#include <cmath>

#include "mkg2d/dynamics.hpp"
#include "mkg2d/estimates.hpp"
#include "mkg2d/random_fields.hpp"

namespace mkg2d::testing {

inline double rel_diff(const SpectralField2D& a, const SpectralField2D& b) {
  const double s = std::max(a.l2_norm(), b.l2_norm());
  return s > 0 ? (a - b).l2_norm() / s : 0.0;
}

inline VectorField random_vector(const GridSpec& g, Rng& rng, int max_k, double width = 0.0) {
  return {random_band_limited(g, rng, max_k, true, false, width),
          random_band_limited(g, rng, max_k, true, false, width)};
}

/// Divergence-free field -grad^perp psi with a random stream function.
inline VectorField random_div_free(const GridSpec& g, Rng& rng, int max_k, double width = 0.0) {
  SpectralField2D psi = random_band_limited(g, rng, max_k, true, true, width);
  return {-1.0 * partial(psi, 2), partial(psi, 1)};
}

inline VectorField random_curl_free(const GridSpec& g, Rng& rng, int max_k, double width = 0.0) {
  return gradient(random_band_limited(g, rng, max_k, true, true, width));
}

inline SpectralField2D scaled(SpectralField2D f, double target_l2) {
  const double n = f.l2_norm();
  if (n > 0) f *= target_l2 / n;
  return f;
}

inline VectorField scaled(VectorField f, double target_l2) {
  const double n = l2_norm(f);
  if (n > 0) {
    f[0] *= target_l2 / n;
    f[1] *= target_l2 / n;
  }
  return f;
}

/// Smooth state satisfying the compatibility condition. Fields are Gaussian
/// spectral envelopes of the given width, scaled to L^2 norm `amp`.
inline GaugeState smooth_state(const GridSpec& g, Rng& rng, double amp, double width = 2.0,
                               double mass = 1.0) {
  const int kmax = g.cutoff_x();
  SpectralField2D phi0 = scaled(random_band_limited(g, rng, kmax, false, false, width), amp);
  SpectralField2D phi1 = scaled(random_band_limited(g, rng, kmax, false, false, width), amp);
  VectorField adf = scaled(random_div_free(g, rng, kmax, width), amp);
  VectorField adf_t = scaled(random_div_free(g, rng, kmax, width), amp);
  VectorField acf = scaled(random_curl_free(g, rng, kmax, width), amp);
  return GaugeState::from_data(phi0, phi1, adf, adf_t, acf, mass);
}

// Second reading of the fourteen conditions, kept as a table:
// each row is (coefficients on s0 s1 s2 b0 b1 b2, bound, strict).
inline bool bilinear_conditions_reference(const ExponentTuple& e) {
  const double s = e.s0 + e.s1 + e.s2, b = e.b0 + e.b1 + e.b2;
  const double minpair = std::min({e.b0 + e.b1, e.b0 + e.b2, e.b1 + e.b2});
  const double minb = std::min({e.b0, e.b1, e.b2});
  struct Row {
    double lhs, rhs;
    bool strict;
  };
  const Row rows[] = {
      {b, 0.5, true},
      {e.b0 + e.b1, 0.0, false},
      {e.b0 + e.b2, 0.0, false},
      {e.b1 + e.b2, 0.0, false},
      {s + b, 1.5, true},
      {s + minpair, 1.0, true},
      {s + minb, 0.5, true},
      {s, 0.75, true},
      {e.s0 + e.b0 + 2 * (e.s1 + e.s2), 1.0, true},
      {e.s1 + e.b1 + 2 * (e.s0 + e.s2), 1.0, true},
      {e.s2 + e.b2 + 2 * (e.s0 + e.s1), 1.0, true},
      {e.s1 + e.s2, std::max(0.0, -e.b0), false},
      {e.s0 + e.s2, std::max(0.0, -e.b1), false},
      {e.s0 + e.s1, std::max(0.0, -e.b2), false},
  };
  for (const Row& r : rows)
    if (r.strict ? !(r.lhs > r.rhs) : !(r.lhs >= r.rhs)) return false;
  return true;
}

}  // namespace mkg2d::testing
