#pragma once

#include <cmath>

#include "mkg2d/random.hpp"
#include "mkg2d/spectral.hpp"

namespace mkg2d {

/// Gaussian random coefficients on |k1|, |k2| <= max_k, optionally shaped by
/// exp(-|k|^2 / (2 width^2)). Real fields are Hermitian-symmetrized.
inline SpectralField2D random_band_limited(const GridSpec& grid, Rng& rng, int max_k,
                                           bool is_real, bool zero_mean = false,
                                           double width = 0.0) {
  SpectralField2D f(grid, false);
  auto c = f.coeffs();
  for_each_mode(grid, [&](std::size_t idx, int k1, int k2) {
    const cplx z = complex_normal(rng);
    if (std::abs(k1) > max_k || std::abs(k2) > max_k) return;
    double env = 1.0;
    if (width > 0.0) env = std::exp(-0.5 * (k1 * k1 + k2 * k2) / (width * width));
    c[idx] = env * z;
  });
  if (zero_mean) f.at(0, 0) = 0.0;
  if (is_real) f = f.real_part();
  return f;
}

}  // namespace mkg2d
