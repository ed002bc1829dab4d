#pragma once

// Initial data at prescribed regularity.
//
// rough_random: coefficient magnitudes |xi|^{-(sigma + 1 + delta)} with uniform
// random phases, sigma = s, s - 1, r, r - 1, l for (phi0, phi1, a^df, a'^df, a^cf).
// In two dimensions sum <xi>^{2 sigma'} |xi|^{-2(sigma + 1 + delta)} converges iff
// sigma' < sigma + delta, so each component sits just inside its class.
// smooth_gaussian: Gaussian spectral envelope with random phases, each component
// scaled to a prescribed L^2 norm.
// In both cases a'^cf comes from the compatibility condition.

#include <cmath>
#include <cstdint>
#include <string>

#include "mkg2d/gauge.hpp"
#include "mkg2d/random.hpp"

namespace mkg2d {

enum class DataKind { rough_random, smooth_gaussian, file };

inline const char* to_string(DataKind k) {
  switch (k) {
    case DataKind::rough_random: return "rough_random";
    case DataKind::smooth_gaussian: return "smooth_gaussian";
    case DataKind::file: return "file";
  }
  return "?";
}

struct DataOptions {
  DataKind kind = DataKind::rough_random;
  double delta = 0.01;      // rough: spectral offset
  double amplitude = 0.5;   // smooth: L^2 norm of every component
  double width = 3.0;       // smooth: envelope width in wavenumber units
  bool override_admissibility = false;
};

struct InitialData {
  SpectralField2D phi0, phi1;
  VectorField a_df, a_df_t, a_cf, a_cf_t;

  GaugeState to_state(double mass = 1.0, double eps_tilde = 0.05) const {
    GaugeState s = GaugeState::from_data(phi0, phi1, a_df, a_df_t, a_cf, mass);
    s.eps_tilde = eps_tilde;
    return s;
  }
};

namespace detail {

/// Coefficients with magnitude amp(|xi|) and independent uniform phases on the
/// dealias band, zero mean. Real fields get mirrored phases c(-k) = conj c(k).
template <class Amp>
SpectralField2D random_phase_field(const GridSpec& g, Rng& rng, bool is_real, Amp&& amp) {
  SpectralField2D f(g, is_real);
  auto c = f.coeffs();
  const double sc = g.scale();
  for_each_mode(g, [&](std::size_t idx, int k1, int k2) {
    const cplx phase = unit_phase(rng);  // drawn for every mode: stream independent of the band
    if (!g.retained(k1, k2) || (k1 == 0 && k2 == 0)) return;
    if (is_real) {
      // one representative per +-k pair: k1 > 0, or k1 == 0 and k2 > 0
      const bool rep = k1 > 0 || (k1 == 0 && k2 > 0);
      if (!rep) return;
      const cplx v = amp(sc * std::hypot(static_cast<double>(k1), static_cast<double>(k2))) * phase;
      c[idx] = v;
      c[g.index(-k1, -k2)] = std::conj(v);
      return;
    }
    c[idx] = amp(sc * std::hypot(static_cast<double>(k1), static_cast<double>(k2))) * phase;
  });
  return f;
}

/// Potential built from a real scalar c: gradient direction (R c) or its perpendicular.
inline VectorField directional(const SpectralField2D& c, bool curl_free) {
  const SpectralField2D r1 = apply_symbol(c, SymbolSpec::riesz(1));
  const SpectralField2D r2 = apply_symbol(c, SymbolSpec::riesz(2));
  if (curl_free) return {r1, r2};
  return {-1.0 * r2, r1};
}

inline SpectralField2D normalized(SpectralField2D f, double target) {
  const double n = f.l2_norm();
  if (n > 0.0) f *= target / n;
  return f;
}
inline VectorField normalized(VectorField a, double target) {
  const double n = l2_norm(a);
  if (n > 0.0) {
    a[0] *= target / n;
    a[1] *= target / n;
  }
  return a;
}

}  // namespace detail

/// Generates (phi0, phi1, a^df, a'^df, a^cf) and a'^cf. Throws AdmissibilityError
/// for inadmissible regularity unless overridden.
inline InitialData rough_data_generate(const RegularityTriple& reg, const GridSpec& grid,
                                       std::uint64_t seed, const DataOptions& opt = {}) {
  grid.validate();
  if (opt.kind == DataKind::file) throw ConfigError("rough_data_generate: data_kind = file has no generator");
  const Verdict v = check_admissibility(reg);
  if (!v.ok && !opt.override_admissibility) {
    std::string msg = "inadmissible regularity (s, r, l) = (" + std::to_string(reg.s) + ", " +
                      std::to_string(reg.r) + ", " + std::to_string(reg.l) + "); violated:";
    for (const auto& name : v.violated) msg += " [" + name + "]";
    throw AdmissibilityError(msg);
  }
  Rng rng(seed);
  InitialData d;
  if (opt.kind == DataKind::rough_random) {
    auto power = [&](double sigma) {
      return [e = -(sigma + 1.0 + opt.delta)](double r) { return std::pow(r, e); };
    };
    d.phi0 = detail::random_phase_field(grid, rng, false, power(reg.s));
    d.phi1 = detail::random_phase_field(grid, rng, false, power(reg.s - 1.0));
    d.a_df = detail::directional(detail::random_phase_field(grid, rng, true, power(reg.r)), false);
    d.a_df_t = detail::directional(detail::random_phase_field(grid, rng, true, power(reg.r - 1.0)), false);
    d.a_cf = detail::directional(detail::random_phase_field(grid, rng, true, power(reg.l)), true);
  } else {
    auto gauss = [w = opt.width, sc = grid.scale()](double r) {
      const double k = r / sc;
      return std::exp(-0.5 * k * k / (w * w));
    };
    const double a = opt.amplitude;
    d.phi0 = detail::normalized(detail::random_phase_field(grid, rng, false, gauss), a);
    d.phi1 = detail::normalized(detail::random_phase_field(grid, rng, false, gauss), a);
    d.a_df = detail::normalized(
        detail::directional(detail::random_phase_field(grid, rng, true, gauss), false), a);
    d.a_df_t = detail::normalized(
        detail::directional(detail::random_phase_field(grid, rng, true, gauss), false), a);
    d.a_cf = detail::normalized(
        detail::directional(detail::random_phase_field(grid, rng, true, gauss), true), a);
  }
  d.a_cf_t = compatibility_curlfree(d.phi0, d.phi1);
  return d;
}

/// Least-squares slope of log|c_k| against log|xi| over nonzero retained modes
/// with |xi| >= xi_min.
inline double spectral_slope(const SpectralField2D& u, double xi_min = 1.0) {
  const GridSpec& g = u.grid();
  const double sc = g.scale();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  long n = 0;
  for_each_mode(g, [&](std::size_t idx, int k1, int k2) {
    const double r = sc * std::hypot(static_cast<double>(k1), static_cast<double>(k2));
    const double a = std::abs(u.coeffs()[idx]);
    if (r < xi_min || a <= 0.0 || !g.retained(k1, k2)) return;
    const double x = std::log(r), y = std::log(a);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  });
  if (n < 2) throw DegenerateInputError("spectral_slope: fewer than two modes");
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace mkg2d
