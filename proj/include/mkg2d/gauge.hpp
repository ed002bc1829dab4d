#pragma once

// Temporal-gauge state, Helmholtz splitting, half-wave algebra, Gauss law,
// the null-form identities and the regularity admissibility predicate.

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "mkg2d/spectral.hpp"

namespace mkg2d {

/// Two-component spatial vector field (components along x1, x2).
using VectorField = std::array<SpectralField2D, 2>;

inline VectorField zeros_vector(const GridSpec& g, bool is_real = true) {
  return {SpectralField2D(g, is_real), SpectralField2D(g, is_real)};
}
inline VectorField operator+(const VectorField& a, const VectorField& b) {
  return {a[0] + b[0], a[1] + b[1]};
}
inline VectorField operator-(const VectorField& a, const VectorField& b) {
  return {a[0] - b[0], a[1] - b[1]};
}
inline VectorField operator*(cplx s, const VectorField& a) { return {s * a[0], s * a[1]}; }
inline double l2_norm(const VectorField& a) { return std::hypot(a[0].l2_norm(), a[1].l2_norm()); }
inline VectorField real_part(const VectorField& a) { return {a[0].real_part(), a[1].real_part()}; }

inline SpectralField2D divergence(const VectorField& a) {
  return partial(a[0], 1) + partial(a[1], 2);
}
inline SpectralField2D curl(const VectorField& a) { return partial(a[1], 1) - partial(a[0], 2); }
inline VectorField gradient(const SpectralField2D& u) { return {partial(u, 1), partial(u, 2)}; }

inline VectorField apply_symbol(const VectorField& a, const SymbolSpec& s) {
  return {apply_symbol(a[0], s), apply_symbol(a[1], s)};
}

/// ||u||_{H^s} with weight <xi>.
inline double h_norm(const SpectralField2D& u, double s) {
  return weighted_l2(u, [s](double a, double b) { return std::pow(1.0 + a * a + b * b, s / 2.0); });
}
inline double h_norm(const VectorField& a, double s) {
  return std::hypot(h_norm(a[0], s), h_norm(a[1], s));
}

// ---------------------------------------------------------------------------
// Helmholtz decomposition

struct HelmholtzParts {
  VectorField df;
  VectorField cf;
};

/// A = A^df + A^cf with A^df = P A. The mean mode goes to the curl-free part.
inline HelmholtzParts helmholtz_decompose(const VectorField& a) {
  require_same_grid(a[0].grid(), a[1].grid(), "helmholtz_decompose");
  const GridSpec& g = a[0].grid();
  const double sc = g.scale();
  const bool real = a[0].is_real() && a[1].is_real();
  HelmholtzParts out{zeros_vector(g, real), zeros_vector(g, real)};
  auto a1 = a[0].coeffs();
  auto a2 = a[1].coeffs();
  auto d1 = out.df[0].coeffs();
  auto d2 = out.df[1].coeffs();
  auto c1 = out.cf[0].coeffs();
  auto c2 = out.cf[1].coeffs();
  for_each_mode(g, [&](std::size_t idx, int k1, int k2) {
    if (k1 == 0 && k2 == 0) {
      c1[idx] = a1[idx];
      c2[idx] = a2[idx];
      return;
    }
    const double x1 = sc * k1, x2 = sc * k2;
    const double r2 = x1 * x1 + x2 * x2;
    // curl-free part: xi (xi . a) / |xi|^2
    const cplx proj = (x1 * a1[idx] + x2 * a2[idx]) / r2;
    c1[idx] = x1 * proj;
    c2[idx] = x2 * proj;
    // divergence-free part: xi_perp (xi_perp . a) / |xi|^2, xi_perp = (xi2, -xi1)
    const cplx rot = (x2 * a1[idx] - x1 * a2[idx]) / r2;
    d1[idx] = x2 * rot;
    d2[idx] = -x1 * rot;
  });
  return out;
}

/// Leray projection P A (the divergence-free part).
inline VectorField leray_project(const VectorField& a) { return helmholtz_decompose(a).df; }

// ---------------------------------------------------------------------------
// Half waves: u_pm = (u -+ i <D>^{-1} u_t) / 2, u = u_+ + u_-, u_t = i <D>(u_+ - u_-)

struct HalfWaves {
  SpectralField2D plus;
  SpectralField2D minus;
};

struct FieldAndRate {
  SpectralField2D value;
  SpectralField2D rate;
};

inline HalfWaves halfwave_split(const SpectralField2D& u, const SpectralField2D& u_t) {
  require_same_grid(u.grid(), u_t.grid(), "halfwave_split");
  SpectralField2D w = apply_symbol(u_t, SymbolSpec::bessel(-1.0));
  const cplx half_i(0.0, 0.5);
  SpectralField2D plus = 0.5 * u;
  plus.axpy(-half_i, w);
  SpectralField2D minus = 0.5 * u;
  minus.axpy(half_i, w);
  plus.set_real(false);
  minus.set_real(false);
  return {std::move(plus), std::move(minus)};
}

inline FieldAndRate halfwave_reconstruct(const SpectralField2D& plus, const SpectralField2D& minus) {
  require_same_grid(plus.grid(), minus.grid(), "halfwave_reconstruct");
  SpectralField2D value = plus + minus;
  SpectralField2D rate = cplx(0.0, 1.0) * apply_symbol(plus - minus, SymbolSpec::bessel(1.0));
  return {std::move(value), std::move(rate)};
}

// ---------------------------------------------------------------------------
// Charge density and the curl-free potential rate

/// Im(phi * conj(phi_t)), dealiased and real.
inline SpectralField2D im_phi_conj_rate(const SpectralField2D& phi, const SpectralField2D& phi_t) {
  require_same_grid(phi.grid(), phi_t.grid(), "im_phi_conj_rate");
  auto p = phi.to_physical();
  auto q = phi_t.to_physical();
  for (std::size_t i = 0; i < p.size(); ++i) p[i] = (p[i] * std::conj(q[i])).imag();
  return detail::to_spectral_dealiased(phi.grid(), p, true);
}

/// -(-Delta)^{-1} grad rho, i.e. symbol -i xi / |xi|^2; zero at k = 0.
inline VectorField curlfree_potential_of(const SpectralField2D& rho) {
  SpectralField2D w = apply_symbol(rho, SymbolSpec::inv_laplace());
  return {-1.0 * partial(w, 1), -1.0 * partial(w, 2)};
}

/// a'^cf determined by the compatibility condition div a' = Im(phi0 conj(phi1)).
inline VectorField compatibility_curlfree(const SpectralField2D& phi0, const SpectralField2D& phi1) {
  return curlfree_potential_of(im_phi_conj_rate(phi0, phi1));
}

// ---------------------------------------------------------------------------
// State

struct GaugeState {
  SpectralField2D phi_plus;
  SpectralField2D phi_minus;
  VectorField a_df_plus;
  VectorField a_df_minus;
  VectorField a_cf;
  double t = 0.0;
  double mass = 1.0;
  double eps_tilde = 0.05;

  const GridSpec& grid() const { return phi_plus.grid(); }

  friend bool operator==(const GaugeState&, const GaugeState&) = default;

  static GaugeState zero(const GridSpec& g, double mass = 1.0) {
    GaugeState s;
    s.phi_plus = SpectralField2D(g);
    s.phi_minus = SpectralField2D(g);
    s.a_df_plus = zeros_vector(g, false);
    s.a_df_minus = zeros_vector(g, false);
    s.a_cf = zeros_vector(g, true);
    s.mass = mass;
    return s;
  }

  /// Builds the half-wave state from (phi, phi_t, A^df, A^df_t, A^cf).
  static GaugeState from_data(const SpectralField2D& phi0, const SpectralField2D& phi1,
                              const VectorField& a_df, const VectorField& a_df_t,
                              const VectorField& a_cf, double mass = 1.0, double t = 0.0) {
    GaugeState s;
    auto p = halfwave_split(phi0, phi1);
    s.phi_plus = std::move(p.plus);
    s.phi_minus = std::move(p.minus);
    for (int j = 0; j < 2; ++j) {
      auto h = halfwave_split(a_df[j], a_df_t[j]);
      s.a_df_plus[j] = std::move(h.plus);
      s.a_df_minus[j] = std::move(h.minus);
    }
    s.a_cf = a_cf;
    s.mass = mass;
    s.t = t;
    return s;
  }

  SpectralField2D phi() const { return phi_plus + phi_minus; }
  SpectralField2D phi_t() const { return halfwave_reconstruct(phi_plus, phi_minus).rate; }
  VectorField a_df() const { return real_part(a_df_plus + a_df_minus); }
  VectorField a_df_t() const {
    return {halfwave_reconstruct(a_df_plus[0], a_df_minus[0]).rate.real_part(),
            halfwave_reconstruct(a_df_plus[1], a_df_minus[1]).rate.real_part()};
  }
  VectorField a() const { return a_df() + a_cf; }
  /// d/dt A^cf as dictated by the curl-free evolution law.
  VectorField a_cf_t() const { return curlfree_potential_of(im_phi_conj_rate(phi(), phi_t())); }

  /// Throws PreconditionError if a structural invariant is violated.
  void validate(double tol = 1e-11) const {
    const GridSpec& g = grid();
    for (const SpectralField2D* f :
         {&phi_minus, &a_df_plus[0], &a_df_plus[1], &a_df_minus[0], &a_df_minus[1], &a_cf[0],
          &a_cf[1]})
      require_same_grid(g, f->grid(), "GaugeState");
    const VectorField adf = a_df();
    const double hdf = h_norm(adf, 1.0);
    if (divergence(adf).l2_norm() > tol * std::max(hdf, 1e-300) && hdf > 0.0)
      throw PreconditionError("GaugeState: A^df is not divergence-free");
    const double hcf = h_norm(a_cf, 1.0);
    if (curl(a_cf).l2_norm() > tol * std::max(hcf, 1e-300) && hcf > 0.0)
      throw PreconditionError("GaugeState: A^cf is not curl-free");
    if (a_cf[0].hermitian_defect() > 1e-13 || a_cf[1].hermitian_defect() > 1e-13)
      throw PreconditionError("GaugeState: A^cf is not real-valued");
  }
};

// ---------------------------------------------------------------------------
// Gauss law

/// Residual of d^j F_j0 + Im(phi conj(D_0 phi)) = -div(A_t) + Im(phi conj(phi_t)),
/// with the mean mode removed (see gauss_mean_mode).
inline SpectralField2D gauss_residual(const GaugeState& s) {
  const SpectralField2D phi = s.phi();
  const SpectralField2D phi_t = s.phi_t();
  const SpectralField2D rho = im_phi_conj_rate(phi, phi_t);
  const VectorField a_t = s.a_df_t() + curlfree_potential_of(rho);
  SpectralField2D res = rho - divergence(a_t);
  res.at(0, 0) = 0.0;
  return res;
}

/// Spatial mean of Im(phi conj(phi_t)). On the torus div A_t has zero mean, so
/// this is the part of the Gauss law no potential can absorb.
inline double gauss_mean_mode(const GaugeState& s) {
  return im_phi_conj_rate(s.phi(), s.phi_t()).mean().real();
}

// ---------------------------------------------------------------------------
// Observables

struct ObservableFields {
  SpectralField2D f12;
  VectorField e_field;
  SpectralField2D gauss_residual_field;
  SpectralField2D energy_density;
  SpectralField2D charge_density;
};

inline ObservableFields observables(const GaugeState& s) {
  const GridSpec& g = s.grid();
  const SpectralField2D phi = s.phi();
  const SpectralField2D phi_t = s.phi_t();
  const VectorField a = s.a();
  const VectorField a_t = s.a_df_t() + curlfree_potential_of(im_phi_conj_rate(phi, phi_t));

  ObservableFields out;
  out.f12 = curl(a);
  out.e_field = {-1.0 * a_t[0], -1.0 * a_t[1]};
  out.gauss_residual_field = gauss_residual(s);

  auto p = phi.to_physical();
  auto pt = phi_t.to_physical();
  auto d1 = partial(phi, 1).to_physical();
  auto d2 = partial(phi, 2).to_physical();
  auto a1 = a[0].to_physical();
  auto a2 = a[1].to_physical();
  auto at1 = a_t[0].to_physical();
  auto at2 = a_t[1].to_physical();
  auto f = out.f12.to_physical();
  const cplx I(0.0, 1.0);
  const double m2 = s.mass * s.mass;
  std::vector<cplx> energy(g.size()), charge(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    const cplx D1 = d1[i] + I * a1[i].real() * p[i];
    const cplx D2 = d2[i] + I * a2[i].real() * p[i];
    energy[i] = 0.5 * (std::norm(at1[i].real()) + std::norm(at2[i].real()) + std::norm(f[i].real()) +
                       std::norm(D1) + std::norm(D2) + std::norm(pt[i]) + m2 * std::norm(p[i]));
    charge[i] = (std::conj(p[i]) * pt[i]).imag();
  }
  out.energy_density = SpectralField2D::from_physical(g, energy, true);
  out.charge_density = SpectralField2D::from_physical(g, charge, true);
  return out;
}

// ---------------------------------------------------------------------------
// Null-form identities

struct NullIdentityReport {
  double vector_potential_term = 0.0;  // A^df . grad phi = Q12(phi, |D|^{-1}(R1 A2 - R2 A1))
  double current_x = 0.0;              // P(phi grad conj phi)_1 = -2i R2 |D|^{-1} Q12(Re, Im)
  double current_y = 0.0;              // P(phi grad conj phi)_2 =  2i R1 |D|^{-1} Q12(Re, Im)
  double max() const { return std::max({vector_potential_term, current_x, current_y}); }
};

namespace detail {
inline double relative(double diff, double scale) {
  if (scale <= 0.0) return diff == 0.0 ? 0.0 : diff;
  return diff / scale;
}

/// phi * grad(conj phi), component-wise, dealiased.
inline VectorField phi_grad_conj_phi(const SpectralField2D& phi) {
  const GridSpec& g = phi.grid();
  auto p = phi.to_physical();
  auto q1 = partial(phi, 1).to_physical();
  auto q2 = partial(phi, 2).to_physical();
  for (std::size_t i = 0; i < p.size(); ++i) {
    q1[i] = p[i] * std::conj(q1[i]);
    q2[i] = p[i] * std::conj(q2[i]);
  }
  return {to_spectral_dealiased(g, q1, false), to_spectral_dealiased(g, q2, false)};
}

/// |D|^{-1}(R1 A2 - R2 A1) = (-Delta)^{-1} curl A.
inline SpectralField2D stream_function(const VectorField& a_df) {
  return apply_symbol(curl(a_df), SymbolSpec::inv_laplace());
}

/// a . grad(phi), dealiased.
inline SpectralField2D dot_grad(const VectorField& a, const SpectralField2D& phi) {
  auto a1 = a[0].to_physical();
  auto a2 = a[1].to_physical();
  auto g1 = partial(phi, 1).to_physical();
  auto g2 = partial(phi, 2).to_physical();
  for (std::size_t i = 0; i < a1.size(); ++i) a1[i] = a1[i] * g1[i] + a2[i] * g2[i];
  return to_spectral_dealiased(phi.grid(), a1, a[0].is_real() && phi.is_real());
}
}  // namespace detail

/// Evaluates both sides of each identity independently; returns relative L^2
/// discrepancies scaled by ||factor 1|| ||grad factor 2|| / period.
inline NullIdentityReport verify_null_identities(const SpectralField2D& phi,
                                                 const VectorField& a_df) {
  require_same_grid(phi.grid(), a_df[0].grid(), "verify_null_identities");
  const double hdf = h_norm(a_df, 1.0);
  if (hdf > 0.0 && divergence(a_df).l2_norm() > 1e-11 * hdf)
    throw PreconditionError("verify_null_identities: a_df is not divergence-free");

  const double root_area = std::sqrt(phi.grid().area());
  const double grad_phi = l2_norm(gradient(phi));
  NullIdentityReport r;

  const SpectralField2D lhs = detail::dot_grad(a_df, phi);
  const SpectralField2D rhs = null_form_q12(phi, detail::stream_function(a_df));
  r.vector_potential_term =
      detail::relative((lhs - rhs).l2_norm(), l2_norm(a_df) * grad_phi / root_area);

  const VectorField current = leray_project(detail::phi_grad_conj_phi(phi));
  const SpectralField2D q = null_form_q12(phi.real_part(), phi.imag_part());
  const SpectralField2D q_inv = apply_symbol(q, SymbolSpec::frac_grad(-1.0));
  const SpectralField2D rhs1 = cplx(0.0, -2.0) * apply_symbol(q_inv, SymbolSpec::riesz(2));
  const SpectralField2D rhs2 = cplx(0.0, 2.0) * apply_symbol(q_inv, SymbolSpec::riesz(1));
  const double scale = phi.l2_norm() * grad_phi / root_area;
  r.current_x = detail::relative((current[0] - rhs1).l2_norm(), scale);
  r.current_y = detail::relative((current[1] - rhs2).l2_norm(), scale);
  return r;
}

// ---------------------------------------------------------------------------
// Admissibility

struct RegularityTriple {
  double s = 1.0;
  double r = 1.0;
  double l = 1.0;
  double eps_tilde = 0.05;
};

struct Verdict {
  bool ok = true;
  std::vector<std::string> violated;
  void require(bool holds, const char* name) {
    if (!holds) {
      ok = false;
      violated.emplace_back(name);
    }
  }
};

/// The local well-posedness hypotheses on (s, r, l), with strict and
/// non-strict comparisons exactly as stated.
inline Verdict check_admissibility(const RegularityTriple& reg) {
  const double s = reg.s, r = reg.r, l = reg.l;
  Verdict v;
  v.require(r > 0.25, "r > 1/4");
  v.require(l >= s, "l >= s");
  v.require(s > 0.5 + l / 8.0, "s > 1/2 + l/8");
  v.require(s > 0.25 + l / 2.0, "s > 1/4 + l/2");
  v.require(s > 0.25 + r / 2.0, "s > 1/4 + r/2");
  v.require(s > 7.0 / 16.0 + r / 4.0, "s > 7/16 + r/4");
  v.require(r + 0.5 > s, "r + 1/2 > s");
  v.require(s >= r - 0.5, "s >= r - 1/2");
  v.require(s > l - 0.5, "s > l - 1/2");
  v.require(reg.eps_tilde > 0.0 && reg.eps_tilde < 0.25, "0 < eps_tilde < 1/4");
  return v;
}

}  // namespace mkg2d
