#include <gtest/gtest.h>

#include "support.hpp"

using namespace mkg2d;
using mkg2d::testing::rel_diff;

namespace {
double vrel(const VectorField& a, const VectorField& b) {
  const double s = std::max(l2_norm(a), l2_norm(b));
  return s > 0 ? l2_norm(a - b) / s : 0.0;
}
}  // namespace

TEST(Helmholtz, GradientHasNoDivFreePart) {
  auto g = GridSpec::square(64);
  Rng rng(1);
  auto a = mkg2d::testing::random_curl_free(g, rng, 20);
  auto parts = helmholtz_decompose(a);
  EXPECT_LT(l2_norm(parts.df), 1e-12 * l2_norm(a));
}

TEST(Helmholtz, CurlHasNoCurlFreePart) {
  auto g = GridSpec::square(64);
  Rng rng(2);
  auto a = mkg2d::testing::random_div_free(g, rng, 20);
  auto parts = helmholtz_decompose(a);
  EXPECT_LT(l2_norm(parts.cf), 1e-12 * l2_norm(a));
}

TEST(Helmholtz, CompletenessIdempotenceOrthogonality) {
  auto g = GridSpec::square(64);
  Rng rng(3);
  auto a = mkg2d::testing::random_vector(g, rng, 31);
  auto p = helmholtz_decompose(a);
  EXPECT_LT(l2_norm(a - (p.df + p.cf)), 1e-12 * l2_norm(a));
  auto again = helmholtz_decompose(p.df);
  EXPECT_LT(vrel(again.df, p.df), 1e-12);
  EXPECT_LT(l2_norm(again.cf), 1e-12 * l2_norm(a));
  const cplx ip = inner(p.df[0], p.cf[0]) + inner(p.df[1], p.cf[1]);
  EXPECT_LT(std::abs(ip), 1e-11 * std::pow(l2_norm(a), 2));
  EXPECT_LT(divergence(p.df).l2_norm(), 1e-11 * h_norm(p.df, 1.0));
  EXPECT_LT(curl(p.cf).l2_norm(), 1e-11 * h_norm(p.cf, 1.0));
}

TEST(Helmholtz, MeanGoesToCurlFreePart) {
  auto g = GridSpec::square(16);
  VectorField a = zeros_vector(g);
  a[0].at(0, 0) = 2.0;
  auto p = helmholtz_decompose(a);
  EXPECT_EQ(p.cf[0].at(0, 0), cplx(2.0));
  EXPECT_EQ(l2_norm(p.df), 0.0);
}

TEST(Helmholtz, MatchesRieszFormulas) {
  auto g = GridSpec::square(32);
  Rng rng(4);
  auto a = mkg2d::testing::random_vector(g, rng, 15);
  auto p = helmholtz_decompose(a);
  auto R = [](const SpectralField2D& f, int j) { return apply_symbol(f, SymbolSpec::riesz(j)); };
  SpectralField2D w = R(a[1], 1) - R(a[0], 2);
  SpectralField2D d = R(a[0], 1) + R(a[1], 2);
  EXPECT_LT(rel_diff(p.df[0], R(w, 2)), 1e-12);
  EXPECT_LT(rel_diff(p.df[1], -1.0 * R(w, 1)), 1e-12);
  SpectralField2D cf0 = p.cf[0];
  SpectralField2D cf1 = p.cf[1];
  cf0.at(0, 0) = 0.0;
  cf1.at(0, 0) = 0.0;
  EXPECT_LT(rel_diff(cf0, -1.0 * R(d, 1)), 1e-12);
  EXPECT_LT(rel_diff(cf1, -1.0 * R(d, 2)), 1e-12);
}

TEST(HalfWave, StaticDataSplitsEvenly) {
  auto g = GridSpec::square(32);
  Rng rng(5);
  auto u = random_band_limited(g, rng, 10, false);
  auto h = halfwave_split(u, SpectralField2D(g));
  EXPECT_LT(rel_diff(h.plus, 0.5 * u), 1e-15);
  EXPECT_LT(rel_diff(h.minus, 0.5 * u), 1e-15);
}

TEST(HalfWave, VelocityOnlySingleMode) {
  auto g = GridSpec::square(32);
  auto ut = SpectralField2D::single_mode(g, 3, -2, cplx(0.7, 0.1));
  auto h = halfwave_split(SpectralField2D(g), ut);
  const double bracket = std::sqrt(1.0 + 9.0 + 4.0);
  EXPECT_LT(std::abs(h.plus.at(3, -2) - cplx(0, -0.5) / bracket * cplx(0.7, 0.1)), 1e-15);
  EXPECT_LT(std::abs(h.minus.at(3, -2) - cplx(0, 0.5) / bracket * cplx(0.7, 0.1)), 1e-15);
}

TEST(HalfWave, ReconstructSingleMode) {
  auto g = GridSpec::square(32);
  auto up = SpectralField2D::single_mode(g, 1, 2, 2.0);
  auto r = halfwave_reconstruct(up, SpectralField2D(g));
  EXPECT_LT(rel_diff(r.value, up), 1e-15);
  EXPECT_LT(std::abs(r.rate.at(1, 2) - cplx(0.0, 2.0 * std::sqrt(6.0))), 1e-14);
  auto same = halfwave_reconstruct(up, up);
  EXPECT_EQ(same.rate.l2_norm(), 0.0);
}

TEST(HalfWave, RoundTripAndLinearity) {
  auto g = GridSpec::square(64);
  Rng rng(6);
  auto u = random_band_limited(g, rng, 30, false);
  auto ut = random_band_limited(g, rng, 30, false);
  auto h = halfwave_split(u, ut);
  auto r = halfwave_reconstruct(h.plus, h.minus);
  EXPECT_LT(rel_diff(r.value, u), 1e-12);
  EXPECT_LT(rel_diff(r.rate, ut), 1e-12);

  auto v = random_band_limited(g, rng, 30, false);
  auto vt = random_band_limited(g, rng, 30, false);
  const cplx a(1.5, -0.5), b(-0.25, 2.0);
  auto hv = halfwave_split(v, vt);
  auto lin = halfwave_reconstruct(a * h.plus + b * hv.plus, a * h.minus + b * hv.minus);
  EXPECT_LT(rel_diff(lin.value, a * u + b * v), 1e-13);
  EXPECT_LT(rel_diff(lin.rate, a * ut + b * vt), 1e-13);
}

TEST(Compatibility, TrivialCases) {
  auto g = GridSpec::square(32);
  Rng rng(7);
  auto phi0 = random_band_limited(g, rng, 8, false);
  EXPECT_EQ(l2_norm(compatibility_curlfree(phi0, SpectralField2D(g))), 0.0);
  auto r0 = random_band_limited(g, rng, 8, true);
  auto r1 = random_band_limited(g, rng, 8, true);
  EXPECT_LT(l2_norm(compatibility_curlfree(r0, r1)), 1e-14);
}

TEST(Compatibility, DivergenceMatchesChargeOffMean) {
  auto g = GridSpec::square(64);
  Rng rng(8);
  auto phi0 = random_band_limited(g, rng, 10, false);
  auto phi1 = random_band_limited(g, rng, 10, false);
  auto a = compatibility_curlfree(phi0, phi1);
  EXPECT_LT(curl(a).l2_norm(), 1e-12 * h_norm(a, 1.0));
  // independent charge: product evaluated in physical space, no dealias
  auto p0 = phi0.to_physical();
  auto p1 = phi1.to_physical();
  std::vector<cplx> rho(p0.size());
  for (std::size_t i = 0; i < rho.size(); ++i) rho[i] = (p0[i] * std::conj(p1[i])).imag();
  auto rho_hat = SpectralField2D::from_physical(g, rho, true);
  rho_hat.at(0, 0) = 0.0;
  EXPECT_LT((divergence(a) - rho_hat).l2_norm(), 1e-11);
}

TEST(Gauss, VacuumWithConstantPotential) {
  auto g = GridSpec::square(32);
  GaugeState s = GaugeState::zero(g);
  s.a_cf[0].at(0, 0) = 3.0;
  EXPECT_EQ(gauss_residual(s).l2_norm(), 0.0);
}

TEST(Gauss, CompatibleDataHaveNoResidual) {
  auto g = GridSpec::square(64);
  Rng rng(9);
  auto s = mkg2d::testing::smooth_state(g, rng, 1.0);
  EXPECT_LT(gauss_residual(s).l2_norm(), 1e-10);
  EXPECT_NO_THROW(s.validate());
}

TEST(Gauss, MeanModeIsMinusChargeOverArea) {
  auto g = GridSpec::square(32);
  Rng rng(10);
  auto s = mkg2d::testing::smooth_state(g, rng, 1.0);
  const double q = conserved_quantities(s).charge;
  EXPECT_NEAR(gauss_mean_mode(s), -q / g.area(), 1e-12 * std::max(1.0, std::abs(q)));
}

TEST(GaugeState, ValidateRejectsCurlInCurlFreePart) {
  auto g = GridSpec::square(32);
  Rng rng(11);
  GaugeState s = GaugeState::zero(g);
  s.a_cf = mkg2d::testing::random_div_free(g, rng, 8);
  EXPECT_THROW(s.validate(), PreconditionError);
}

TEST(Observables, RealValued) {
  auto g = GridSpec::square(32);
  Rng rng(12);
  auto s = mkg2d::testing::smooth_state(g, rng, 1.0);
  auto o = observables(s);
  for (const auto* f : {&o.f12, &o.e_field[0], &o.e_field[1], &o.energy_density, &o.charge_density})
    EXPECT_LT(f->hermitian_defect(), 1e-12);
}

TEST(NullIdentities, ConstantAndRealTrivialCases) {
  auto g = GridSpec::square(32);
  Rng rng(13);
  SpectralField2D c(g);
  c.at(0, 0) = cplx(2.0, 1.0);
  auto adf = mkg2d::testing::random_div_free(g, rng, 8);
  auto r = verify_null_identities(c, adf);
  EXPECT_EQ(r.vector_potential_term, 0.0);
  auto real_phi = random_band_limited(g, rng, 8, true);
  auto rr = verify_null_identities(real_phi, adf);
  EXPECT_LT(rr.current_x, 1e-14);
  EXPECT_LT(rr.current_y, 1e-14);
  EXPECT_LT(null_form_q12(real_phi.real_part(), real_phi.imag_part()).l2_norm(), 1e-14);
}

TEST(NullIdentities, RandomFields) {
  auto g = GridSpec::square(64);
  Rng rng(14);
  for (int trial = 0; trial < 10; ++trial) {
    auto phi = random_band_limited(g, rng, g.cutoff_x(), false);
    auto adf = mkg2d::testing::random_div_free(g, rng, g.cutoff_x());
    EXPECT_LT(verify_null_identities(phi, adf).max(), 1e-10);
  }
}

TEST(NullIdentities, RejectsCompressiblePotential) {
  auto g = GridSpec::square(32);
  Rng rng(15);
  auto phi = random_band_limited(g, rng, 8, false);
  auto a = mkg2d::testing::random_curl_free(g, rng, 8);
  EXPECT_THROW(verify_null_identities(phi, a), PreconditionError);
}

TEST(Admissibility, StatedTriples) {
  const double d = 0.01;
  EXPECT_TRUE(check_admissibility({1, 1, 1}).ok);
  EXPECT_TRUE(check_admissibility({0.5 + 1.0 / 14 + d, 0.25 + d, 0.5 + 1.0 / 14 + d}).ok);
  const double x = 0.5 + 1.0 / 12 + d;
  EXPECT_TRUE(check_admissibility({x, x, x}).ok);
  auto v = check_admissibility({0.5, 0.5, 0.5});
  EXPECT_FALSE(v.ok);
  EXPECT_NE(std::find(v.violated.begin(), v.violated.end(), "s > 1/2 + l/8"), v.violated.end());
}

TEST(Admissibility, BoundaryStrictness) {
  // l >= s is non-strict: l = s exactly passes that line
  auto v = check_admissibility({1, 1, 1});
  EXPECT_TRUE(v.violated.empty());
  // r = 1/4 exactly fails the strict r > 1/4
  auto w = check_admissibility({1, 0.25, 1});
  EXPECT_NE(std::find(w.violated.begin(), w.violated.end(), "r > 1/4"), w.violated.end());
  RegularityTriple bad_eps{1, 1, 1, 0.25};
  EXPECT_FALSE(check_admissibility(bad_eps).ok);
}

TEST(Admissibility, MonotoneInSBelowUpperBounds) {
  Rng rng(16);
  for (int trial = 0; trial < 2000; ++trial) {
    const double r = uniform(rng, 0.2, 1.5), l = uniform(rng, 0.4, 1.8);
    const double s1 = uniform(rng, 0.3, 1.5), s2 = s1 + uniform(rng, 0.0, 0.2);
    if (s2 >= std::min(r + 0.5, l) || s2 <= l - 0.5) continue;
    if (check_admissibility({s1, r, l}).ok) {
      EXPECT_TRUE(check_admissibility({s2, r, l}).ok);
    }
  }
}
