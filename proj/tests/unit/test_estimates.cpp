#include <gtest/gtest.h>

#include "mkg2d/estimates.hpp"
#include "support.hpp"

using namespace mkg2d;
using mkg2d::testing::rel_diff;

TEST(Angle, ParallelOnConeIsZero) {
  for (double c : {0.5, 1.0, 7.0}) {
    const Vec2 x{3.0, -1.0};
    const Vec2 y{c * 3.0, c * -1.0};
    const auto t = FrequencyTriple::make(x, y, norm2d(x), norm2d(y), {1, 1, 1});
    EXPECT_EQ(angle_ratio(t, 0.5, 0.5, 0.49), 0.0);
  }
}

TEST(Angle, AntiParallelRegressionValue) {
  const auto t = FrequencyTriple::make({1.0, 0.0}, {-2.0, 0.0}, 1.0, 2.0, {1, 1, 1});
  // pi / ((1/sqrt2)^(1/2) + (1/sqrt2)^(1/2) + (sqrt5/sqrt2)^0.49)
  const double want = std::numbers::pi / (2.0 * std::pow(0.5, 0.25) + std::pow(2.5, 0.245));
  EXPECT_NEAR(angle_ratio(t, 0.5, 0.5, 0.49), want, 1e-14);
  EXPECT_NEAR(want, 1.070944, 1e-6);
}

TEST(Angle, Preconditions) {
  auto t = FrequencyTriple::make({1.0, 2.0}, {3.0, -1.0}, 0.5, -0.2);
  t.xi3[0] += 1e-3;
  EXPECT_THROW(angle_ratio(t, 0.5, 0.5, 0.49), PreconditionError);
  auto ok = FrequencyTriple::make({1.0, 2.0}, {3.0, -1.0}, 0.5, -0.2);
  EXPECT_THROW(angle_ratio(ok, 0.6, 0.5, 0.49), ConfigError);
  EXPECT_NO_THROW(ok.permuted().validate());
}

TEST(Angle, ScanDeterministicAndFinite) {
  AngleScanConfig cfg;
  cfg.samples = 20000;
  const auto a = angle_scan(cfg);
  const auto b = angle_scan(cfg);
  EXPECT_TRUE(a.finite);
  EXPECT_GT(a.max_ratio, 0.0);
  EXPECT_EQ(a.max_ratio, b.max_ratio);
  EXPECT_NEAR(angle_ratio(a.argmax, 0.5, 0.5, 0.49), a.max_ratio, 1e-15);
}

TEST(FreeWave, SlicesAndUnitarity) {
  auto g = GridSpec::square(16);
  Rng rng(1);
  const SpectralField2D u0 = random_band_limited(g, rng, 6, false);
  const TimeGrid tg{16, 2.0, WindowKind::none};
  const SpaceTimeField u = free_wave(u0, tg);
  const auto p0 = u0.to_physical();
  const std::size_t m = g.size();
  ASSERT_EQ(u.times()[8], 0.0);
  for (std::size_t i = 0; i < m; ++i) EXPECT_EQ(u.values()[8 * m + i], p0[i]);
  for (double t : {-0.7, 0.3, 1.9}) EXPECT_NEAR(free_wave_slice(u0, t).l2_norm(), u0.l2_norm(), 1e-13);
}

TEST(FreeWave, SingleModePhase) {
  auto g = GridSpec::square(16);
  const cplx a(0.3, -0.8);
  const SpectralField2D u0 = SpectralField2D::single_mode(g, 2, 3, a);
  const double t = 0.731;
  const SpectralField2D ut = free_wave_slice(u0, t);
  const cplx want = a * std::polar(1.0, t * std::hypot(2.0, 3.0));
  EXPECT_LT(std::abs(ut.at(2, 3) - want), 1e-13);
}

TEST(Strichartz, L2AnchorAndHomogeneity) {
  auto g = GridSpec::square(32);
  Rng rng(2);
  for (int trial = 0; trial < 5; ++trial) {
    const SpectralField2D u0 = random_band_limited(g, rng, 10, false);
    EXPECT_LE(strichartz_tataru_ratio(u0, 2.0, StrichartzVariant::lp_l2), 1.0);
    for (double p : {2.0, 4.0, 6.0}) {
      const double r1 = strichartz_tataru_ratio(u0, p, StrichartzVariant::lp_l2);
      const double r2 = strichartz_tataru_ratio(2.0 * u0, p, StrichartzVariant::lp_l2);
      EXPECT_NEAR(r1, r2, 1e-12 * r1);
    }
    const double l6 = strichartz_tataru_ratio(u0, 6.0, StrichartzVariant::strichartz_L6xt);
    EXPECT_TRUE(std::isfinite(l6));
  }
  EXPECT_THROW(strichartz_tataru_ratio(SpectralField2D(g), 4.0, StrichartzVariant::lp_l2), DegenerateInputError);
}

TEST(Bilinear, WorkedExamples) {
  const double eps = 0.01;
  EXPECT_TRUE(bilinear_conditions({0, 0.5, 0.5, 0, 0.5 + eps, 0.5 + eps}).ok);
  const Verdict z = bilinear_conditions({});
  EXPECT_FALSE(z.ok);
  auto has = [&](const char* name) { return std::find(z.violated.begin(), z.violated.end(), name) != z.violated.end(); };
  EXPECT_TRUE(has("b0 + b1 + b2 > 1/2"));
  EXPECT_TRUE(has("s0 + s1 + s2 > 3/4"));
  const double r = 0.26;
  EXPECT_TRUE(bilinear_conditions({r + 0.5, 0, 0, 0.25 + eps, 0.5 + eps, 0.5 - eps}).ok);
}

TEST(Bilinear, TwoReadersAgree) {
  Rng rng(3);
  int ok = 0;
  for (int i = 0; i < 10000; ++i) {
    ExponentTuple e;
    for (double* x : {&e.s0, &e.s1, &e.s2, &e.b0, &e.b1, &e.b2}) *x = uniform(rng, -1.0, 1.5);
    const bool a = bilinear_conditions(e).ok;
    ASSERT_EQ(a, mkg2d::testing::bilinear_conditions_reference(e)) << i;
    ok += a;
  }
  EXPECT_GT(ok, 100);  // both branches exercised
  EXPECT_LT(ok, 9900);
  // boundary: the non-strict rows accept equality, the strict ones reject it
  EXPECT_EQ(bilinear_conditions({0.5, 0.5, -0.5, 0.0, 0.6, 0.6}).ok,
            mkg2d::testing::bilinear_conditions_reference({0.5, 0.5, -0.5, 0.0, 0.6, 0.6}));
}

TEST(Fuzz, ParallelGradientNullStructure) {
  FuzzConfig cfg;
  cfg.n = 16;
  cfg.nt = 16;
  cfg.trials = 10;
  cfg.pairing = Pairing::parallel_gradient;
  const auto r = bilinear_ratio_fuzz(FuzzTarget::nullform_q12, {0, 0.5, 0.5, 0, 0.51, 0.51}, cfg);
  EXPECT_EQ(r.n_trials, 10);
  EXPECT_LT(r.max_ratio, 1e-8);
}

TEST(Fuzz, DeterministicReport) {
  FuzzConfig cfg;
  cfg.n = 16;
  cfg.nt = 16;
  cfg.trials = 8;
  const ExponentTuple bad{-1, -1, -1, 0, 0.51, 0.51};
  const auto a = bilinear_ratio_fuzz(FuzzTarget::product, bad, cfg);
  const auto b = bilinear_ratio_fuzz(FuzzTarget::product, bad, cfg);
  EXPECT_EQ(a.to_jsonl(), b.to_jsonl());
  EXPECT_FALSE(a.conditions_hold);
  EXPECT_GT(a.max_ratio, 0.0);
  const auto j = nlohmann::json::parse(a.to_jsonl());
  for (const char* key : {"target", "n_trials", "max_ratio", "median_ratio", "argmax", "grid", "exponents"})
    EXPECT_TRUE(j.contains(key)) << key;
}

TEST(Sobolev, ProductSingleModeClosedForm) {
  auto g = GridSpec::square(32);
  const int k1 = 2, k2 = 1;
  const SpectralField2D u = SpectralField2D::single_mode(g, k1, k2);
  const double s0 = 0.3, s1 = 0.6, s2 = 0.5;
  const double k = std::hypot(k1, k2);
  // e_k e_k = e_{2k} / period
  const double want = std::pow(1 + 4 * k * k, -s0 / 2) / (std::pow(1 + k * k, (s1 + s2) / 2) * g.period);
  EXPECT_NEAR(sobolev_product_ratio(u, u, s0, s1, s2), want, 1e-14);
}

TEST(Sobolev, ProductWithConstantAndScaling) {
  auto g = GridSpec::square(32);
  Rng rng(4);
  const SpectralField2D u = random_band_limited(g, rng, 8, false);
  const SpectralField2D one = SpectralField2D::single_mode(g, 0, 0, g.period);  // v == 1
  const double s0 = 0.2, s1 = 0.5;
  const double r = sobolev_product_ratio(u, one, s0, s1, 0.4);
  EXPECT_NEAR(r, sobolev_norm(u, -s0) / sobolev_norm(u, s1) / g.period, 1e-14);
  EXPECT_LE(r, 1.0 / g.period);
  const SpectralField2D v = random_band_limited(g, rng, 8, false);
  EXPECT_NEAR(sobolev_product_ratio(3.0 * u, 0.5 * v, 0.6, 0.6, 0.0), sobolev_product_ratio(u, v, 0.6, 0.6, 0.0),
              1e-12 * sobolev_product_ratio(u, v, 0.6, 0.6, 0.0));
  EXPECT_THROW(sobolev_product_ratio(SpectralField2D(g), v, 0.6, 0.6, 0.0), DegenerateInputError);
}

TEST(Sobolev, ProductAdmissibility) {
  EXPECT_TRUE(sobolev_product_admissible(0.51, 0.51, 0.0));
  EXPECT_FALSE(sobolev_product_admissible(0.4, 0.4, 0.1));
  EXPECT_FALSE(sobolev_product_admissible(1.0, 0.0, 0.0));  // sum equals the maximum at 1
}
