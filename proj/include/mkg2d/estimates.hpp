#pragma once

// Numerical lab for the estimates behind the well-posedness argument: the
// angle bound, Strichartz/Tataru mixed norms of free waves, the bilinear
// exponent conditions and ratio fuzzing of bilinear and trilinear forms.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "mkg2d/gauge.hpp"
#include "mkg2d/norms.hpp"
#include "mkg2d/parallel.hpp"
#include "mkg2d/random.hpp"

namespace mkg2d {

// ---------------------------------------------------------------------------
// Angle bound

using Vec2 = std::array<double, 2>;

struct FrequencyTriple {
  Vec2 xi1{}, xi2{}, xi3{};
  double tau1 = 0.0, tau2 = 0.0, tau3 = 0.0;
  std::array<int, 3> signs{1, 1, 1};

  /// Closes the triple: xi3 = -(xi1 + xi2), tau3 = -(tau1 + tau2).
  static FrequencyTriple make(Vec2 xi1, Vec2 xi2, double tau1, double tau2,
                              std::array<int, 3> signs = {1, 1, 1}) {
    FrequencyTriple t;
    t.xi1 = xi1;
    t.xi2 = xi2;
    t.xi3 = {-(xi1[0] + xi2[0]), -(xi1[1] + xi2[1])};
    t.tau1 = tau1;
    t.tau2 = tau2;
    t.tau3 = -(tau1 + tau2);
    t.signs = signs;
    return t;
  }

  void validate() const {
    // exact for triples built by make(); permuting changes the summation
    // order, so allow a few ulps of the largest entry
    auto closes = [](double a, double b, double c) {
      const double tol = 4.0 * std::numeric_limits<double>::epsilon() *
                         std::max({std::abs(a), std::abs(b), std::abs(c)});
      return std::abs(a + b + c) <= tol;
    };
    if (!closes(xi1[0], xi2[0], xi3[0]) || !closes(xi1[1], xi2[1], xi3[1]) ||
        !closes(tau1, tau2, tau3))
      throw PreconditionError("frequency triple does not sum to zero");
    for (int s : signs)
      if (s != 1 && s != -1) throw PreconditionError("frequency triple: signs must be +-1");
  }

  /// Exchanges the roles of (xi2, tau2, sign2) and (xi3, tau3, sign3).
  FrequencyTriple permuted() const {
    FrequencyTriple t = *this;
    std::swap(t.xi2, t.xi3);
    std::swap(t.tau2, t.tau3);
    std::swap(t.signs[1], t.signs[2]);
    return t;
  }
};

inline double norm2d(const Vec2& v) { return std::hypot(v[0], v[1]); }
inline double bracket(double x) { return std::sqrt(1.0 + x * x); }

/// Angle in [0, pi] between a and b; 0 if either vanishes.
inline double angle_between(const Vec2& a, const Vec2& b) {
  if ((a[0] == 0.0 && a[1] == 0.0) || (b[0] == 0.0 && b[1] == 0.0)) return 0.0;
  return std::atan2(std::abs(a[0] * b[1] - a[1] * b[0]), a[0] * b[0] + a[1] * b[1]);
}

/// angle(+-xi1, +-'xi2) divided by the three-term right side of the angle bound.
inline double angle_ratio(const FrequencyTriple& t, double alpha, double beta, double gamma) {
  t.validate();
  for (double e : {alpha, beta, gamma})
    if (!(e >= 0.0 && e <= 0.5)) throw ConfigError("angle_ratio: exponents must lie in [0, 1/2]");
  const Vec2 a{t.signs[0] * t.xi1[0], t.signs[0] * t.xi1[1]};
  const Vec2 b{t.signs[1] * t.xi2[0], t.signs[1] * t.xi2[1]};
  const double angle = angle_between(a, b);
  if (angle == 0.0) return 0.0;
  const double n1 = norm2d(t.xi1), n2 = norm2d(t.xi2), n3 = norm2d(t.xi3);
  const double low = std::min(bracket(n1), bracket(n2));
  const double rhs = std::pow(bracket(-t.tau1 + t.signs[0] * n1) / low, alpha) +
                     std::pow(bracket(-t.tau2 + t.signs[1] * n2) / low, beta) +
                     std::pow(bracket(std::abs(t.tau3) - n3) / low, gamma);
  return angle / rhs;
}

struct AngleScanConfig {
  long samples = 100000;
  double xi_max = 1000.0;
  double alpha = 0.5, beta = 0.5, gamma = 0.49;
  std::uint64_t seed = 1;
  bool permuted = false;  // evaluate the (2 <-> 3) permuted triple with beta and gamma swapped
};

struct AngleScanResult {
  double max_ratio = 0.0;
  FrequencyTriple argmax{};
  long samples = 0;
  bool finite = true;
};

namespace detail {

inline Vec2 polar_vec(double r, double theta) { return {r * std::cos(theta), r * std::sin(theta)}; }

/// Mixture sampler: uniform draws plus near-degenerate configurations
/// (anti-parallel, small angle, near the cone) where the bound is tight.
inline FrequencyTriple sample_triple(Rng& rng, double xi_max) {
  const double pi = std::numbers::pi;
  std::array<int, 3> signs{};
  for (int& s : signs) s = uniform01(rng) < 0.5 ? 1 : -1;
  const int kind = static_cast<int>(uniform01(rng) * 4.0);
  double r1 = 0.0, r2 = 0.0, th1 = uniform(rng, 0.0, 2.0 * pi), th2 = 0.0;
  switch (kind) {
    case 0:  // uniform magnitudes and directions
      r1 = uniform(rng, 0.0, xi_max);
      r2 = uniform(rng, 0.0, xi_max);
      th2 = uniform(rng, 0.0, 2.0 * pi);
      break;
    case 1:  // log-uniform magnitudes
      r1 = log_uniform(rng, 1e-2, xi_max);
      r2 = log_uniform(rng, 1e-2, xi_max);
      th2 = uniform(rng, 0.0, 2.0 * pi);
      break;
    case 2: {  // +-xi1 and +-'xi2 nearly anti-parallel
      r1 = uniform(rng, 0.0, xi_max);
      r2 = uniform(rng, 0.0, xi_max);
      const double flip = signs[0] * signs[1] > 0 ? pi : 0.0;
      th2 = th1 + flip + log_uniform(rng, 1e-8, 1.0) * (uniform01(rng) < 0.5 ? -1 : 1);
      break;
    }
    default: {  // nearly parallel, small angles
      r1 = log_uniform(rng, 1e-2, xi_max);
      r2 = log_uniform(rng, 1e-2, xi_max);
      const double flip = signs[0] * signs[1] > 0 ? 0.0 : pi;
      th2 = th1 + flip + log_uniform(rng, 1e-8, 1.0) * (uniform01(rng) < 0.5 ? -1 : 1);
      break;
    }
  }
  // temporal frequencies on or near the respective cones
  auto offset = [&] {
    const double u = uniform01(rng);
    if (u < 0.5) return 0.0;
    return (uniform01(rng) < 0.5 ? -1.0 : 1.0) * log_uniform(rng, 1e-3, xi_max);
  };
  const double tau1 = signs[0] * r1 + offset();
  const double tau2 = signs[1] * r2 + offset();
  return FrequencyTriple::make(polar_vec(r1, th1), polar_vec(r2, th2), tau1, tau2, signs);
}

}  // namespace detail

inline AngleScanResult angle_scan(const AngleScanConfig& cfg) {
  Rng rng(cfg.seed);
  AngleScanResult out;
  out.samples = cfg.samples;
  for (long i = 0; i < cfg.samples; ++i) {
    FrequencyTriple t = detail::sample_triple(rng, cfg.xi_max);
    double r = cfg.permuted ? angle_ratio(t.permuted(), cfg.alpha, cfg.gamma, cfg.beta)
                            : angle_ratio(t, cfg.alpha, cfg.beta, cfg.gamma);
    if (!std::isfinite(r)) out.finite = false;
    if (r > out.max_ratio) {
      out.max_ratio = r;
      out.argmax = cfg.permuted ? t.permuted() : t;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Free waves and Strichartz / Tataru ratios

/// e^{i t |D|} u0 at a single time.
inline SpectralField2D free_wave_slice(const SpectralField2D& u0, double t) {
  SpectralField2D out = apply_radial(u0, [t](double r) { return std::polar(1.0, t * r); });
  out.set_real(false);
  return out;
}

struct TimeGrid {
  int nt = 32;
  double t_span = 2.0;
  WindowKind window = WindowKind::raised_cosine;
};

inline SpaceTimeField free_wave(const SpectralField2D& u0, const TimeGrid& tg) {
  std::vector<SpectralField2D> slices;
  slices.reserve(tg.nt);
  for (double t : SpaceTimeField::time_grid(tg.nt, tg.t_span)) slices.push_back(free_wave_slice(u0, t));
  return SpaceTimeField::from_slices(slices, tg.t_span, tg.window);
}

enum class StrichartzVariant { strichartz_L6xt, lp_l2, lp_l2plus };

inline const char* to_string(StrichartzVariant v) {
  switch (v) {
    case StrichartzVariant::strichartz_L6xt: return "strichartz_L6xt";
    case StrichartzVariant::lp_l2: return "lp_l2";
    case StrichartzVariant::lp_l2plus: return "lp_l2plus";
  }
  return "?";
}

/// Left and right side of one mixed-norm estimate for a windowed free wave.
struct StrichartzSides {
  double lhs = 0.0;
  double rhs = 0.0;
  XsbSpec spec{};
  double p = 0.0, q = 0.0;
};

inline StrichartzSides strichartz_sides(const SpaceTimeField& u, double p, StrichartzVariant v,
                                        double eps = 0.01) {
  StrichartzSides out;
  out.spec.eps = eps;
  out.spec.weight = XsbWeight::wave;
  if (v == StrichartzVariant::strichartz_L6xt) {
    out.p = out.q = 6.0;
    out.spec.s = 0.5;
    out.spec.b = 0.5;
    out.spec.b_plus = 1;
    out.lhs = mixed_norm(u, 6.0, 6.0, MixedOrder::t_then_x);
  } else {
    if (!(p >= 2.0 && p <= 6.0)) throw ConfigError("strichartz ratio: p must lie in [2, 6]");
    const double theta = 0.5 - 1.0 / p;
    out.p = p;
    out.q = v == StrichartzVariant::lp_l2 ? 2.0 : 2.0 + eps;
    out.spec.s = 0.5 * theta;
    out.spec.b = 1.5 * theta;
    out.spec.b_plus = 1;
    out.spec.s_plus = v == StrichartzVariant::lp_l2plus ? 1 : 0;
    out.lhs = mixed_norm(u, out.p, out.q, MixedOrder::t_then_x);
  }
  out.rhs = xsb_norm(u, out.spec);
  return out;
}

inline double strichartz_tataru_ratio(const SpectralField2D& u0, double p, StrichartzVariant v,
                                      const TimeGrid& tg = {}, double eps = 0.01) {
  const SpaceTimeField u = free_wave(u0, tg);
  const StrichartzSides s = strichartz_sides(u, p, v, eps);
  if (!(s.rhs > 0.0)) throw DegenerateInputError("strichartz ratio: zero right-hand side");
  return s.lhs / s.rhs;
}

/// Gaussian bump exp(-|x - c|^2 / (2 w^2)) * amplitude * exp(i k0.x), sampled periodically.
struct BumpParams {
  double cx = 0.0, cy = 0.0, width = 0.5;
  cplx amplitude = 1.0;
  double kx = 0.0, ky = 0.0;
};

inline SpectralField2D gaussian_bump(const GridSpec& g, const BumpParams& b, double lambda = 1.0) {
  std::vector<cplx> s(g.size());
  const double L = g.period;
  for (int i1 = 0; i1 < g.nx; ++i1)
    for (int i2 = 0; i2 < g.ny; ++i2) {
      // nearest periodic image of x - c
      double dx = i1 * g.spacing_x() - b.cx;
      double dy = i2 * g.spacing_y() - b.cy;
      dx -= L * std::round(dx / L);
      dy -= L * std::round(dy / L);
      dx *= lambda;
      dy *= lambda;
      const double env = std::exp(-(dx * dx + dy * dy) / (2.0 * b.width * b.width));
      s[static_cast<std::size_t>(i1) * g.ny + i2] =
          b.amplitude * env * std::polar(1.0, b.kx * dx + b.ky * dy);
    }
  return SpectralField2D::from_physical(g, s, false);
}

// ---------------------------------------------------------------------------
// Bilinear exponent conditions

struct ExponentTuple {
  double s0 = 0, s1 = 0, s2 = 0, b0 = 0, b1 = 0, b2 = 0;
};

/// The fourteen sufficient conditions for
/// ||uv||_{X^{-s0,-b0}} <~ ||u||_{X^{s1,b1}} ||v||_{X^{s2,b2}} (wave weight).
inline Verdict bilinear_conditions(const ExponentTuple& e) {
  const double bs = e.b0 + e.b1 + e.b2;
  const double ss = e.s0 + e.s1 + e.s2;
  Verdict v;
  v.require(bs > 0.5, "b0 + b1 + b2 > 1/2");
  v.require(e.b0 + e.b1 >= 0.0, "b0 + b1 >= 0");
  v.require(e.b0 + e.b2 >= 0.0, "b0 + b2 >= 0");
  v.require(e.b1 + e.b2 >= 0.0, "b1 + b2 >= 0");
  v.require(ss > 1.5 - bs, "s0 + s1 + s2 > 3/2 - (b0 + b1 + b2)");
  v.require(ss > 1.0 - std::min({e.b0 + e.b1, e.b0 + e.b2, e.b1 + e.b2}),
            "s0 + s1 + s2 > 1 - min(b0 + b1, b0 + b2, b1 + b2)");
  v.require(ss > 0.5 - std::min({e.b0, e.b1, e.b2}), "s0 + s1 + s2 > 1/2 - min(b0, b1, b2)");
  v.require(ss > 0.75, "s0 + s1 + s2 > 3/4");
  v.require((e.s0 + e.b0) + 2.0 * e.s1 + 2.0 * e.s2 > 1.0, "(s0 + b0) + 2 s1 + 2 s2 > 1");
  v.require(2.0 * e.s0 + (e.s1 + e.b1) + 2.0 * e.s2 > 1.0, "2 s0 + (s1 + b1) + 2 s2 > 1");
  v.require(2.0 * e.s0 + 2.0 * e.s1 + (e.s2 + e.b2) > 1.0, "2 s0 + 2 s1 + (s2 + b2) > 1");
  v.require(e.s1 + e.s2 >= std::max(0.0, -e.b0), "s1 + s2 >= max(0, -b0)");
  v.require(e.s0 + e.s2 >= std::max(0.0, -e.b1), "s0 + s2 >= max(0, -b1)");
  v.require(e.s0 + e.s1 >= std::max(0.0, -e.b2), "s0 + s1 >= max(0, -b2)");
  return v;
}

// ---------------------------------------------------------------------------
// Ratio fuzzing

enum class FuzzTarget { product, nullform_q12, triple_product };

inline const char* to_string(FuzzTarget t) {
  switch (t) {
    case FuzzTarget::product: return "product";
    case FuzzTarget::nullform_q12: return "nullform_q12";
    case FuzzTarget::triple_product: return "triple_product";
  }
  return "?";
}

enum class Pairing { independent, parallel_gradient };

struct FuzzConfig {
  int n = 32;
  int nt = 32;
  double t_span = 2.0;
  int trials = 200;
  double eps = 0.01;
  std::uint64_t seed = 1;
  Pairing pairing = Pairing::independent;
  XsbSpec third_norm{0.5, 0.5, XsbWeight::wave, 0.01, 0, 1};  // norm of the third factor
  double packet_thickness = 1.0;  // modulation half-width for cone packets

  void validate() const {
    if (n < 8 || n % 2 != 0) throw ConfigError("fuzz: n must be even and >= 8");
    if (nt < 4 || nt % 2 != 0) throw ConfigError("fuzz: nt must be even and >= 4");
    if (trials < 1) throw ConfigError("fuzz: trials must be positive");
    if (!(t_span > 0.0)) throw ConfigError("fuzz: t_span must be positive");
  }
};

struct RatioReport {
  std::string target;
  int n_trials = 0;
  int n_degenerate = 0;
  double max_ratio = 0.0;
  double median_ratio = 0.0;
  nlohmann::json argmax;  // generator parameters of the worst trial
  nlohmann::json grid;    // n, nt, t_span, window
  ExponentTuple exponents{};
  double eps = 0.01;
  bool conditions_hold = true;
  std::vector<std::string> violated;

  nlohmann::json to_json() const {
    return {{"target", target},
            {"n_trials", n_trials},
            {"n_degenerate", n_degenerate},
            {"max_ratio", max_ratio},
            {"median_ratio", median_ratio},
            {"argmax", argmax},
            {"grid", grid},
            {"exponents",
             {{"s0", exponents.s0}, {"s1", exponents.s1}, {"s2", exponents.s2},
              {"b0", exponents.b0}, {"b1", exponents.b1}, {"b2", exponents.b2}}},
            {"eps", eps},
            {"conditions_hold", conditions_hold},
            {"violated", violated}};
  }
  /// One JSON-lines record.
  std::string to_jsonl() const { return to_json().dump(); }
};

namespace detail {

/// Time-major samples of a space-time field on the fuzz lattice.
struct StSamples {
  GridSpec grid;
  int nt;
  double t_span;
  std::vector<cplx> v;
};

inline GridSpec fuzz_grid(int n) {
  GridSpec g = GridSpec::square(n);
  g.dealias_fraction = 1.0;  // inputs are band-limited so products are exact
  return g;
}

/// Random space-time coefficients, |k_i| <= kmax, |m| <= mmax, with a random
/// power-law spectral tilt. Returns unwindowed samples.
inline StSamples random_st_field(const GridSpec& g, int nt, double t_span, int kmax, Rng& rng,
                                 nlohmann::json& meta) {
  const double tilt = uniform(rng, -1.5, 1.5);
  const int mmax = std::max(1, static_cast<int>(uniform(rng, 0.1, 0.45) * nt / 2));
  meta = {{"kind", "random"}, {"tilt", tilt}, {"mmax", mmax}};
  std::vector<cplx> c(static_cast<std::size_t>(nt) * g.size());
  const std::size_t m = g.size();
  for (int j = 0; j < nt; ++j) {
    const int mj = j < nt / 2 ? j : j - nt;
    for_each_mode(g, [&](std::size_t idx, int k1, int k2) {
      const cplx z = complex_normal(rng);
      if (std::abs(k1) > kmax || std::abs(k2) > kmax || std::abs(mj) > mmax) return;
      const double r = std::hypot(static_cast<double>(k1), static_cast<double>(k2));
      c[j * m + idx] = z * std::pow(1.0 + r, tilt);
    });
  }
  fft::transform_3d(c, nt, g.nx, g.ny, fft::Direction::backward);
  return {g, nt, t_span, std::move(c)};
}

/// Wave packet concentrated near tau = sigma |xi| around a random centre
/// frequency, with a random temporal modulation of half-width `thickness`.
inline StSamples cone_packet(const GridSpec& g, int nt, double t_span, int kmax, double thickness,
                             Rng& rng, nlohmann::json& meta) {
  const double pi = std::numbers::pi;
  const double r0 = uniform(rng, 0.0, kmax * 0.9);
  const double th = uniform(rng, 0.0, 2.0 * pi);
  const double k01 = r0 * std::cos(th), k02 = r0 * std::sin(th);
  const double spread = log_uniform(rng, 0.5, std::max(0.6, kmax / 2.0));
  const int sigma = uniform01(rng) < 0.5 ? 1 : -1;
  const double mod = uniform(rng, -thickness, thickness);
  meta = {{"kind", "cone_packet"}, {"k0", {k01, k02}}, {"spread", spread},
          {"sigma", sigma},        {"modulation", mod}};
  SpectralField2D base(g, false);
  for_each_mode(g, [&](std::size_t idx, int k1, int k2) {
    const cplx z = unit_phase(rng);
    if (std::abs(k1) > kmax || std::abs(k2) > kmax) return;
    const double d2 = (k1 - k01) * (k1 - k01) + (k2 - k02) * (k2 - k02);
    base.coeffs()[idx] = z * std::exp(-0.5 * d2 / (spread * spread));
  });
  const auto times = SpaceTimeField::time_grid(nt, t_span);
  std::vector<cplx> v;
  v.reserve(static_cast<std::size_t>(nt) * g.size());
  for (double t : times) {
    SpectralField2D slice = apply_radial(base, [&](double r) { return std::polar(1.0, (sigma * r + mod) * t); });
    auto p = slice.to_physical();
    v.insert(v.end(), p.begin(), p.end());
  }
  return {g, nt, t_span, std::move(v)};
}

inline StSamples ensemble_member(const GridSpec& g, const FuzzConfig& cfg, int kmax, bool packet,
                                 Rng& rng, nlohmann::json& meta) {
  return packet ? cone_packet(g, cfg.nt, cfg.t_span, kmax, cfg.packet_thickness, rng, meta)
                : random_st_field(g, cfg.nt, cfg.t_span, kmax, rng, meta);
}

/// Multiplies by the raised-cosine window in place.
inline void apply_window(StSamples& u) {
  const auto times = SpaceTimeField::time_grid(u.nt, u.t_span);
  const std::size_t m = u.grid.size();
  for (int j = 0; j < u.nt; ++j) {
    const double w = window_value(WindowKind::raised_cosine, times[j], u.t_span);
    for (std::size_t i = 0; i < m; ++i) u.v[j * m + i] *= w;
  }
}

inline SpaceTimeField as_field(const StSamples& u) {
  return SpaceTimeField::from_samples(u.grid, u.nt, u.t_span, u.v, WindowKind::none);
}

inline StSamples pointwise(const StSamples& a, const StSamples& b) {
  StSamples out = a;
  for (std::size_t i = 0; i < out.v.size(); ++i) out.v[i] *= b.v[i];
  return out;
}

/// Q12 slice by slice.
inline StSamples q12(const StSamples& a, const StSamples& b) {
  StSamples out = a;
  const std::size_t m = a.grid.size();
  for (int j = 0; j < a.nt; ++j) {
    std::span<const cplx> sa(a.v.data() + j * m, m), sb(b.v.data() + j * m, m);
    auto fa = SpectralField2D::from_physical(a.grid, sa, false);
    auto fb = SpectralField2D::from_physical(a.grid, sb, false);
    auto q = null_form_q12(fa, fb).to_physical();
    std::copy(q.begin(), q.end(), out.v.begin() + j * m);
  }
  return out;
}

inline double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  const std::size_t h = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + h, v.end());
  double m = v[h];
  if (v.size() % 2 == 0) m = 0.5 * (m + *std::max_element(v.begin(), v.begin() + h));
  return m;
}

}  // namespace detail

/// Empirical sup of ||B(u, v[, w])||_{X^{-s0,-b0}} / (||u||_{X^{s1,b1}} ||v||_{X^{s2,b2}} [||w||])
/// over an ensemble that is half random space-time fields and half cone packets.
/// Every trial is seeded from (seed, trial) so results do not depend on scheduling.
inline RatioReport bilinear_ratio_fuzz(FuzzTarget target, const ExponentTuple& e,
                                       const FuzzConfig& cfg) {
  cfg.validate();
  cfg.third_norm.validate();
  const GridSpec g = detail::fuzz_grid(cfg.n);
  const bool cubic = target == FuzzTarget::triple_product ||
                     (target == FuzzTarget::nullform_q12 && cfg.pairing == Pairing::parallel_gradient);
  const int kmax = cubic ? cfg.n / 6 : cfg.n / 4;
  const XsbSpec out_spec{-e.s0, -e.b0, XsbWeight::wave, cfg.eps};
  const XsbSpec u_spec{e.s1, e.b1, XsbWeight::wave, cfg.eps};
  const XsbSpec v_spec{e.s2, e.b2, XsbWeight::wave, cfg.eps};

  std::vector<double> ratios(cfg.trials, -1.0);
  std::vector<nlohmann::json> metas(cfg.trials);
  parallel_for(static_cast<std::size_t>(cfg.trials), [&](std::size_t trial) {
    Rng rng(cfg.seed * 0x9E3779B97F4A7C15ULL + trial);
    const bool packet = trial % 2 == 1;
    nlohmann::json mu, mv, mw;
    detail::StSamples u = detail::ensemble_member(g, cfg, kmax, packet, rng, mu);
    detail::apply_window(u);
    detail::StSamples v;
    if (cfg.pairing == Pairing::parallel_gradient) {
      // V = U^2 has gradient parallel to grad U, so Q12(U, V) = 2 U Q12(U, U) = 0
      v = detail::pointwise(u, u);
      mv = {{"kind", "square_of_u"}};
    } else {
      v = detail::ensemble_member(g, cfg, kmax, uniform01(rng) < 0.5, rng, mv);
      detail::apply_window(v);
    }
    double denom = xsb_norm(detail::as_field(u), u_spec) * xsb_norm(detail::as_field(v), v_spec);
    detail::StSamples b;
    switch (target) {
      case FuzzTarget::product: b = detail::pointwise(u, v); break;
      case FuzzTarget::nullform_q12: b = detail::q12(u, v); break;
      case FuzzTarget::triple_product: {
        detail::StSamples w = detail::ensemble_member(g, cfg, kmax, uniform01(rng) < 0.5, rng, mw);
        detail::apply_window(w);
        denom *= xsb_norm(detail::as_field(w), cfg.third_norm);
        b = detail::pointwise(detail::pointwise(u, v), w);
        break;
      }
    }
    metas[trial] = {{"trial", trial}, {"u", mu}, {"v", mv}};
    if (target == FuzzTarget::triple_product) metas[trial]["w"] = mw;
    if (!(denom > 0.0) || !std::isfinite(denom)) return;  // degenerate, counted below
    ratios[trial] = xsb_norm(detail::as_field(b), out_spec) / denom;
  });

  RatioReport r;
  r.target = to_string(target);
  r.exponents = e;
  r.eps = cfg.eps;
  r.grid = {{"n", cfg.n}, {"nt", cfg.nt}, {"t_span", cfg.t_span}, {"window", "raised_cosine"},
            {"seed", cfg.seed}, {"kmax", kmax},
            {"pairing", cfg.pairing == Pairing::parallel_gradient ? "parallel_gradient" : "independent"}};
  const Verdict verdict = bilinear_conditions(e);
  r.conditions_hold = verdict.ok;
  r.violated = verdict.violated;
  std::vector<double> good;
  int best = -1;
  for (int i = 0; i < cfg.trials; ++i) {
    if (ratios[i] < 0.0) {
      ++r.n_degenerate;
      continue;
    }
    good.push_back(ratios[i]);
    if (best < 0 || ratios[i] > ratios[best]) best = i;
  }
  r.n_trials = static_cast<int>(good.size());
  if (best >= 0) {
    r.max_ratio = ratios[best];
    r.argmax = metas[best];
  }
  r.median_ratio = detail::median(good);
  return r;
}

/// ||uv||_{H^{-s0}} / (||u||_{H^{s1}} ||v||_{H^{s2}}).
inline double sobolev_product_ratio(const SpectralField2D& u, const SpectralField2D& v, double s0,
                                    double s1, double s2) {
  const double denom = sobolev_norm(u, s1) * sobolev_norm(v, s2);
  if (!(denom > 0.0)) throw DegenerateInputError("sobolev_product_ratio: zero denominator");
  return sobolev_norm(pointwise_product(u, v), -s0) / denom;
}

/// True when (s0, s1, s2) satisfy the hypotheses of the Sobolev multiplication law.
inline bool sobolev_product_admissible(double s0, double s1, double s2) {
  const double sum = s0 + s1 + s2;
  const double top = std::max({s0, s1, s2});
  return sum >= 1.0 && sum >= top && !(sum == 1.0 && sum == top);
}

/// Ensemble of band-limited fields with random spectral tilt, mirroring bilinear_ratio_fuzz.
inline RatioReport sobolev_product_fuzz(double s0, double s1, double s2, int n, int trials,
                                        std::uint64_t seed) {
  const GridSpec g = detail::fuzz_grid(n);
  const int kmax = n / 4;
  std::vector<double> ratios(trials, -1.0);
  std::vector<nlohmann::json> metas(trials);
  parallel_for(static_cast<std::size_t>(trials), [&](std::size_t trial) {
    Rng rng(seed * 0x9E3779B97F4A7C15ULL + trial);
    auto draw = [&](nlohmann::json& meta) {
      const double tilt = uniform(rng, -2.0, 1.0);
      const bool localized = uniform01(rng) < 0.5;
      SpectralField2D f(g, false);
      const double centre = uniform(rng, 0.0, kmax * 0.9), th = uniform(rng, 0.0, 2 * std::numbers::pi);
      const double spread = log_uniform(rng, 0.5, kmax / 2.0);
      meta = {{"tilt", tilt}, {"localized", localized}, {"centre", centre}, {"spread", spread}};
      for_each_mode(g, [&](std::size_t idx, int k1, int k2) {
        const cplx z = complex_normal(rng);
        if (std::abs(k1) > kmax || std::abs(k2) > kmax) return;
        double a = std::pow(1.0 + std::hypot(static_cast<double>(k1), static_cast<double>(k2)), tilt);
        if (localized) {
          const double d1 = k1 - centre * std::cos(th), d2 = k2 - centre * std::sin(th);
          a = std::exp(-0.5 * (d1 * d1 + d2 * d2) / (spread * spread));
        }
        f.coeffs()[idx] = a * z;
      });
      return f;
    };
    nlohmann::json mu, mv;
    SpectralField2D u = draw(mu), v = draw(mv);
    metas[trial] = {{"trial", trial}, {"u", mu}, {"v", mv}};
    try {
      ratios[trial] = sobolev_product_ratio(u, v, s0, s1, s2);
    } catch (const DegenerateInputError&) {
    }
  });
  RatioReport r;
  r.target = "sobolev_product";
  r.exponents = {s0, s1, s2, 0, 0, 0};
  r.grid = {{"n", n}, {"seed", seed}, {"kmax", kmax}};
  r.conditions_hold = sobolev_product_admissible(s0, s1, s2);
  std::vector<double> good;
  int best = -1;
  for (int i = 0; i < trials; ++i) {
    if (ratios[i] < 0.0) {
      ++r.n_degenerate;
      continue;
    }
    good.push_back(ratios[i]);
    if (best < 0 || ratios[i] > ratios[best]) best = i;
  }
  r.n_trials = static_cast<int>(good.size());
  if (best >= 0) {
    r.max_ratio = ratios[best];
    r.argmax = metas[best];
  }
  r.median_ratio = detail::median(good);
  return r;
}

}  // namespace mkg2d
