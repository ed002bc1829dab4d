#pragma once

// Sobolev, mixed Lebesgue and wave-Sobolev norms.
//
// Space-time fields are sampled on t_j = -t_span/2 + j t_span/nt, multiplied
// by a fixed temporal window and transformed with the e^{-i tau t} convention,
// so e^{i t |k|} sits at tau = +|k|. Three-dimensional coefficients are
// Plancherel-normalized: sum |c(k, w)|^2 = dt sum_j ||u(t_j)||_{L^2}^2.

#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "mkg2d/fft.hpp"
#include "mkg2d/spectral.hpp"

namespace mkg2d {

/// ||u||_{H^s} (weight <xi>) or ||u||_{\dot H^s} (weight |xi|, zero mode dropped).
inline double sobolev_norm(const SpectralField2D& u, double s, bool homogeneous = false) {
  if (!homogeneous)
    return weighted_l2(u, [s](double a, double b) { return std::pow(1.0 + a * a + b * b, s / 2.0); });
  return weighted_l2(u, [s](double a, double b) {
    const double r2 = a * a + b * b;
    return r2 > 0.0 ? std::pow(r2, s / 2.0) : 0.0;
  });
}

enum class WindowKind { raised_cosine, none };

inline const char* to_string(WindowKind w) {
  return w == WindowKind::raised_cosine ? "raised_cosine" : "none";
}

/// cos^2(pi t / t_span) on [-t_span/2, t_span/2), or 1.
inline double window_value(WindowKind w, double t, double t_span) {
  if (w == WindowKind::none) return 1.0;
  const double c = std::cos(std::numbers::pi * t / t_span);
  return c * c;
}

/// RMS frequency ||w'|| / ||w|| of the continuous window (0 for none).
inline double window_bandwidth(WindowKind w, double t_span) {
  if (w == WindowKind::none) return 0.0;
  return std::numbers::pi / t_span * std::sqrt(4.0 / 3.0);
}

class SpaceTimeField {
 public:
  SpaceTimeField() = default;

  /// samples[j * grid.size() + i] = u(t_j, x_i), unwindowed.
  static SpaceTimeField from_samples(const GridSpec& grid, int nt, double t_span,
                                     std::vector<cplx> samples,
                                     WindowKind window = WindowKind::raised_cosine) {
    grid.validate();
    if (nt < 2) throw ConfigError("space-time field: nt must be >= 2");
    if (!(t_span > 0.0)) throw ConfigError("space-time field: t_span must be positive");
    if (samples.size() != static_cast<std::size_t>(nt) * grid.size())
      throw ShapeError("space-time field: sample count mismatch");
    SpaceTimeField f;
    f.grid_ = grid;
    f.nt_ = nt;
    f.t_span_ = t_span;
    f.window_ = window;
    f.times_.resize(nt);
    f.window_values_.resize(nt);
    for (int j = 0; j < nt; ++j) {
      f.times_[j] = -0.5 * t_span + t_span * j / nt;
      f.window_values_[j] = window_value(window, f.times_[j], t_span);
    }
    const std::size_t m = grid.size();
    for (int j = 0; j < nt; ++j)
      for (std::size_t i = 0; i < m; ++i) samples[j * m + i] *= f.window_values_[j];
    f.values_ = std::move(samples);
    f.transform();
    return f;
  }

  /// Builds from spatial slices u(t_j) given on the standard time grid.
  static SpaceTimeField from_slices(const std::vector<SpectralField2D>& slices, double t_span,
                                    WindowKind window = WindowKind::raised_cosine) {
    if (slices.empty()) throw ConfigError("space-time field: no slices");
    const GridSpec& g = slices.front().grid();
    std::vector<cplx> samples;
    samples.reserve(slices.size() * g.size());
    for (const auto& s : slices) {
      require_same_grid(g, s.grid(), "space-time field");
      auto p = s.to_physical();
      samples.insert(samples.end(), p.begin(), p.end());
    }
    return from_samples(g, static_cast<int>(slices.size()), t_span, std::move(samples), window);
  }

  /// Standard sample times for (nt, t_span).
  static std::vector<double> time_grid(int nt, double t_span) {
    std::vector<double> t(nt);
    for (int j = 0; j < nt; ++j) t[j] = -0.5 * t_span + t_span * j / nt;
    return t;
  }

  const GridSpec& grid() const { return grid_; }
  int nt() const { return nt_; }
  double t_span() const { return t_span_; }
  double dt() const { return t_span_ / nt_; }
  WindowKind window() const { return window_; }
  const std::vector<double>& times() const { return times_; }
  const std::vector<double>& window_values() const { return window_values_; }
  /// Windowed physical samples, time-major.
  const std::vector<cplx>& values() const { return values_; }
  /// Coefficients c(w, k1, k2), w-major in FFT order.
  const std::vector<cplx>& coeffs() const { return coeffs_; }

  int frequency_index(int m) const { return m < nt_ / 2 ? m : m - nt_; }
  double omega(int m) const { return 2.0 * std::numbers::pi / t_span_ * frequency_index(m); }

  /// Calls f(w, xi1, xi2, c) over the whole lattice.
  template <class F>
  void for_each_coeff(F&& f) const {
    const double sc = grid_.scale();
    const std::size_t m = grid_.size();
    for (int j = 0; j < nt_; ++j) {
      const double w = omega(j);
      for_each_mode(grid_, [&](std::size_t idx, int k1, int k2) {
        f(w, sc * k1, sc * k2, coeffs_[j * m + idx]);
      });
    }
  }

  SpaceTimeField& operator*=(cplx a) {
    for (auto& v : values_) v *= a;
    for (auto& c : coeffs_) c *= a;
    return *this;
  }

 private:
  void transform() {
    coeffs_ = values_;
    fft::transform_3d(coeffs_, nt_, grid_.nx, grid_.ny, fft::Direction::forward);
    // spatial sqrt(A)/N, temporal sqrt(t_span)/nt, and the e^{-i w t_0} shift
    const double norm = std::sqrt(grid_.area()) / static_cast<double>(grid_.size()) *
                        std::sqrt(t_span_) / static_cast<double>(nt_);
    const std::size_t m = grid_.size();
    for (int j = 0; j < nt_; ++j) {
      const cplx shift = std::polar(norm, -omega(j) * times_[0]);
      for (std::size_t i = 0; i < m; ++i) coeffs_[j * m + i] *= shift;
    }
  }

  GridSpec grid_{};
  int nt_ = 0;
  double t_span_ = 0.0;
  WindowKind window_ = WindowKind::raised_cosine;
  std::vector<double> times_;
  std::vector<double> window_values_;
  std::vector<cplx> values_;
  std::vector<cplx> coeffs_;
};

enum class MixedOrder {
  x_then_t,  // L^q_t L^p_x: spatial norm inside
  t_then_x   // L^p_x L^q_t: temporal norm inside
};

namespace detail {
inline constexpr double inf = std::numeric_limits<double>::infinity();

/// Discrete L^p accumulator with uniform cell measure.
struct LpAccum {
  double p;
  double measure;
  double acc = 0.0;
  void add(double v) {
    if (std::isinf(p))
      acc = std::max(acc, v);
    else
      acc += std::pow(v, p);
  }
  double result() const { return std::isinf(p) ? acc : std::pow(acc * measure, 1.0 / p); }
};
}  // namespace detail

/// Nested discrete Lebesgue norm of the windowed samples.
inline double mixed_norm(const SpaceTimeField& u, double p, double q, MixedOrder order) {
  if (!(p >= 1.0) || !(q >= 1.0)) throw ConfigError("mixed_norm: exponents must lie in [1, inf]");
  const GridSpec& g = u.grid();
  const std::size_t m = g.size();
  const int nt = u.nt();
  const double dx = g.spacing_x() * g.spacing_y();
  const auto& v = u.values();
  if (order == MixedOrder::x_then_t) {
    detail::LpAccum outer{q, u.dt()};
    for (int j = 0; j < nt; ++j) {
      detail::LpAccum inner{p, dx};
      for (std::size_t i = 0; i < m; ++i) inner.add(std::abs(v[j * m + i]));
      outer.add(inner.result());
    }
    return outer.result();
  }
  detail::LpAccum outer{p, dx};
  for (std::size_t i = 0; i < m; ++i) {
    detail::LpAccum inner{q, u.dt()};
    for (int j = 0; j < nt; ++j) inner.add(std::abs(v[j * m + i]));
    outer.add(inner.result());
  }
  return outer.result();
}

enum class XsbWeight {
  wave,            // <|tau| - |xi|>
  elliptic,        // <tau>
  halfwave_plus,   // <tau + |xi|>
  halfwave_minus   // <tau - |xi|>, adapted to e^{+it|D|}
};

inline const char* to_string(XsbWeight w) {
  switch (w) {
    case XsbWeight::wave: return "wave";
    case XsbWeight::elliptic: return "elliptic";
    case XsbWeight::halfwave_plus: return "halfwave_plus";
    case XsbWeight::halfwave_minus: return "halfwave_minus";
  }
  return "?";
}

/// Exponents of an X^{s,b} norm. The "+" superscripts are counted in s_plus and
/// b_plus (negative for "-"); effective exponents add count * eps.
struct XsbSpec {
  double s = 0.0;
  double b = 0.0;
  XsbWeight weight = XsbWeight::wave;
  double eps = 0.01;
  int s_plus = 0;
  int b_plus = 0;

  void validate() const {
    if (!(eps > 0.0 && eps <= 0.1)) throw ConfigError("XsbSpec: eps must lie in (0, 0.1]");
  }
  double effective_s() const { return s + s_plus * eps; }
  double effective_b() const { return b + b_plus * eps; }

  double weight_value(double tau, double xi_abs) const {
    double x = 0.0;
    switch (weight) {
      case XsbWeight::wave: x = std::abs(tau) - xi_abs; break;
      case XsbWeight::elliptic: x = tau; break;
      case XsbWeight::halfwave_plus: x = tau + xi_abs; break;
      case XsbWeight::halfwave_minus: x = tau - xi_abs; break;
    }
    return std::sqrt(1.0 + x * x);
  }
};

/// (sum <xi>^{2s} W(tau, xi)^{2b} |c|^2)^{1/2} over the windowed lattice.
inline double xsb_norm(const SpaceTimeField& u, const XsbSpec& spec) {
  spec.validate();
  const double s = spec.effective_s(), b = spec.effective_b();
  double acc = 0.0;
  u.for_each_coeff([&](double tau, double x1, double x2, cplx c) {
    const double r2 = x1 * x1 + x2 * x2;
    const double w = std::pow(1.0 + r2, s) * std::pow(spec.weight_value(tau, std::sqrt(r2)), 2.0 * b);
    acc += w * std::norm(c);
  });
  return std::sqrt(acc);
}

}  // namespace mkg2d
