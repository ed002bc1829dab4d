#pragma once

// Fourier-multiplier calculus on the periodic square [0, period)^2.
//
// Coefficients are normalized against the orthonormal basis
// e_k(x) = exp(i xi.x) / period, xi = (2 pi / period) k, so that
// ||u||_{L^2}^2 = sum_k |c_k|^2 exactly. Storage is row-major over
// (k1, k2) in FFT order: index i maps to k = i for i < n/2 and i - n otherwise.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "mkg2d/errors.hpp"
#include "mkg2d/fft.hpp"

namespace mkg2d {

using cplx = std::complex<double>;

struct GridSpec {
  int nx = 64;
  int ny = 64;
  double period = 2.0 * std::numbers::pi;
  double dealias_fraction = 2.0 / 3.0;

  void validate() const {
    if (nx < 8 || ny < 8 || nx % 2 != 0 || ny % 2 != 0)
      throw ConfigError("grid: nx, ny must be even and >= 8 (got " + std::to_string(nx) + "x" +
                        std::to_string(ny) + ")");
    if (!(period > 0.0) || !std::isfinite(period)) throw ConfigError("grid: period must be > 0");
    if (!(dealias_fraction > 0.0 && dealias_fraction <= 1.0))
      throw ConfigError("grid: dealias_fraction must lie in (0, 1]");
  }

  static GridSpec square(int n, double period = 2.0 * std::numbers::pi) {
    GridSpec g;
    g.nx = n;
    g.ny = n;
    g.period = period;
    return g;
  }

  std::size_t size() const { return static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny); }
  double area() const { return period * period; }
  double scale() const { return 2.0 * std::numbers::pi / period; }
  double spacing_x() const { return period / nx; }
  double spacing_y() const { return period / ny; }

  int wavenumber_x(int i1) const { return i1 < nx / 2 ? i1 : i1 - nx; }
  int wavenumber_y(int i2) const { return i2 < ny / 2 ? i2 : i2 - ny; }

  // Largest |k| per axis kept by the dealias mask.
  int cutoff_x() const { return static_cast<int>(std::floor(dealias_fraction * nx / 2.0 + 1e-12)); }
  int cutoff_y() const { return static_cast<int>(std::floor(dealias_fraction * ny / 2.0 + 1e-12)); }
  bool retained(int k1, int k2) const {
    return std::abs(k1) <= cutoff_x() && std::abs(k2) <= cutoff_y();
  }

  std::size_t index(int k1, int k2) const {
    const int i1 = k1 < 0 ? k1 + nx : k1;
    const int i2 = k2 < 0 ? k2 + ny : k2;
    return static_cast<std::size_t>(i1) * static_cast<std::size_t>(ny) +
           static_cast<std::size_t>(i2);
  }

  /// Largest <xi> over the whole lattice.
  double max_bracket() const {
    const double a = scale() * nx / 2.0;
    const double b = scale() * ny / 2.0;
    return std::sqrt(1.0 + a * a + b * b);
  }

  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

/// Calls f(idx, k1, k2) for every lattice mode in storage order.
template <class F>
void for_each_mode(const GridSpec& g, F&& f) {
  std::size_t idx = 0;
  for (int i1 = 0; i1 < g.nx; ++i1) {
    const int k1 = g.wavenumber_x(i1);
    for (int i2 = 0; i2 < g.ny; ++i2, ++idx) f(idx, k1, g.wavenumber_y(i2));
  }
}

inline void require_same_grid(const GridSpec& a, const GridSpec& b, const char* op) {
  if (!(a == b)) throw ShapeError(std::string(op) + ": operands live on different grids");
}

class SpectralField2D {
 public:
  SpectralField2D() = default;
  explicit SpectralField2D(const GridSpec& grid, bool is_real = false)
      : grid_(grid), coeffs_(grid.size()), is_real_(is_real) {
    grid_.validate();
  }

  static SpectralField2D zeros(const GridSpec& grid, bool is_real = false) {
    return SpectralField2D(grid, is_real);
  }

  static SpectralField2D single_mode(const GridSpec& grid, int k1, int k2, cplx amplitude = 1.0) {
    SpectralField2D f(grid, false);
    f.at(k1, k2) = amplitude;
    return f;
  }

  /// Forward transform of physical samples u[i1 * ny + i2] = u(i1 h, i2 h).
  static SpectralField2D from_physical(const GridSpec& grid, std::span<const cplx> samples,
                                       bool is_real) {
    if (samples.size() != grid.size()) throw ShapeError("from_physical: sample count mismatch");
    SpectralField2D f(grid, is_real);
    if (is_real) {
      for (std::size_t i = 0; i < samples.size(); ++i) f.coeffs_[i] = samples[i].real();
    } else {
      std::copy(samples.begin(), samples.end(), f.coeffs_.begin());
    }
    fft::transform_2d(f.coeffs_, grid.nx, grid.ny, fft::Direction::forward);
    const double norm = std::sqrt(grid.area()) / static_cast<double>(grid.size());
    for (auto& c : f.coeffs_) c *= norm;
    return f;
  }

  static SpectralField2D from_physical_real(const GridSpec& grid, std::span<const double> samples) {
    std::vector<cplx> tmp(samples.begin(), samples.end());
    return from_physical(grid, tmp, true);
  }

  /// Samples on the uniform grid.
  std::vector<cplx> to_physical() const {
    std::vector<cplx> out(coeffs_);
    fft::transform_2d(out, grid_.nx, grid_.ny, fft::Direction::backward);
    const double norm = 1.0 / std::sqrt(grid_.area());
    for (auto& v : out) v *= norm;
    if (is_real_)
      for (auto& v : out) v = v.real();
    return out;
  }

  const GridSpec& grid() const { return grid_; }
  bool is_real() const { return is_real_; }
  void set_real(bool r) { is_real_ = r; }

  std::span<cplx> coeffs() { return coeffs_; }
  std::span<const cplx> coeffs() const { return coeffs_; }
  std::size_t size() const { return coeffs_.size(); }

  cplx& at(int k1, int k2) { return coeffs_[grid_.index(k1, k2)]; }
  cplx at(int k1, int k2) const { return coeffs_[grid_.index(k1, k2)]; }

  double l2_norm() const {
    double s = 0.0;
    for (const auto& c : coeffs_) s += std::norm(c);
    return std::sqrt(s);
  }

  /// Spatial mean value of the field.
  cplx mean() const { return coeffs_.empty() ? cplx{} : at(0, 0) / std::sqrt(grid_.area()); }

  /// max_k |c(-k) - conj(c(k))| / max_k |c(k)|; zero for exactly real fields.
  double hermitian_defect() const {
    double worst = 0.0, scale = 0.0;
    for_each_mode(grid_, [&](std::size_t idx, int k1, int k2) {
      // Nyquist lines are their own mirror only modulo n; skip them.
      if (k1 == -grid_.nx / 2 || k2 == -grid_.ny / 2) return;
      worst = std::max(worst, std::abs(coeffs_[grid_.index(-k1, -k2)] - std::conj(coeffs_[idx])));
      scale = std::max(scale, std::abs(coeffs_[idx]));
    });
    return scale > 0.0 ? worst / scale : 0.0;
  }

  bool all_finite() const {
    return std::all_of(coeffs_.begin(), coeffs_.end(), [](const cplx& c) {
      return std::isfinite(c.real()) && std::isfinite(c.imag());
    });
  }

  /// Zeroes every mode outside the dealias band.
  SpectralField2D& truncate_to_band() {
    for_each_mode(grid_, [&](std::size_t idx, int k1, int k2) {
      if (!grid_.retained(k1, k2)) coeffs_[idx] = 0.0;
    });
    return *this;
  }

  /// Coefficients of the pointwise complex conjugate: c'(k) = conj(c(-k)).
  SpectralField2D conjugate() const {
    SpectralField2D out(grid_, is_real_);
    for_each_mode(grid_, [&](std::size_t idx, int k1, int k2) {
      out.coeffs_[idx] = std::conj(coeffs_[grid_.index(-k1, -k2)]);
    });
    return out;
  }

  SpectralField2D real_part() const {
    SpectralField2D c = conjugate();
    SpectralField2D out(grid_, true);
    for (std::size_t i = 0; i < size(); ++i) out.coeffs_[i] = 0.5 * (coeffs_[i] + c.coeffs_[i]);
    return out;
  }

  SpectralField2D imag_part() const {
    SpectralField2D c = conjugate();
    SpectralField2D out(grid_, true);
    for (std::size_t i = 0; i < size(); ++i)
      out.coeffs_[i] = (coeffs_[i] - c.coeffs_[i]) / cplx(0.0, 2.0);
    return out;
  }

  SpectralField2D& operator+=(const SpectralField2D& o) {
    require_same_grid(grid_, o.grid_, "operator+=");
    for (std::size_t i = 0; i < size(); ++i) coeffs_[i] += o.coeffs_[i];
    is_real_ = is_real_ && o.is_real_;
    return *this;
  }
  SpectralField2D& operator-=(const SpectralField2D& o) {
    require_same_grid(grid_, o.grid_, "operator-=");
    for (std::size_t i = 0; i < size(); ++i) coeffs_[i] -= o.coeffs_[i];
    is_real_ = is_real_ && o.is_real_;
    return *this;
  }
  SpectralField2D& operator*=(cplx a) {
    for (auto& c : coeffs_) c *= a;
    if (a.imag() != 0.0) is_real_ = false;
    return *this;
  }
  SpectralField2D& operator*=(double a) {
    for (auto& c : coeffs_) c *= a;
    return *this;
  }

  /// this += a * x
  SpectralField2D& axpy(cplx a, const SpectralField2D& x) {
    require_same_grid(grid_, x.grid_, "axpy");
    for (std::size_t i = 0; i < size(); ++i) coeffs_[i] += a * x.coeffs_[i];
    is_real_ = is_real_ && x.is_real_ && a.imag() == 0.0;
    return *this;
  }

  friend SpectralField2D operator+(SpectralField2D a, const SpectralField2D& b) { return a += b; }
  friend SpectralField2D operator-(SpectralField2D a, const SpectralField2D& b) { return a -= b; }
  friend SpectralField2D operator*(cplx s, SpectralField2D a) { return a *= s; }
  friend SpectralField2D operator*(double s, SpectralField2D a) { return a *= s; }
  friend SpectralField2D operator-(SpectralField2D a) { return a *= -1.0; }

  friend bool operator==(const SpectralField2D&, const SpectralField2D&) = default;

 private:
  GridSpec grid_{};
  std::vector<cplx> coeffs_;
  bool is_real_ = false;
};

/// L^2 inner product <u, v> = sum conj(u_k) v_k.
inline cplx inner(const SpectralField2D& u, const SpectralField2D& v) {
  require_same_grid(u.grid(), v.grid(), "inner");
  cplx s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) s += std::conj(u.coeffs()[i]) * v.coeffs()[i];
  return s;
}

// ---------------------------------------------------------------------------
// Symbols

enum class SymbolKind { frac_grad, bessel, partial, riesz, inv_laplace };
enum class ZeroModeRule { zero, identity };

struct SymbolSpec {
  SymbolKind kind = SymbolKind::bessel;
  double alpha = 0.0;  // exponent for frac_grad / bessel
  int axis = 1;        // 1 or 2 for partial / riesz
  ZeroModeRule zero_mode = ZeroModeRule::zero;

  static SymbolSpec frac_grad(double a, ZeroModeRule z = ZeroModeRule::zero) {
    return {SymbolKind::frac_grad, a, 1, z};
  }
  static SymbolSpec bessel(double a, ZeroModeRule z = ZeroModeRule::identity) {
    return {SymbolKind::bessel, a, 1, z};
  }
  static SymbolSpec partial(int j, ZeroModeRule z = ZeroModeRule::zero) {
    return {SymbolKind::partial, 0.0, j, z};
  }
  static SymbolSpec riesz(int j) { return {SymbolKind::riesz, 0.0, j, ZeroModeRule::zero}; }
  static SymbolSpec inv_laplace() { return {SymbolKind::inv_laplace, 0.0, 1, ZeroModeRule::zero}; }

  void validate() const {
    if ((kind == SymbolKind::partial || kind == SymbolKind::riesz) && axis != 1 && axis != 2)
      throw ConfigError("symbol: axis must be 1 or 2");
    const bool singular = kind == SymbolKind::riesz || kind == SymbolKind::inv_laplace ||
                          (kind == SymbolKind::frac_grad && alpha < 0.0);
    if (singular && zero_mode != ZeroModeRule::zero)
      throw ConfigError("symbol: singular multiplier requires zero_mode_rule = zero");
    if (!std::isfinite(alpha)) throw ConfigError("symbol: exponent must be finite");
  }

  bool odd() const { return kind == SymbolKind::partial || kind == SymbolKind::riesz; }

  /// Multiplier at a nonzero frequency xi.
  cplx value(double xi1, double xi2) const {
    const double r2 = xi1 * xi1 + xi2 * xi2;
    const double xj = axis == 1 ? xi1 : xi2;
    switch (kind) {
      case SymbolKind::frac_grad: return std::pow(std::sqrt(r2), alpha);
      case SymbolKind::bessel: return std::pow(1.0 + r2, alpha / 2.0);
      case SymbolKind::partial: return {0.0, xj};
      case SymbolKind::riesz: return {0.0, xj / std::sqrt(r2)};
      case SymbolKind::inv_laplace: return 1.0 / r2;
    }
    return 0.0;
  }
};

/// Coefficient-wise multiplication by the symbol. Odd symbols vanish on the
/// Nyquist line of their axis so real fields stay real.
inline SpectralField2D apply_symbol(const SpectralField2D& u, const SymbolSpec& sym) {
  sym.validate();
  const GridSpec& g = u.grid();
  const double sc = g.scale();
  SpectralField2D out(g, u.is_real());
  auto src = u.coeffs();
  auto dst = out.coeffs();
  for_each_mode(g, [&](std::size_t idx, int k1, int k2) {
    if (k1 == 0 && k2 == 0) {
      dst[idx] = sym.zero_mode == ZeroModeRule::identity ? src[idx] : cplx{};
      return;
    }
    if (sym.odd() && ((sym.axis == 1 && k1 == -g.nx / 2) || (sym.axis == 2 && k2 == -g.ny / 2))) {
      dst[idx] = 0.0;
      return;
    }
    dst[idx] = src[idx] * sym.value(sc * k1, sc * k2);
  });
  return out;
}

/// Real, radial multiplier m(|xi|) applied mode-wise (m(0) used at k = 0).
template <class M>
SpectralField2D apply_radial(const SpectralField2D& u, M&& m) {
  const GridSpec& g = u.grid();
  const double sc = g.scale();
  SpectralField2D out(g, u.is_real());
  auto src = u.coeffs();
  auto dst = out.coeffs();
  for_each_mode(g, [&](std::size_t idx, int k1, int k2) {
    dst[idx] = src[idx] * m(sc * std::hypot(static_cast<double>(k1), static_cast<double>(k2)));
  });
  return out;
}

inline SpectralField2D partial(const SpectralField2D& u, int axis) {
  return apply_symbol(u, SymbolSpec::partial(axis));
}

// ---------------------------------------------------------------------------
// Products

namespace detail {

inline std::vector<cplx> physical(const SpectralField2D& u) { return u.to_physical(); }

/// Transforms pointwise samples back and applies the dealias mask.
inline SpectralField2D to_spectral_dealiased(const GridSpec& g, std::span<const cplx> samples,
                                             bool is_real) {
  SpectralField2D f = SpectralField2D::from_physical(g, samples, is_real);
  f.truncate_to_band();
  return f;
}

}  // namespace detail

/// Pointwise product in physical space followed by the dealias mask.
inline SpectralField2D pointwise_product(const SpectralField2D& u, const SpectralField2D& v) {
  require_same_grid(u.grid(), v.grid(), "pointwise_product");
  auto pu = u.to_physical();
  auto pv = v.to_physical();
  for (std::size_t i = 0; i < pu.size(); ++i) pu[i] *= pv[i];
  return detail::to_spectral_dealiased(u.grid(), pu, u.is_real() && v.is_real());
}

/// Q12(u, v) = d1 u d2 v - d2 u d1 v, dealiased.
inline SpectralField2D null_form_q12(const SpectralField2D& u, const SpectralField2D& v) {
  require_same_grid(u.grid(), v.grid(), "null_form_q12");
  auto u1 = partial(u, 1).to_physical();
  auto u2 = partial(u, 2).to_physical();
  auto v1 = partial(v, 1).to_physical();
  auto v2 = partial(v, 2).to_physical();
  for (std::size_t i = 0; i < u1.size(); ++i) u1[i] = u1[i] * v2[i] - u2[i] * v1[i];
  return detail::to_spectral_dealiased(u.grid(), u1, u.is_real() && v.is_real());
}

/// Sum over modes of |c_k|^2 * w(k)^2 for a per-mode weight.
template <class W>
double weighted_l2(const SpectralField2D& u, W&& w) {
  const GridSpec& g = u.grid();
  const double sc = g.scale();
  double s = 0.0;
  auto c = u.coeffs();
  for_each_mode(g, [&](std::size_t idx, int k1, int k2) {
    const double wk = w(sc * k1, sc * k2);
    s += wk * wk * std::norm(c[idx]);
  });
  return std::sqrt(s);
}

}  // namespace mkg2d
