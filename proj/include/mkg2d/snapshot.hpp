#pragma once

// Binary snapshot of a GaugeState.
//
//   "MKG2" | u16 version | u32 nx | u32 ny | f64 period | f64 t | f64 mass | f64 eps_tilde
//   5 x (u8 tag | complex f64 coefficients) | u32 CRC-32
//
// Little-endian throughout. Tags: 'P' phi+, 'M' phi-, 'A' A^df+ (2 comps), 'B' A^df-,
// 'C' A^cf. Coefficients run k1 = -nx/2 .. nx/2-1 (outer), then k2 likewise.
// The CRC (zlib) covers everything after magic and version.

#include <zlib.h>

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <optional>
#include <string>
#include <vector>

#include "mkg2d/gauge.hpp"

namespace mkg2d {

inline constexpr char snapshot_magic[4] = {'M', 'K', 'G', '2'};
inline constexpr std::uint16_t snapshot_version = 1;

namespace detail {

class ByteWriter {
 public:
  void u8(std::uint8_t v) { buf_.push_back(v); }
  void u16(std::uint16_t v) { le(v, 2); }
  void u32(std::uint32_t v) { le(v, 4); }
  void f64(double v) { le(std::bit_cast<std::uint64_t>(v), 8); }
  void raw(const void* p, std::size_t n) {
    auto b = static_cast<const std::uint8_t*>(p);
    buf_.insert(buf_.end(), b, b + n);
  }
  std::vector<std::uint8_t>& bytes() { return buf_; }

 private:
  void le(std::uint64_t v, int n) {
    for (int i = 0; i < n; ++i) buf_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  std::vector<std::uint8_t> buf_;
};

class ByteReader {
 public:
  ByteReader(const std::vector<std::uint8_t>& b, std::size_t pos, std::size_t end) : b_(b), pos_(pos), end_(end) {}
  std::uint8_t u8() { return static_cast<std::uint8_t>(le(1)); }
  std::uint16_t u16() { return static_cast<std::uint16_t>(le(2)); }
  std::uint32_t u32() { return static_cast<std::uint32_t>(le(4)); }
  double f64() { return std::bit_cast<double>(le(8)); }
  std::size_t pos() const { return pos_; }

 private:
  std::uint64_t le(int n) {
    if (pos_ + n > end_) throw TruncatedFileError("snapshot: truncated payload");
    std::uint64_t v = 0;
    for (int i = 0; i < n; ++i) v |= static_cast<std::uint64_t>(b_[pos_ + i]) << (8 * i);
    pos_ += n;
    return v;
  }
  const std::vector<std::uint8_t>& b_;
  std::size_t pos_, end_;
};

inline std::uint32_t crc32_of(const std::uint8_t* p, std::size_t n) {
  uLong c = crc32(0L, Z_NULL, 0);
  while (n > 0) {
    const uInt chunk = static_cast<uInt>(std::min<std::size_t>(n, 1u << 30));
    c = crc32(c, p, chunk);
    p += chunk;
    n -= chunk;
  }
  return static_cast<std::uint32_t>(c);
}

inline void write_field(ByteWriter& w, const SpectralField2D& f) {
  const GridSpec& g = f.grid();
  for (int k1 = -g.nx / 2; k1 < g.nx / 2; ++k1)
    for (int k2 = -g.ny / 2; k2 < g.ny / 2; ++k2) {
      const cplx c = f.coeffs()[g.index(k1, k2)];
      w.f64(c.real());
      w.f64(c.imag());
    }
}

inline SpectralField2D read_field(ByteReader& r, const GridSpec& g, bool is_real) {
  SpectralField2D f(g, is_real);
  auto c = f.coeffs();
  for (int k1 = -g.nx / 2; k1 < g.nx / 2; ++k1)
    for (int k2 = -g.ny / 2; k2 < g.ny / 2; ++k2) {
      const double re = r.f64();
      const double im = r.f64();
      c[g.index(k1, k2)] = {re, im};
    }
  return f;
}

inline std::vector<std::uint8_t> slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SnapshotError("snapshot: cannot open '" + path + "'");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace detail

/// Serialized bytes of a state.
inline std::vector<std::uint8_t> snapshot_encode(const GaugeState& s) {
  const GridSpec& g = s.grid();
  detail::ByteWriter w;
  w.raw(snapshot_magic, 4);
  w.u16(snapshot_version);
  w.u32(static_cast<std::uint32_t>(g.nx));
  w.u32(static_cast<std::uint32_t>(g.ny));
  w.f64(g.period);
  w.f64(s.t);
  w.f64(s.mass);
  w.f64(s.eps_tilde);
  w.u8('P');
  detail::write_field(w, s.phi_plus);
  w.u8('M');
  detail::write_field(w, s.phi_minus);
  w.u8('A');
  for (const auto& f : s.a_df_plus) detail::write_field(w, f);
  w.u8('B');
  for (const auto& f : s.a_df_minus) detail::write_field(w, f);
  w.u8('C');
  for (const auto& f : s.a_cf) detail::write_field(w, f);
  auto& b = w.bytes();
  w.u32(detail::crc32_of(b.data() + 6, b.size() - 6));
  return std::move(w.bytes());
}

/// Decodes a snapshot. With `expected`, the stored grid must match its shape and
/// period (ShapeError otherwise) and the dealias fraction is taken from it;
/// without, the default fraction applies. Half-wave fields come back complex,
/// A^cf real.
inline GaugeState snapshot_decode(const std::vector<std::uint8_t>& b,
                                  const std::optional<GridSpec>& expected = std::nullopt) {
  if (b.size() < 4 || std::memcmp(b.data(), snapshot_magic, 4) != 0)
    throw MagicMismatchError("snapshot: bad magic");
  if (b.size() < 6) throw TruncatedFileError("snapshot: truncated before version");
  const std::uint16_t version = static_cast<std::uint16_t>(b[4] | (b[5] << 8));
  if (version != snapshot_version)
    throw VersionMismatchError("snapshot: version " + std::to_string(version) + ", expected " +
                               std::to_string(snapshot_version));
  constexpr std::size_t header = 6 + 4 + 4 + 4 * 8;
  if (b.size() < header + 4) throw TruncatedFileError("snapshot: truncated header");
  detail::ByteReader hr(b, 6, b.size());
  GridSpec g;
  g.nx = static_cast<int>(hr.u32());
  g.ny = static_cast<int>(hr.u32());
  g.period = hr.f64();
  const double t = hr.f64(), mass = hr.f64(), eps_tilde = hr.f64();
  if (g.nx < 2 || g.ny < 2 || g.nx > (1 << 16) || g.ny > (1 << 16))
    throw SnapshotError("snapshot: implausible grid " + std::to_string(g.nx) + "x" + std::to_string(g.ny));
  const std::size_t field_bytes = g.size() * 16;
  const std::size_t total = header + 5 + 8 * field_bytes + 4;
  if (b.size() < total) throw TruncatedFileError("snapshot: truncated (" + std::to_string(b.size()) +
                                                 " of " + std::to_string(total) + " bytes)");
  if (b.size() > total) throw SnapshotError("snapshot: trailing bytes");
  detail::ByteReader cr(b, total - 4, total);
  if (cr.u32() != detail::crc32_of(b.data() + 6, total - 10)) throw ChecksumError("snapshot: CRC-32 mismatch");

  if (expected) {
    if (expected->nx != g.nx || expected->ny != g.ny || expected->period != g.period)
      throw ShapeError("snapshot: stored grid " + std::to_string(g.nx) + "x" + std::to_string(g.ny) +
                       " does not match the expected " + std::to_string(expected->nx) + "x" +
                       std::to_string(expected->ny));
    g.dealias_fraction = expected->dealias_fraction;
  }
  g.validate();

  detail::ByteReader r(b, header, total - 4);
  auto tag = [&r](char want) {
    const char got = static_cast<char>(r.u8());
    if (got != want) throw SnapshotError(std::string("snapshot: expected block '") + want + "', got '" + got + "'");
  };
  GaugeState s;
  tag('P');
  s.phi_plus = detail::read_field(r, g, false);
  tag('M');
  s.phi_minus = detail::read_field(r, g, false);
  tag('A');
  for (auto& f : s.a_df_plus) f = detail::read_field(r, g, false);
  tag('B');
  for (auto& f : s.a_df_minus) f = detail::read_field(r, g, false);
  tag('C');
  for (auto& f : s.a_cf) f = detail::read_field(r, g, true);
  s.t = t;
  s.mass = mass;
  s.eps_tilde = eps_tilde;
  return s;
}

inline void snapshot_write(const GaugeState& s, const std::string& path) {
  const auto bytes = snapshot_encode(s);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw SnapshotError("snapshot: cannot write '" + path + "'");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw SnapshotError("snapshot: write failed for '" + path + "'");
}

inline GaugeState snapshot_read(const std::string& path, const std::optional<GridSpec>& expected = std::nullopt) {
  return snapshot_decode(detail::slurp(path), expected);
}

}  // namespace mkg2d
