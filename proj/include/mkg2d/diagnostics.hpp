#pragma once

// Per-step observables and their CSV / JSON-lines sinks.

#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "mkg2d/errors.hpp"

namespace mkg2d {

struct DiagnosticsRecord {
  double t = 0.0;
  double gauss_residual_l2 = 0.0;
  double gauss_mean_mode = 0.0;
  double energy = 0.0;
  double charge = 0.0;
  double phi_hs = 0.0;        // ||phi||_{H^s}
  double adf_hr = 0.0;        // ||A^df||_{H^r}
  double acf_weighted = 0.0;  // || |D|^eps A^cf ||_{H^{l - eps}}

  static constexpr std::array<const char*, 8> columns = {
      "t", "gauss_residual_l2", "gauss_mean_mode", "energy",
      "charge", "phi_hs", "adf_hr", "acf_weighted"};

  std::array<double, 8> values() const {
    return {t, gauss_residual_l2, gauss_mean_mode, energy, charge, phi_hs, adf_hr, acf_weighted};
  }

  bool all_finite() const {
    for (double v : values())
      if (!std::isfinite(v)) return false;
    return true;
  }
};

using DiagnosticsSink = std::function<void(const DiagnosticsRecord&)>;

/// Shortest round-trip decimal form; identical inputs give identical bytes.
inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string csv_header() {
  std::string h;
  for (std::size_t i = 0; i < DiagnosticsRecord::columns.size(); ++i) {
    if (i) h += ',';
    h += DiagnosticsRecord::columns[i];
  }
  return h;
}

inline std::string csv_row(const DiagnosticsRecord& r) {
  std::string line;
  const auto v = r.values();
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) line += ',';
    line += format_double(v[i]);
  }
  return line;
}

/// Parses one data row; throws ConfigError on a malformed line.
inline DiagnosticsRecord parse_csv_row(const std::string& line) {
  std::array<double, 8> v{};
  std::stringstream ss(line);
  std::string cell;
  std::size_t i = 0;
  while (std::getline(ss, cell, ',')) {
    if (i >= v.size()) throw ConfigError("diagnostics row has too many columns");
    try {
      std::size_t used = 0;
      v[i] = std::stod(cell, &used);
      if (used != cell.size()) throw ConfigError("bad number");
    } catch (const std::exception&) {
      throw ConfigError("diagnostics row: cannot parse '" + cell + "'");
    }
    ++i;
  }
  if (i != v.size()) throw ConfigError("diagnostics row has too few columns");
  return {v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7]};
}

/// Single-writer CSV sink.
class CsvDiagnosticsWriter {
 public:
  explicit CsvDiagnosticsWriter(const std::string& path) : out_(path, std::ios::binary) {
    if (!out_) throw Error("cannot open diagnostics file " + path);
    out_ << csv_header() << '\n';
  }
  void operator()(const DiagnosticsRecord& r) {
    out_ << csv_row(r) << '\n';
    if (!out_) throw Error("write failure on diagnostics file");
  }
  void flush() { out_.flush(); }

 private:
  std::ofstream out_;
};

}  // namespace mkg2d
