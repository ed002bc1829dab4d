#pragma once

// Run configuration: line-oriented `key = value` text, `#` starts a comment.

#include <charconv>
#include <cstdint>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "mkg2d/dynamics.hpp"
#include "mkg2d/estimates.hpp"
#include "mkg2d/rough_data.hpp"

namespace mkg2d {

struct RunConfig {
  GridSpec grid{};
  RegularityTriple regularity{1.0, 1.0, 1.0};
  EvolveConfig evolve{};
  std::uint64_t seed = 1;
  DataKind data_kind = DataKind::rough_random;
  DataOptions data{};  // data.kind mirrors data_kind after parsing
  std::string data_file;
  std::string out_dir = "out";
  double mass = 1.0;

  // fuzz subcommand
  FuzzTarget fuzz_target = FuzzTarget::product;
  ExponentTuple fuzz_exponents{0.0, 0.5, 0.5, 0.0, 0.51, 0.51};
  int fuzz_trials = 200;
  int fuzz_nt = 32;
  double fuzz_eps = 0.01;
  Pairing fuzz_pairing = Pairing::independent;

  // convergence subcommand: number of dt halvings
  int convergence_levels = 3;

  DataOptions data_options() const {
    DataOptions o = data;
    o.kind = data_kind;
    return o;
  }

  void validate() const {
    grid.validate();
    evolve.validate(grid);
    if (!(mass >= 0.0)) throw ConfigError("config: mass must be >= 0");
    if (data_kind == DataKind::file && data_file.empty())
      throw ConfigError("config: data_kind = file needs data_file");
    if (!(data.delta > 0.0)) throw ConfigError("config: delta must be positive");
    if (!(data.width > 0.0)) throw ConfigError("config: width must be positive");
    if (!(regularity.eps_tilde > 0.0)) throw ConfigError("config: eps_tilde must be positive");
    if (fuzz_trials < 1) throw ConfigError("config: fuzz_trials must be positive");
    if (convergence_levels < 2) throw ConfigError("config: convergence_levels must be >= 2");
  }
};

namespace detail {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

inline double parse_real(const std::string& key, const std::string& v) {
  double x = 0.0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc{} || p != v.data() + v.size() || !std::isfinite(x))
    throw ConfigError("config: " + key + ": not a real number: '" + v + "'");
  return x;
}

inline long long parse_integer(const std::string& key, const std::string& v) {
  long long x = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc{} || p != v.data() + v.size())
    throw ConfigError("config: " + key + ": not an integer: '" + v + "'");
  return x;
}

inline std::uint64_t parse_u64(const std::string& key, const std::string& v) {
  std::uint64_t x = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc{} || p != v.data() + v.size())
    throw ConfigError("config: " + key + ": not an unsigned integer: '" + v + "'");
  return x;
}

inline bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError("config: " + key + ": not a boolean: '" + v + "'");
}

template <class E>
E parse_choice(const std::string& key, const std::string& v,
               std::initializer_list<std::pair<const char*, E>> options) {
  std::string names;
  for (const auto& [name, e] : options) {
    if (v == name) return e;
    names += names.empty() ? name : std::string("|") + name;
  }
  throw ConfigError("config: " + key + ": expected one of {" + names + "}, got '" + v + "'");
}

}  // namespace detail

inline RhsForm parse_rhs_form(const std::string& v) {
  return detail::parse_choice<RhsForm>("rhs", v, {{"direct", RhsForm::direct}, {"nullform", RhsForm::nullform}});
}

inline Integrator parse_integrator(const std::string& v) {
  return detail::parse_choice<Integrator>("integrator", v,
                                          {{"etd_rk4", Integrator::etd_rk4}, {"strang", Integrator::strang}});
}

inline const char* to_string(RhsForm f) { return f == RhsForm::direct ? "direct" : "nullform"; }
inline const char* to_string(Integrator i) { return i == Integrator::etd_rk4 ? "etd_rk4" : "strang"; }

struct ConfigKey {
  const char* name;
  const char* help;
  std::function<void(RunConfig&, const std::string&)> set;
};

inline const std::vector<ConfigKey>& config_keys() {
  using namespace detail;
  static const std::vector<ConfigKey> keys = {
      {"n", "grid points per axis (sets nx and ny), even, >= 8",
       [](RunConfig& c, const std::string& v) { c.grid.nx = c.grid.ny = static_cast<int>(parse_integer("n", v)); }},
      {"nx", "grid points along x", [](RunConfig& c, const std::string& v) { c.grid.nx = static_cast<int>(parse_integer("nx", v)); }},
      {"ny", "grid points along y", [](RunConfig& c, const std::string& v) { c.grid.ny = static_cast<int>(parse_integer("ny", v)); }},
      {"period", "torus side length (default 2 pi)",
       [](RunConfig& c, const std::string& v) { c.grid.period = parse_real("period", v); }},
      {"dealias_fraction", "retained fraction of the Nyquist band (default 2/3)",
       [](RunConfig& c, const std::string& v) { c.grid.dealias_fraction = parse_real("dealias_fraction", v); }},
      {"s", "regularity of phi", [](RunConfig& c, const std::string& v) { c.regularity.s = parse_real("s", v); }},
      {"r", "regularity of A^df", [](RunConfig& c, const std::string& v) { c.regularity.r = parse_real("r", v); }},
      {"l", "regularity of A^cf", [](RunConfig& c, const std::string& v) { c.regularity.l = parse_real("l", v); }},
      {"eps_tilde", "curl-free weight exponent (default 0.05)",
       [](RunConfig& c, const std::string& v) { c.regularity.eps_tilde = parse_real("eps_tilde", v); }},
      {"mass", "Klein-Gordon mass m >= 0 (default 1)",
       [](RunConfig& c, const std::string& v) { c.mass = parse_real("mass", v); }},
      {"dt", "time step", [](RunConfig& c, const std::string& v) { c.evolve.dt = parse_real("dt", v); }},
      {"t_end", "final time", [](RunConfig& c, const std::string& v) { c.evolve.t_end = parse_real("t_end", v); }},
      {"rhs", "direct | nullform", [](RunConfig& c, const std::string& v) { c.evolve.rhs_form = parse_rhs_form(v); }},
      {"integrator", "etd_rk4 | strang",
       [](RunConfig& c, const std::string& v) { c.evolve.integrator = parse_integrator(v); }},
      {"diag_stride", "steps between diagnostics rows",
       [](RunConfig& c, const std::string& v) { c.evolve.diag_stride = static_cast<int>(parse_integer("diag_stride", v)); }},
      {"snapshot_stride", "steps between snapshots (0: initial and final only)",
       [](RunConfig& c, const std::string& v) {
         c.evolve.snapshot_stride = static_cast<int>(parse_integer("snapshot_stride", v));
       }},
      {"cfl_limit", "bound on dt * max<xi> (default 5)",
       [](RunConfig& c, const std::string& v) { c.evolve.cfl_limit = parse_real("cfl_limit", v); }},
      {"nonlinear", "false: free half-wave flow",
       [](RunConfig& c, const std::string& v) { c.evolve.nonlinear = parse_bool("nonlinear", v); }},
      {"seed", "64-bit RNG seed", [](RunConfig& c, const std::string& v) { c.seed = parse_u64("seed", v); }},
      {"data_kind", "rough_random | smooth_gaussian | file",
       [](RunConfig& c, const std::string& v) {
         c.data_kind = parse_choice<DataKind>("data_kind", v,
                                              {{"rough_random", DataKind::rough_random},
                                               {"smooth_gaussian", DataKind::smooth_gaussian},
                                               {"file", DataKind::file}});
       }},
      {"data_file", "snapshot to start from when data_kind = file",
       [](RunConfig& c, const std::string& v) { c.data_file = v; }},
      {"delta", "rough data: spectral offset (default 0.01)",
       [](RunConfig& c, const std::string& v) { c.data.delta = parse_real("delta", v); }},
      {"amplitude", "smooth data: L^2 norm per component (default 0.5)",
       [](RunConfig& c, const std::string& v) { c.data.amplitude = parse_real("amplitude", v); }},
      {"width", "smooth data: spectral envelope width (default 3)",
       [](RunConfig& c, const std::string& v) { c.data.width = parse_real("width", v); }},
      {"override_admissibility", "accept inadmissible (s, r, l)",
       [](RunConfig& c, const std::string& v) {
         c.data.override_admissibility = parse_bool("override_admissibility", v);
       }},
      {"out", "output directory", [](RunConfig& c, const std::string& v) { c.out_dir = v; }},
      {"fuzz_target", "product | nullform_q12 | triple_product",
       [](RunConfig& c, const std::string& v) {
         c.fuzz_target = parse_choice<FuzzTarget>("fuzz_target", v,
                                                  {{"product", FuzzTarget::product},
                                                   {"nullform_q12", FuzzTarget::nullform_q12},
                                                   {"triple_product", FuzzTarget::triple_product}});
       }},
      {"fuzz_exponents", "six reals: s0 s1 s2 b0 b1 b2",
       [](RunConfig& c, const std::string& v) {
         std::istringstream in(v);
         std::vector<double> x;
         std::string tok;
         while (in >> tok) x.push_back(parse_real("fuzz_exponents", tok));
         if (x.size() != 6) throw ConfigError("config: fuzz_exponents needs six values");
         c.fuzz_exponents = {x[0], x[1], x[2], x[3], x[4], x[5]};
       }},
      {"fuzz_trials", "ensemble size", [](RunConfig& c, const std::string& v) {
         c.fuzz_trials = static_cast<int>(parse_integer("fuzz_trials", v));
       }},
      {"fuzz_nt", "time samples", [](RunConfig& c, const std::string& v) {
         c.fuzz_nt = static_cast<int>(parse_integer("fuzz_nt", v));
       }},
      {"fuzz_eps", "value of the '+' increment", [](RunConfig& c, const std::string& v) {
         c.fuzz_eps = parse_real("fuzz_eps", v);
       }},
      {"fuzz_pairing", "independent | parallel_gradient",
       [](RunConfig& c, const std::string& v) {
         c.fuzz_pairing = parse_choice<Pairing>("fuzz_pairing", v,
                                                {{"independent", Pairing::independent},
                                                 {"parallel_gradient", Pairing::parallel_gradient}});
       }},
      {"convergence_levels", "dt levels in the refinement study (>= 2)",
       [](RunConfig& c, const std::string& v) {
         c.convergence_levels = static_cast<int>(parse_integer("convergence_levels", v));
       }},
  };
  return keys;
}

/// Applies `key = value` lines on top of `base`. Does not validate.
inline RunConfig parse_config_text(const std::string& text, RunConfig base = {}) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
    const std::string t = detail::trim(line);
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = detail::trim(std::string_view(t).substr(0, eq));
    const std::string val = detail::trim(std::string_view(t).substr(eq + 1));
    bool found = false;
    for (const auto& k : config_keys())
      if (key == k.name) {
        k.set(base, val);
        found = true;
        break;
      }
    if (!found) throw ConfigError("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
  }
  return base;
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

/// Text for --help.
inline std::string config_keys_help() {
  std::string out = "Config keys (key = value, # comments):\n";
  for (const auto& k : config_keys()) {
    std::string name = k.name;
    name.resize(std::max<std::size_t>(name.size() + 1, 24), ' ');
    out += "  " + name + k.help + "\n";
  }
  return out;
}

}  // namespace mkg2d
