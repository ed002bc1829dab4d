#pragma once

// Command-line surface. Results go to stdout or files, messages to stderr.
// Exit codes: 0 success, 1 check failed (inadmissible, identity violated),
// 2 configuration or usage error, 3 runtime error.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "mkg2d/config.hpp"
#include "mkg2d/diagnostics.hpp"
#include "mkg2d/dynamics.hpp"
#include "mkg2d/estimates.hpp"
#include "mkg2d/norms.hpp"
#include "mkg2d/random_fields.hpp"
#include "mkg2d/rough_data.hpp"
#include "mkg2d/snapshot.hpp"

namespace mkg2d {

namespace cli {

struct Overrides {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<int> grid;
  std::optional<double> dt;
  std::optional<double> t_end;
  std::optional<std::string> rhs;
  bool override_admissibility = false;

  void add_to(CLI::App* sub, bool config_required) {
    auto* c = sub->add_option("--config", config, "run configuration file (key = value)");
    if (config_required) c->required();
    sub->add_option("--seed", seed, "RNG seed");
    sub->add_option("--out", out, "output directory");
    sub->add_option("--grid", grid, "grid points per axis");
    sub->add_option("--dt", dt, "time step");
    sub->add_option("--t-end", t_end, "final time");
    sub->add_option("--rhs", rhs, "direct | nullform");
    sub->add_flag("--override-admissibility", override_admissibility, "accept inadmissible (s, r, l)");
  }

  RunConfig resolve(RunConfig base = {}) const {
    RunConfig c = config.empty() ? base : load_config(config);
    if (seed) c.seed = *seed;
    if (out) c.out_dir = *out;
    if (grid) c.grid.nx = c.grid.ny = *grid;
    if (dt) c.evolve.dt = *dt;
    if (t_end) c.evolve.t_end = *t_end;
    if (rhs) c.evolve.rhs_form = parse_rhs_form(*rhs);
    if (override_admissibility) c.data.override_admissibility = true;
    c.validate();
    return c;
  }
};

inline GaugeState initial_state(const RunConfig& c) {
  if (c.data_kind == DataKind::file) {
    GaugeState s = snapshot_read(c.data_file, c.grid);
    s.mass = c.mass;
    s.eps_tilde = c.regularity.eps_tilde;
    return s;
  }
  return rough_data_generate(c.regularity, c.grid, c.seed, c.data_options()).to_state(c.mass, c.regularity.eps_tilde);
}

inline void ensure_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error("cannot create output directory '" + dir + "': " + ec.message());
}

inline std::string snapshot_name(long step) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "snapshot_%06ld.mkg2", step);
  return buf;
}

inline int run_simulate(const Overrides& o) {
  const RunConfig c = o.resolve();
  const GaugeState s0 = initial_state(c);
  ensure_dir(c.out_dir);
  const std::filesystem::path dir(c.out_dir);
  snapshot_write(s0, (dir / snapshot_name(0)).string());
  CsvDiagnosticsWriter csv((dir / "diagnostics.csv").string());
  auto on_snap = [&](const GaugeState& s, long step) { snapshot_write(s, (dir / snapshot_name(step)).string()); };
  const EvolveResult r = evolve(s0, c.evolve, c.regularity, [&](const DiagnosticsRecord& d) { csv(d); }, on_snap);
  csv.flush();
  snapshot_write(r.final_state, (dir / "final.mkg2").string());
  const auto& first = r.diagnostics.front();
  const auto& last = r.diagnostics.back();
  nlohmann::json j = {{"t_end", last.t},
                      {"rows", r.diagnostics.size()},
                      {"energy_drift", std::abs(last.energy - first.energy) / std::max(std::abs(first.energy), 1e-300)},
                      {"charge_drift", std::abs(last.charge - first.charge)},
                      {"gauss_residual_l2", last.gauss_residual_l2},
                      {"diagnostics", (dir / "diagnostics.csv").string()},
                      {"final", (dir / "final.mkg2").string()}};
  std::cout << j.dump() << "\n";
  return 0;
}

inline void write_vector_csv(const std::string& path, const VectorField& a) {
  const GridSpec& g = a[0].grid();
  const auto p1 = a[0].to_physical();
  const auto p2 = a[1].to_physical();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path + "'");
  out << "x,y,a1,a2\n";
  for (int i = 0; i < g.nx; ++i)
    for (int k = 0; k < g.ny; ++k) {
      const std::size_t idx = static_cast<std::size_t>(i) * g.ny + k;
      out << format_double(i * g.spacing_x()) << ',' << format_double(k * g.spacing_y()) << ','
          << format_double(p1[idx].real()) << ',' << format_double(p2[idx].real()) << '\n';
    }
}

inline int run_decompose(const std::string& in, const std::optional<std::string>& out) {
  const GaugeState s = snapshot_read(in);
  const VectorField a = s.a();
  const HelmholtzParts h = helmholtz_decompose(a);
  const double na = l2_norm(a);
  nlohmann::json j = {{"a_l2", na},
                      {"df_l2", l2_norm(h.df)},
                      {"cf_l2", l2_norm(h.cf)},
                      {"completeness", l2_norm(a - (h.df + h.cf)) / std::max(na, 1e-300)},
                      {"div_df_l2", divergence(h.df).l2_norm()},
                      {"curl_cf_l2", curl(h.cf).l2_norm()},
                      {"stored_df_mismatch", l2_norm(h.df - s.a_df()) / std::max(na, 1e-300)}};
  if (out) {
    ensure_dir(*out);
    const std::filesystem::path dir(*out);
    write_vector_csv((dir / "a_df.csv").string(), h.df);
    write_vector_csv((dir / "a_cf.csv").string(), h.cf);
    j["files"] = {(dir / "a_df.csv").string(), (dir / "a_cf.csv").string()};
  }
  std::cout << j.dump() << "\n";
  return 0;
}

inline int run_check_identities(int n, int trials, std::uint64_t seed, double tol) {
  const GridSpec g = GridSpec::square(n);
  Rng rng(seed);
  const int kmax = g.cutoff_x();
  double null_max = 0.0, complete = 0.0, idem = 0.0, grad = 0.0, orth = 0.0, rhs_diff = 0.0;
  for (int t = 0; t < trials; ++t) {
    const SpectralField2D phi = random_band_limited(g, rng, kmax, false);
    const SpectralField2D psi = random_band_limited(g, rng, kmax, true, true);
    const VectorField adf{-1.0 * partial(psi, 2), partial(psi, 1)};
    null_max = std::max(null_max, verify_null_identities(phi, adf).max());

    const VectorField a{random_band_limited(g, rng, kmax, true), random_band_limited(g, rng, kmax, true)};
    const double na = l2_norm(a);
    const HelmholtzParts h = helmholtz_decompose(a);
    complete = std::max(complete, l2_norm(a - (h.df + h.cf)) / na);
    idem = std::max(idem, l2_norm(leray_project(h.df) - h.df) / na);
    const VectorField gf = gradient(random_band_limited(g, rng, kmax, true, true));
    grad = std::max(grad, l2_norm(leray_project(gf)) / l2_norm(gf));
    const double ip = std::abs(inner(h.df[0], h.cf[0]) + inner(h.df[1], h.cf[1]));
    orth = std::max(orth, ip / (na * na));

    if (t < 10) {  // RHS path agreement on smooth compatible data
      DataOptions opt;
      opt.kind = DataKind::smooth_gaussian;
      const GaugeState st = rough_data_generate({}, g, seed + t, opt).to_state();
      const auto pd = detail::nonlinear_part(detail::pack(st), st, RhsForm::direct);
      const auto pq = detail::nonlinear_part(detail::pack(st), st, RhsForm::nullform);
      double num = 0.0, den = 0.0;
      for (std::size_t c = 0; c < pd.size(); ++c) {
        num += std::pow((pd[c] - pq[c]).l2_norm(), 2);
        den += std::pow(pd[c].l2_norm(), 2);
      }
      rhs_diff = std::max(rhs_diff, std::sqrt(num / std::max(den, 1e-300)));
    }
  }
  const bool ok = null_max < tol && complete < 1e-12 && idem < 1e-12 && grad < 1e-12 && orth < 1e-12 && rhs_diff < tol;
  nlohmann::json j = {{"grid", n},          {"trials", trials},     {"null_identities_max", null_max},
                      {"completeness", complete}, {"idempotence", idem}, {"gradient_annihilation", grad},
                      {"orthogonality", orth},    {"rhs_paths", rhs_diff}, {"ok", ok}};
  std::cout << j.dump() << "\n";
  return ok ? 0 : 1;
}

inline int run_check_admissibility(double s, double r, double l, double eps_tilde) {
  const Verdict v = check_admissibility({s, r, l, eps_tilde});
  if (v.ok) {
    std::cout << "admissible\n";
    return 0;
  }
  std::cout << "inadmissible\n";
  for (const auto& name : v.violated) std::cout << "violated: " << name << "\n";
  return 1;
}

inline int run_fuzz(const Overrides& o, const std::optional<std::string>& target, const std::optional<int>& trials,
                    const std::optional<int>& nt) {
  RunConfig base;
  base.grid = GridSpec::square(32);
  RunConfig c = o.resolve(base);
  if (target) c = parse_config_text("fuzz_target = " + *target, c);
  if (trials) c.fuzz_trials = *trials;
  if (nt) c.fuzz_nt = *nt;
  FuzzConfig fc;
  fc.n = c.grid.nx;
  fc.nt = c.fuzz_nt;
  fc.trials = c.fuzz_trials;
  fc.eps = c.fuzz_eps;
  fc.seed = c.seed;
  fc.pairing = c.fuzz_pairing;
  const RatioReport r = bilinear_ratio_fuzz(c.fuzz_target, c.fuzz_exponents, fc);
  if (o.out) {
    ensure_dir(c.out_dir);
    const auto path = (std::filesystem::path(c.out_dir) / "fuzz.jsonl").string();
    std::ofstream out(path, std::ios::binary | std::ios::app);
    if (!out) throw Error("cannot write '" + path + "'");
    out << r.to_jsonl() << "\n";
  }
  std::cout << r.to_jsonl() << "\n";
  return 0;
}

/// Coefficients of u on a finer grid with the same period (zero padding).
inline SpectralField2D pad_to(const SpectralField2D& u, const GridSpec& fine) {
  const GridSpec& g = u.grid();
  SpectralField2D out(fine, u.is_real());
  for_each_mode(g, [&](std::size_t idx, int k1, int k2) {
    if (2 * std::abs(k1) == g.nx || 2 * std::abs(k2) == g.ny) return;
    out.coeffs()[fine.index(k1, k2)] = u.coeffs()[idx];
  });
  return out;
}

inline GaugeState pad_state(const GaugeState& s, const GridSpec& fine) {
  GaugeState o = s;
  o.phi_plus = pad_to(s.phi_plus, fine);
  o.phi_minus = pad_to(s.phi_minus, fine);
  for (int j = 0; j < 2; ++j) {
    o.a_df_plus[j] = pad_to(s.a_df_plus[j], fine);
    o.a_df_minus[j] = pad_to(s.a_df_minus[j], fine);
    o.a_cf[j] = pad_to(s.a_cf[j], fine);
  }
  return o;
}

inline double state_distance(const GaugeState& a, const GaugeState& b) {
  const auto pa = detail::pack(a), pb = detail::pack(b);
  double num = 0.0, den = 0.0;
  for (std::size_t c = 0; c < pa.size(); ++c) {
    num += std::pow((pa[c] - pb[c]).l2_norm(), 2);
    den += std::pow(pa[c].l2_norm(), 2);
  }
  return std::sqrt(num / std::max(den, 1e-300));
}

inline int run_convergence(const Overrides& o) {
  RunConfig base;
  base.data_kind = DataKind::smooth_gaussian;
  base.evolve.t_end = 0.5;
  base.evolve.dt = 1e-2;
  const RunConfig c = o.resolve(base);
  const GaugeState s0 = initial_state(c);
  const auto q0 = conserved_quantities(s0);

  std::vector<GaugeState> finals;
  double dt = c.evolve.dt;
  for (int lev = 0; lev < c.convergence_levels; ++lev, dt /= 2.0) {
    EvolveConfig e = c.evolve;
    e.dt = dt;
    e.diag_stride = 1 << 30;
    const EvolveResult r = evolve(s0, e, c.regularity);
    const auto q = conserved_quantities(r.final_state);
    nlohmann::json j = {{"kind", "dt"},
                        {"dt", dt},
                        {"energy_drift", std::abs(q.energy - q0.energy) / std::max(std::abs(q0.energy), 1e-300)},
                        {"charge_drift", std::abs(q.charge - q0.charge) / std::max(std::abs(q0.charge), 1e-300)},
                        {"gauss_relative", relative_gauss_residual(r.final_state)}};
    finals.push_back(r.final_state);
    if (lev >= 1) j["self_difference"] = state_distance(finals[lev - 1], finals[lev]);
    if (lev >= 2) {
      const double e1 = state_distance(finals[lev - 2], finals[lev - 1]);
      const double e2 = state_distance(finals[lev - 1], finals[lev]);
      j["observed_order"] = std::log2(e1 / e2);
    }
    std::cout << j.dump() << "\n";
  }

  // spatial: the same data on a grid twice as fine
  GridSpec fine = c.grid;
  fine.nx *= 2;
  fine.ny *= 2;
  EvolveConfig e = c.evolve;
  e.diag_stride = 1 << 30;
  const GaugeState coarse = evolve(s0, e, c.regularity).final_state;
  const GaugeState refined = evolve(pad_state(s0, fine), e, c.regularity).final_state;
  nlohmann::json j = {{"kind", "n"},
                      {"n", c.grid.nx},
                      {"n_fine", fine.nx},
                      {"difference", state_distance(pad_state(coarse, fine), refined)}};
  std::cout << j.dump() << "\n";
  return 0;
}

inline int run_norms(const std::string& in, const std::string& config) {
  const RunConfig c = config.empty() ? RunConfig{} : load_config(config);
  const GaugeState s = snapshot_read(in);
  const DiagnosticsRecord d = diagnose(s, c.regularity);
  nlohmann::json j;
  for (std::size_t i = 0; i < DiagnosticsRecord::columns.size(); ++i) j[DiagnosticsRecord::columns[i]] = d.values()[i];
  j["phi_t_hs_minus_1"] = sobolev_norm(s.phi_t(), c.regularity.s - 1.0);
  j["adf_t_hr_minus_1"] = std::hypot(sobolev_norm(s.a_df_t()[0], c.regularity.r - 1.0),
                                     sobolev_norm(s.a_df_t()[1], c.regularity.r - 1.0));
  j["gauss_relative"] = relative_gauss_residual(s);
  j["s"] = c.regularity.s;
  j["r"] = c.regularity.r;
  j["l"] = c.regularity.l;
  j["grid"] = s.grid().nx;
  std::cout << j.dump() << "\n";
  return 0;
}

}  // namespace cli

/// Parses argv and runs one subcommand; returns the process exit code.
inline int run_cli(int argc, char** argv) {
  CLI::App app{"Maxwell-Klein-Gordon on the 2-torus: solver and estimate lab"};
  app.require_subcommand(1);
  app.footer(config_keys_help());
  app.set_version_flag("--version", "mkg2d 1.0");

  cli::Overrides sim_o, fuzz_o, conv_o;
  auto* sim = app.add_subcommand("simulate", "evolve configured data, write diagnostics and snapshots");
  sim_o.add_to(sim, true);

  std::string dec_in;
  std::optional<std::string> dec_out;
  auto* dec = app.add_subcommand("decompose", "Helmholtz parts of the potential in a snapshot");
  dec->add_option("--in", dec_in, "snapshot file")->required();
  dec->add_option("--out", dec_out, "directory for a_df.csv and a_cf.csv");

  int id_n = 64, id_trials = 100;
  std::uint64_t id_seed = 1;
  double id_tol = 1e-10;
  auto* ids = app.add_subcommand("check-identities", "null-form identities and Helmholtz suite on random fields");
  ids->add_option("--grid", id_n, "grid points per axis");
  ids->add_option("--trials", id_trials, "random samples");
  ids->add_option("--seed", id_seed, "RNG seed");
  ids->add_option("--tol", id_tol, "relative tolerance");

  double ad_s = 0, ad_r = 0, ad_l = 0, ad_eps = 0.05;
  auto* adm = app.add_subcommand("check-admissibility", "test (s, r, l) against the well-posedness hypotheses");
  adm->add_option("s", ad_s)->required();
  adm->add_option("r", ad_r)->required();
  adm->add_option("l", ad_l)->required();
  adm->add_option("--eps-tilde", ad_eps, "curl-free weight exponent");

  std::optional<std::string> fz_target;
  std::optional<int> fz_trials, fz_nt;
  auto* fz = app.add_subcommand("fuzz", "bilinear ratio ensemble, one JSON line");
  fuzz_o.add_to(fz, false);
  fz->add_option("--target", fz_target, "product | nullform_q12 | triple_product");
  fz->add_option("--trials", fz_trials, "ensemble size");
  fz->add_option("--nt", fz_nt, "time samples");

  auto* conv = app.add_subcommand("convergence", "dt and grid refinement study");
  conv_o.add_to(conv, false);

  std::string nm_in, nm_config;
  auto* nm = app.add_subcommand("norms", "evaluate the tracked norms on a snapshot");
  nm->add_option("--in", nm_in, "snapshot file")->required();
  nm->add_option("--config", nm_config, "configuration supplying (s, r, l)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*sim) return cli::run_simulate(sim_o);
    if (*dec) return cli::run_decompose(dec_in, dec_out);
    if (*ids) return cli::run_check_identities(id_n, id_trials, id_seed, id_tol);
    if (*adm) return cli::run_check_admissibility(ad_s, ad_r, ad_l, ad_eps);
    if (*fz) return cli::run_fuzz(fuzz_o, fz_target, fz_trials, fz_nt);
    if (*conv) return cli::run_convergence(conv_o);
    if (*nm) return cli::run_norms(nm_in, nm_config);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 2;
}

}  // namespace mkg2d
