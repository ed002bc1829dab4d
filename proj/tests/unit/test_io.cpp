#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "mkg2d/cli.hpp"
#include "support.hpp"

using namespace mkg2d;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  fs::path p = fs::temp_directory_path() / ("mkg2d_io_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run(std::vector<std::string> args) {
  args.insert(args.begin(), "mkg2d");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  ::testing::internal::CaptureStdout();
  ::testing::internal::CaptureStderr();
  const int code = run_cli(static_cast<int>(argv.size()), argv.data());
  ::testing::internal::GetCapturedStdout();
  ::testing::internal::GetCapturedStderr();
  return code;
}

GaugeState random_state(int n, std::uint64_t seed) {
  DataOptions o;
  o.kind = DataKind::smooth_gaussian;
  GaugeState s = rough_data_generate({}, GridSpec::square(n), seed, o).to_state(0.7, 0.04);
  s.t = 0.125;
  return s;
}

}  // namespace

TEST(Config, ParsesKeysAndComments) {
  const RunConfig c = parse_config_text(
      "# comment\n"
      "n = 48   # trailing\n"
      "s = 0.6\nr=0.3\n l = 0.6 \n"
      "rhs = nullform\nintegrator = strang\n"
      "data_kind = smooth_gaussian\nseed = 18446744073709551615\n"
      "fuzz_exponents = 0 0.5 0.5 0 0.51 0.51\n"
      "override_admissibility = yes\n\n");
  EXPECT_EQ(c.grid.nx, 48);
  EXPECT_EQ(c.grid.ny, 48);
  EXPECT_DOUBLE_EQ(c.regularity.r, 0.3);
  EXPECT_EQ(c.evolve.rhs_form, RhsForm::nullform);
  EXPECT_EQ(c.evolve.integrator, Integrator::strang);
  EXPECT_EQ(c.data_kind, DataKind::smooth_gaussian);
  EXPECT_EQ(c.seed, 18446744073709551615ULL);
  EXPECT_DOUBLE_EQ(c.fuzz_exponents.b2, 0.51);
  EXPECT_TRUE(c.data_options().override_admissibility);
}

TEST(Config, Errors) {
  EXPECT_THROW(parse_config_text("bogus = 1"), ConfigError);
  EXPECT_THROW(parse_config_text("n 64"), ConfigError);
  EXPECT_THROW(parse_config_text("dt = fast"), ConfigError);
  EXPECT_THROW(parse_config_text("rhs = sideways"), ConfigError);
  EXPECT_THROW(parse_config_text("n = 63").validate(), ConfigError);
  EXPECT_THROW(load_config("/nonexistent/mkg2d.cfg"), ConfigError);
  const std::string help = config_keys_help();
  for (const auto& k : config_keys()) EXPECT_NE(help.find(k.name), std::string::npos) << k.name;
}

TEST(RoughData, RefusesInadmissibleUnlessOverridden) {
  const GridSpec g = GridSpec::square(32);
  try {
    rough_data_generate({0.5, 0.5, 0.5}, g, 1);
    FAIL() << "no refusal";
  } catch (const AdmissibilityError& e) {
    EXPECT_NE(std::string(e.what()).find("s > 1/2 + l/8"), std::string::npos);
  }
  DataOptions o;
  o.override_admissibility = true;
  EXPECT_NO_THROW(rough_data_generate({0.5, 0.5, 0.5}, g, 1, o));
}

TEST(RoughData, DeterministicAndStructured) {
  const GridSpec g = GridSpec::square(64);
  const RegularityTriple reg{1.0, 1.0, 1.0};
  const InitialData a = rough_data_generate(reg, g, 9);
  const InitialData b = rough_data_generate(reg, g, 9);
  EXPECT_EQ(a.phi0, b.phi0);
  EXPECT_EQ(a.a_df, b.a_df);
  EXPECT_EQ(a.a_cf_t, b.a_cf_t);
  EXPECT_NE(a.phi0, rough_data_generate(reg, g, 10).phi0);

  EXPECT_LT(divergence(a.a_df).l2_norm(), 1e-12 * h_norm(a.a_df, 1.0));
  EXPECT_LT(curl(a.a_cf).l2_norm(), 1e-12 * h_norm(a.a_cf, 1.0));
  for (const auto* f : {&a.a_df[0], &a.a_df[1], &a.a_cf[0], &a.a_cf[1]}) EXPECT_LT(f->hermitian_defect(), 1e-15);
  EXPECT_NEAR(spectral_slope(a.phi0), -(reg.s + 1.01), 1e-9);
  EXPECT_NEAR(spectral_slope(a.phi1), -(reg.s - 1.0 + 1.01), 1e-9);
  EXPECT_LT(relative_gauss_residual(a.to_state()), 1e-10);
  for (const auto* f : {&a.phi0, &a.phi1}) EXPECT_TRUE(f->all_finite());
}

TEST(RoughData, SmoothVariantScaled) {
  DataOptions o;
  o.kind = DataKind::smooth_gaussian;
  o.amplitude = 0.8;
  const InitialData d = rough_data_generate({}, GridSpec::square(32), 3, o);
  EXPECT_NEAR(d.phi0.l2_norm(), 0.8, 1e-14);
  EXPECT_NEAR(l2_norm(d.a_df_t), 0.8, 1e-14);
  EXPECT_LT(relative_gauss_residual(d.to_state()), 1e-10);
}

TEST(Snapshot, BitwiseRoundtrip) {
  const fs::path dir = scratch_dir("roundtrip");
  for (std::uint64_t seed : {1, 2, 3}) {
    const GaugeState s = random_state(16 * static_cast<int>(seed), seed);
    const auto path = (dir / "s.mkg2").string();
    snapshot_write(s, path);
    const GaugeState r = snapshot_read(path);
    EXPECT_TRUE(r == s);
    EXPECT_EQ(snapshot_encode(r), snapshot_encode(s));
  }
}

TEST(Snapshot, DistinctCorruptionErrors) {
  const auto good = snapshot_encode(random_state(16, 4));
  auto bad = good;
  bad[0] = 'X';
  EXPECT_THROW(snapshot_decode(bad), MagicMismatchError);
  bad = good;
  bad[4] = 2;
  EXPECT_THROW(snapshot_decode(bad), VersionMismatchError);
  bad = good;
  bad.resize(bad.size() - 100);
  EXPECT_THROW(snapshot_decode(bad), TruncatedFileError);
  bad = good;
  bad[bad.size() / 2] ^= 0x10;
  EXPECT_THROW(snapshot_decode(bad), ChecksumError);
  bad = good;
  bad[bad.size() - 1] ^= 0x01;
  EXPECT_THROW(snapshot_decode(bad), ChecksumError);
  EXPECT_THROW(snapshot_decode({}), MagicMismatchError);
}

TEST(Snapshot, ShapeMismatchIsExplicit) {
  const auto bytes = snapshot_encode(random_state(64, 5));
  EXPECT_THROW(snapshot_decode(bytes, GridSpec::square(128)), ShapeError);
  EXPECT_NO_THROW(snapshot_decode(bytes, GridSpec::square(64)));
}

TEST(Snapshot, LittleEndianHeader) {
  const auto b = snapshot_encode(random_state(16, 6));
  EXPECT_EQ(std::string(b.begin(), b.begin() + 4), "MKG2");
  EXPECT_EQ(b[4], 1);
  EXPECT_EQ(b[5], 0);
  EXPECT_EQ(b[6], 16);  // nx
  EXPECT_EQ(b[46], 'P');
}

TEST(Diagnostics, CsvSchemaRoundtrip) {
  EXPECT_EQ(csv_header(), "t,gauss_residual_l2,gauss_mean_mode,energy,charge,phi_hs,adf_hr,acf_weighted");
  const DiagnosticsRecord r{0.1, 1e-17, -0.25, 3.0000000000000004, 1.0 / 3.0, 2.0, 5e-300, 7.0};
  const DiagnosticsRecord p = parse_csv_row(csv_row(r));
  EXPECT_EQ(p.values(), r.values());
  EXPECT_THROW(parse_csv_row("1,2,3"), ConfigError);
  EXPECT_THROW(parse_csv_row("1,2,3,4,5,6,7,x"), ConfigError);
}

TEST(Cli, AdmissibilityExitCodes) {
  EXPECT_EQ(run({"check-admissibility", "1", "1", "1"}), 0);
  EXPECT_EQ(run({"check-admissibility", "0.5", "0.5", "0.5"}), 1);
}

TEST(Cli, AdmissibilityListsViolation) {
  std::vector<std::string> args{"mkg2d", "check-admissibility", "0.5", "0.5", "0.5"};
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  ::testing::internal::CaptureStdout();
  run_cli(static_cast<int>(argv.size()), argv.data());
  const std::string out = ::testing::internal::GetCapturedStdout();
  EXPECT_NE(out.find("s > 1/2 + l/8"), std::string::npos);
}

TEST(Cli, ConfigAndUsageErrors) {
  EXPECT_EQ(run({"simulate", "--config", "/nonexistent/run.cfg"}), 2);
  EXPECT_EQ(run({"simulate"}), 2);
  EXPECT_EQ(run({"simulate", "--config", "x", "--no-such-flag"}), 2);
  EXPECT_EQ(run({"no-such-command"}), 2);
}

TEST(Cli, SimulateDeterministicAndReadable) {
  const fs::path dir = scratch_dir("simulate");
  const fs::path cfg = dir / "run.cfg";
  std::ofstream(cfg) << "n = 32\ndata_kind = smooth_gaussian\nseed = 5\ndt = 0.01\nt_end = 0.1\ndiag_stride = 2\n"
                        "snapshot_stride = 5\n";
  ASSERT_EQ(run({"simulate", "--config", cfg.string(), "--out", (dir / "a").string()}), 0);
  ASSERT_EQ(run({"simulate", "--config", cfg.string(), "--out", (dir / "b").string()}), 0);
  const std::string a = read_file(dir / "a" / "diagnostics.csv");
  EXPECT_EQ(a, read_file(dir / "b" / "diagnostics.csv"));
  EXPECT_EQ(read_file(dir / "a" / "final.mkg2"), read_file(dir / "b" / "final.mkg2"));
  EXPECT_TRUE(fs::exists(dir / "a" / "snapshot_000005.mkg2"));

  std::istringstream in(a);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, csv_header());
  int rows = 0;
  while (std::getline(in, line)) {
    EXPECT_TRUE(parse_csv_row(line).all_finite());
    ++rows;
  }
  EXPECT_EQ(rows, 6);

  const GaugeState fin = snapshot_read((dir / "a" / "final.mkg2").string());
  EXPECT_NEAR(fin.t, 0.1, 1e-15);
  EXPECT_EQ(run({"norms", "--in", (dir / "a" / "final.mkg2").string()}), 0);
  EXPECT_EQ(run({"decompose", "--in", (dir / "a" / "final.mkg2").string(), "--out", (dir / "dec").string()}), 0);
  EXPECT_TRUE(fs::exists(dir / "dec" / "a_df.csv"));

  // a different seed changes the output
  ASSERT_EQ(run({"simulate", "--config", cfg.string(), "--seed", "6", "--out", (dir / "c").string()}), 0);
  EXPECT_NE(a, read_file(dir / "c" / "diagnostics.csv"));
}

TEST(Cli, SimulateRefusesInadmissibleConfig) {
  const fs::path dir = scratch_dir("refuse");
  const fs::path cfg = dir / "run.cfg";
  std::ofstream(cfg) << "n = 16\ns = 0.5\nr = 0.5\nl = 0.5\ndt = 0.01\nt_end = 0.02\n";
  EXPECT_EQ(run({"simulate", "--config", cfg.string(), "--out", (dir / "o").string()}), 2);
  EXPECT_EQ(run({"simulate", "--config", cfg.string(), "--out", (dir / "o").string(), "--override-admissibility"}), 0);
}

TEST(Cli, IdentitiesAndFuzz) {
  EXPECT_EQ(run({"check-identities", "--grid", "32", "--trials", "5"}), 0);
  const fs::path dir = scratch_dir("fuzz");
  EXPECT_EQ(run({"fuzz", "--grid", "16", "--nt", "16", "--trials", "4", "--out", dir.string()}), 0);
  const std::string line = read_file(dir / "fuzz.jsonl");
  EXPECT_EQ(nlohmann::json::parse(line)["target"], "product");
}
