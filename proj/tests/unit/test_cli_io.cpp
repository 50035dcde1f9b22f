#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <sys/wait.h>

#include "cgl/commands.hpp"
#include "cgl/config.hpp"
#include "cgl/error.hpp"
#include "cgl/io.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace cgl;
namespace fs = std::filesystem;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int quiet_run(const CommandRequest& req) {
  std::ostringstream out, err;
  return run_command(req, out, err);
}

int shell(const std::string& cmd) {
  const int status = std::system((cmd + " > /dev/null 2>&1").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

const char* kSmallRun =
    "d = 1\nn = 32\nL = 20\ntheta = 0.3\nmu = 1\nT = 0.2\ndt = 0.01\nsample_stride = 2\n"
    "data.sigma = 1.2\nsnapshots.enabled = true\n";

}  // namespace

TEST_CASE("configuration examples") {
  const auto cfg = parse_config("d = 4\nn = 16\nL = 40\ntheta = 0.2\nmu = -1");
  CHECK(cfg.d == 4);
  CHECK(cfg.mu == -1);
  CHECK(cfg.T == 1.0);
  CHECK(cfg.dt == 0.0);
  CHECK_FALSE(cfg.dealias.has_value());

  try {
    parse_config("d = 7");
    FAIL("accepted d = 7");
  } catch (const ConfigError& e) {
    CHECK(e.key() == "d");
    CHECK(e.line() == 1);
    CHECK(std::string(e.what()).find("1..4") != std::string::npos);
  }
  try {
    parse_config("# header\n\nthetaa = 0.2");
    FAIL("accepted a misspelled key");
  } catch (const ConfigError& e) {
    CHECK(e.key() == "thetaa");
    CHECK(e.line() == 3);
  }
}

TEST_CASE("configuration errors") {
  CHECK_THROWS_AS(parse_config("n = sixteen"), ConfigError);
  CHECK_THROWS_AS(parse_config("n = 12"), ConfigError);
  CHECK_THROWS_AS(parse_config("theta = 0.1\ntheta = 0.2"), ConfigError);
  CHECK_THROWS_AS(parse_config("mu = 0"), ConfigError);
  CHECK_THROWS_AS(parse_config("nonlinear = maybe"), ConfigError);
  CHECK_THROWS_AS(parse_config("dealias_factor = 4"), ConfigError);
  CHECK_THROWS_AS(parse_config("theta 0.2"), ConfigError);
  CHECK_THROWS_AS(parse_config("d = 2\ndata.c = 1, 2, 3"), ConfigError);
  CHECK_THROWS_AS(parse_config("data.kind = modulated_gaussian"), ConfigError);
  CHECK_THROWS_AS(parse_config("T = 0"), ConfigError);
  CHECK_THROWS_AS(parse_config("L = inf"), ConfigError);
}

TEST_CASE("configuration values and comments") {
  const auto cfg = parse_config(
      "d = 2   # two dimensions\n"
      "  theta=0.25\n"
      "dealias_factor = 3/2\n"
      "data.kind = modulated_gaussian\n"
      "data.m = 1, -2\n"
      "data.c = 3.5, 4\n"
      "perturbation.kind = gaussian\n"
      "perturbation.eps = 0.01\n"
      "sweep.thetas = 0.4, 0.2, 0.1\n"
      "sweep.mode = dispersion\n"
      "snapshots.enabled = yes\n"
      "threads = 3\n");
  CHECK(cfg.d == 2);
  CHECK(cfg.theta == 0.25);
  CHECK(cfg.dealias == DealiasFactor::three_halves);
  CHECK(cfg.data.modes == std::vector<int>{1, -2});
  CHECK(cfg.data.center == std::vector<double>{3.5, 4.0});
  CHECK(cfg.perturbation_kind == DataKind::gaussian);
  CHECK(cfg.sweep_thetas.size() == 3);
  CHECK(cfg.snapshots);
  CHECK(cfg.threads == 3);

  const auto pair = pair_config_of(cfg, LimitTarget::heat);
  REQUIRE(pair.perturbation.has_value());
  CHECK(pair.perturbation->size == 0.01);
  CHECK(pair.stepper.sample_stride == 5);
  CHECK(stepper_of(cfg).sample_stride == 10);
}

TEST_CASE("configuration echo round trips exactly") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    Config cfg;
    cfg.d = 1 + trial % 4;
    cfg.theta = (u(rng) - 0.5) * 3.0;
    cfg.L = 1 + 100 * u(rng);
    cfg.T = u(rng) + 1e-3;
    cfg.dt = trial % 2 ? 0.0 : u(rng) * 1e-2;
    cfg.dealias = trial % 3 ? std::optional(DealiasFactor::three) : std::nullopt;
    cfg.sample_stride = trial % 2 ? std::optional(trial + 1) : std::nullopt;
    cfg.data.amplitude = u(rng);
    cfg.data.center = std::vector<double>(cfg.d, 10 * u(rng));
    cfg.sweep_thetas = {u(rng), u(rng), u(rng)};
    cfg.perturbation_kind = trial % 2 ? std::optional(DataKind::gaussian) : std::nullopt;
    cfg.perturbation_eps = u(rng);
    cfg.output_dir = "out/run" + std::to_string(trial);
    const auto text = format_config(cfg);
    const auto back = parse_config(text);
    CHECK(format_config(back) == text);
    CHECK(back.theta == cfg.theta);
    CHECK(back.sweep_thetas == cfg.sweep_thetas);
    CHECK(back.data.center == cfg.data.center);
  }
  // Every key appears in the echo.
  const auto echo = format_config(Config{});
  for (const auto& key : config_keys()) CHECK(echo.find(key + " = ") != std::string::npos);
}

TEST_CASE("diagnostics CSV") {
  test::TempDir dir;
  write_diagnostics_csv(Trajectory{}, dir.file("empty.csv"));
  CHECK(slurp(dir.file("empty.csv")) == std::string(kDiagnosticsHeader) + "\n");

  Trajectory one;
  one.records.resize(1);
  write_diagnostics_csv(one, dir.file("zero.csv"));
  CHECK(slurp(dir.file("zero.csv")) == std::string(kDiagnosticsHeader) + "\n0,0,0,0,0,0,0,0,0,0,0\n");

  std::mt19937_64 rng(3);
  std::normal_distribution<double> n(0.0, 1e3);
  Trajectory traj;
  for (int i = 0; i < 50; ++i)
    traj.records.push_back({n(rng), n(rng), n(rng), n(rng), n(rng), n(rng) * 1e-300, n(rng),
                            n(rng), n(rng), n(rng) * 1e200, n(rng)});
  write_diagnostics_csv(traj, dir.file("rand.csv"));
  CHECK(read_diagnostics_csv(dir.file("rand.csv")) == traj.records);
  CHECK(slurp(dir.file("rand.csv")).find('\r') == std::string::npos);

  write_text_file(dir.file("bad.csv"), "t,mass\n1,2\n");
  CHECK_THROWS_AS(read_diagnostics_csv(dir.file("bad.csv")), IoError);
  CHECK_THROWS_AS(read_diagnostics_csv(dir.file("missing.csv")), IoError);
  CHECK_THROWS_AS(write_diagnostics_csv(traj, (dir.path() / "no" / "such" / "x.csv").string()),
                  IoError);
}

TEST_CASE("sweep CSV round trip") {
  test::TempDir dir;
  const auto sweep =
      fit_sweep(SweepMode::inviscid, {{1.1, 0.4, 0.9, 0.5}, {1.3, 0.2, 0.45, 0.2}, {1.5, 0.07, 0.16, 0.1}});
  write_sweep_csv(sweep, dir.file("sweep.csv"));
  const auto back = read_sweep_csv(dir.file("sweep.csv"));
  REQUIRE(back.size() == 3);
  CHECK(back[1].sup_h1 == 0.45);
  CHECK(slurp(dir.file("sweep.csv")).rfind(std::string(kSweepHeader) + "\n", 0) == 0);
  write_fit_csv(sweep, dir.file("fit.csv"));
  CHECK(slurp(dir.file("fit.csv")).rfind("mode,slope,constant,residual\ninviscid,", 0) == 0);
}

TEST_CASE("snapshot layout and round trip") {
  test::TempDir dir;
  for (int d = 1; d <= 4; ++d) {
    const auto grid = make_grid(d, 8, 1.5 * d);
    const auto f = test::random_field(grid, 90 + d);
    const SnapshotMeta meta{0.3 * d, 0.125, d % 2 ? -1 : 1};
    const auto path = dir.file("s" + std::to_string(d) + ".cglf");
    write_snapshot(f, meta, path);
    CHECK(fs::file_size(path) == kSnapshotHeaderBytes + 16 * grid.size());
    const auto back = read_snapshot(path);
    CHECK(back.meta == meta);
    CHECK(back.field.grid() == grid);
    CHECK(std::memcmp(back.field.values().data(), f.values().data(), 16 * f.size()) == 0);
  }

  const auto raw = slurp(dir.file("s2.cglf"));
  CHECK(raw.substr(0, 4) == "CGLF");
  CHECK(raw[4] == 1);
  CHECK(raw[8] == 2);
  CHECK(raw[12] == 8);
  CHECK(static_cast<signed char>(raw[40]) == 1);

  write_text_file(dir.file("magic.cglf"), "XXXX" + raw.substr(4));
  CHECK_THROWS_WITH_AS(read_snapshot(dir.file("magic.cglf")), doctest::Contains("magic"), IoError);
  auto wrong_version = raw;
  wrong_version[4] = 2;
  write_text_file(dir.file("version.cglf"), wrong_version);
  CHECK_THROWS_WITH_AS(read_snapshot(dir.file("version.cglf")), doctest::Contains("version"), IoError);
  write_text_file(dir.file("short.cglf"), raw.substr(0, raw.size() - 3));
  CHECK_THROWS_WITH_AS(read_snapshot(dir.file("short.cglf")), doctest::Contains("truncated"), IoError);
  write_text_file(dir.file("header.cglf"), raw.substr(0, 20));
  CHECK_THROWS_AS(read_snapshot(dir.file("header.cglf")), IoError);
}

TEST_CASE("manifest round trip") {
  test::TempDir dir;
  RunManifest m;
  m.command = "simulate";
  m.config = format_config(Config{});
  m.version = "1.2.3";
  m.threads = 4;
  m.wall_seconds = 1.5;
  m.outputs = {"diagnostics.csv"};
  m.status = "ok";
  write_manifest(m, dir.file("manifest.json"));
  const auto back = read_manifest(dir.file("manifest.json"));
  CHECK(back.command == m.command);
  CHECK(back.config == m.config);
  CHECK(back.threads == 4);
  CHECK(back.outputs == m.outputs);
  write_text_file(dir.file("broken.json"), "{");
  CHECK_THROWS_AS(read_manifest(dir.file("broken.json")), IoError);
}

TEST_CASE("commands write their outputs and manifest") {
  test::TempDir dir;
  write_text_file(dir.file("run.cfg"), kSmallRun);
  CommandRequest req{"simulate", dir.file("run.cfg"), std::nullopt, dir.file("out"), std::nullopt};
  REQUIRE(quiet_run(req) == kExitOk);

  const auto manifest = read_manifest(dir.file("out/manifest.json"));
  CHECK(manifest.command == "simulate");
  CHECK(manifest.status == "ok");
  CHECK(manifest.outputs.size() == 12);  // diagnostics plus 11 snapshots
  for (const auto& name : manifest.outputs) CHECK(fs::exists(dir.path() / "out" / name));
  CHECK(read_diagnostics_csv(dir.file("out/diagnostics.csv")).size() == 11);
  CHECK(read_snapshot(dir.file("out/snapshot_010.cglf")).meta.t == doctest::Approx(0.2));

  std::ostringstream out, err;
  REQUIRE(rerun_manifest(dir.file("out/manifest.json"), std::nullopt, out, err) == kExitOk);
  for (const auto& name : manifest.outputs)
    CHECK(files_identical(dir.file("out/" + name), dir.file("out/rerun/" + name)));
}

TEST_CASE("command exit codes") {
  test::TempDir dir;
  write_text_file(dir.file("bad.cfg"), "d = 9\n");
  CHECK(quiet_run({"simulate", dir.file("bad.cfg"), std::nullopt, dir.file("o1"), std::nullopt}) ==
        kExitUsage);
  CHECK(quiet_run({"simulate", std::nullopt, std::nullopt, dir.file("o2"), std::nullopt}) ==
        kExitUsage);
  CHECK(quiet_run({"explode", std::nullopt, std::nullopt, dir.file("o3"), std::nullopt}) ==
        kExitUsage);

  std::string strict = std::string(kSmallRun) + "check.tolerance = 1e-30\n";
  write_text_file(dir.file("strict.cfg"), strict);
  CHECK(quiet_run({"check-identities", dir.file("strict.cfg"), std::nullopt, dir.file("o4"),
                   std::nullopt}) == kExitTolerance);
  CHECK(fs::exists(dir.file("o4/manifest.json")));
  CHECK(read_manifest(dir.file("o4/manifest.json")).status == "tolerance failure");

  std::string loose = std::string(kSmallRun) + "check.tolerance = 1\n";
  write_text_file(dir.file("loose.cfg"), loose);
  CHECK(quiet_run({"check-identities", dir.file("loose.cfg"), std::nullopt, dir.file("o5"),
                   std::nullopt}) == kExitOk);

  write_text_file(dir.file("super.cfg"),
                  "d = 4\nn = 16\nL = 40\ntheta = 0.5\nmu = -1\nT = 0.1\ndt = 0.01\n"
                  "data.a = 2\ndata.sigma = 2.5\noverride_admissibility = true\n");
  CHECK(quiet_run({"simulate", dir.file("super.cfg"), std::nullopt, dir.file("o6"), std::nullopt}) ==
        kExitNumerical);
  write_text_file(dir.file("gated.cfg"),
                  "d = 4\nn = 16\nL = 40\ntheta = 0.5\nmu = -1\nT = 0.1\ndt = 0.01\n"
                  "data.a = 2\ndata.sigma = 2.5\n");
  CHECK(quiet_run({"simulate", dir.file("gated.cfg"), std::nullopt, dir.file("o7"), std::nullopt}) ==
        kExitUsage);

  write_text_file(dir.file("sweep.cfg"), std::string(kSmallRun) + "sweep.mode = inviscid\n");
  CHECK(quiet_run({"sweep-theta", dir.file("sweep.cfg"), std::nullopt, dir.file("o8"), std::nullopt}) ==
        kExitUsage);

  CHECK(quiet_run({"ground-state", std::nullopt, std::nullopt, dir.file("o9"), std::nullopt}) == kExitOk);
  CHECK(slurp(dir.file("o9/ground_state.csv")).rfind("d,kinetic,potential,energy", 0) == 0);
}

TEST_CASE("command-line front end") {
  const std::string cli = CGL_CLI_PATH;
  test::TempDir dir;
  CHECK(shell(cli + " --version") == 0);
  CHECK(shell(cli + " frobnicate") == kExitUsage);
  CHECK(shell(cli + " simulate --config " + dir.file("missing.cfg")) == kExitUsage);
  CHECK(shell(cli + " selftest -o " + dir.file("st")) == kExitOk);
  CHECK(fs::exists(dir.file("st/manifest.json")));
}

TEST_CASE("shipped configurations parse") {
  int count = 0;
  for (const auto& entry : fs::directory_iterator(CGL_CONFIG_DIR)) {
    if (entry.path().extension() != ".cfg") continue;
    CAPTURE(entry.path().string());
    CHECK_NOTHROW(load_config(entry.path().string()));
    ++count;
  }
  CHECK(count >= 4);
}
