#include "cgl/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <ostream>

#include "cgl/diagnostics.hpp"
#include "cgl/error.hpp"
#include "cgl/ground_state.hpp"
#include "cgl/io.hpp"
#include "cgl/limits.hpp"
#include "cgl/selftest.hpp"
#include "cgl/semiflow.hpp"

namespace cgl {

namespace fs = std::filesystem;

namespace {

struct Run {
  Config cfg;
  std::string dir;
  RunManifest manifest;
  std::ostream& out;
  std::ostream& err;

  std::string path(const std::string& name) {
    manifest.outputs.push_back(name);
    return (fs::path(dir) / name).string();
  }
  void warn(const std::string& text) {
    err << "warning: " << text << "\n";
    manifest.warnings.push_back(text);
  }
};

std::string indexed(const std::string& stem, std::size_t i, const std::string& ext) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%03zu", i);
  return stem + buf + ext;
}

Field start_field(const Config& cfg, const GridSpec& grid) {
  Field f = initial_data(cfg.data, grid);
  if (cfg.perturbation_kind && cfg.perturbation_eps > 0.0) {
    DataDescriptor shape;
    shape.kind = *cfg.perturbation_kind;
    shape.sigma = cfg.perturbation_sigma;
    shape.center = cfg.perturbation_center;
    shape.modes = cfg.perturbation_modes;
    Field p = initial_data(shape, grid);
    p *= cfg.perturbation_eps / sobolev_norms(p).h1;
    f += p;
  }
  return f;
}

Trajectory run_evolve(Run& run) {
  const auto grid = grid_of(run.cfg);
  EvolveOptions opts;
  opts.snapshots = run.cfg.snapshots;
  opts.override_admissibility = run.cfg.override_admissibility;
  auto traj = evolve(start_field(run.cfg, grid), equation_of(run.cfg), run.cfg.T,
                     stepper_of(run.cfg), opts);
  for (const auto& w : traj.warnings) run.warn(w);
  write_diagnostics_csv(traj, run.path("diagnostics.csv"));
  for (std::size_t i = 0; i < traj.snapshots.size(); ++i) {
    const auto& s = traj.snapshots[i];
    write_snapshot(s.field, {run.cfg.theta, s.t, run.cfg.mu}, run.path(indexed("snapshot_", i, ".cglf")));
  }
  run.out << "records: " << traj.records.size() << ", dt = " << format_double(traj.dt)
          << ", status: " << to_string(traj.status) << "\n";
  if (traj.status != RunStatus::completed) run.err << "error: " << traj.message << "\n";
  return traj;
}

int cmd_simulate(Run& run) {
  const auto traj = run_evolve(run);
  return traj.status == RunStatus::completed ? kExitOk : kExitNumerical;
}

int cmd_check_identities(Run& run) {
  const auto traj = run_evolve(run);
  if (traj.status != RunStatus::completed) return kExitNumerical;
  const auto mass = mass_balance_residual(traj);
  const auto energy = energy_balance_residual(traj);

  std::string csv = "t_start,t_end,mass_residual,energy_residual\n";
  for (std::size_t i = 0; i < mass.values.size(); ++i)
    csv += format_double(traj.records[i].t) + "," + format_double(traj.records[i + 1].t) + "," +
           format_double(mass.values[i]) + "," + format_double(energy.values[i]) + "\n";
  write_text_file(run.path("residuals.csv"), csv);

  double consistency = 0.0;
  for (const auto& r : traj.records) {
    const auto c = record_consistency(r, traj.spec);
    consistency = std::max({consistency, c.energy, c.expansion});
  }
  const double tol = run.cfg.check_tolerance;
  const bool ok = mass.max_abs <= tol && energy.max_abs <= tol;
  run.out << "mass identity residual:   " << format_double(mass.max_abs) << "\n"
          << "energy identity residual: " << format_double(energy.max_abs) << "\n"
          << "record consistency:       " << format_double(consistency) << "\n"
          << "tolerance:                " << format_double(tol) << "\n"
          << (ok ? "PASS" : "FAIL") << "\n";
  return ok ? kExitOk : kExitTolerance;
}

int cmd_ground_state(Run& run) {
  const std::vector<GroundStateConstants> rows = {cached_ground_state_constants(3),
                                                  cached_ground_state_constants(4)};
  write_ground_state_csv(rows, run.path("ground_state.csv"));
  run.out << ground_state_csv(rows);
  return kExitOk;
}

int cmd_sweep(Run& run, SweepMode mode) {
  if (run.cfg.sweep_mode && *run.cfg.sweep_mode != mode)
    throw ConfigError("sweep.mode", 0,
                      "set to " + to_string(*run.cfg.sweep_mode) + " but the command runs a " +
                          to_string(mode) + " sweep");
  const auto target = mode == SweepMode::dispersion ? LimitTarget::heat : LimitTarget::schrodinger;
  const auto base = pair_config_of(run.cfg, target);
  const auto sweep = sweep_and_fit(base, run.cfg.sweep_thetas, mode, run.cfg.threads);

  for (std::size_t i = 0; i < sweep.members.size(); ++i) {
    const auto& m = sweep.members[i];
    for (const auto& w : m.warnings) run.warn("theta = " + format_double(m.config.theta) + ": " + w);
    write_pair_csv(m, run.path(indexed("member_", i, "_distance.csv")));
    write_diagnostics_csv(m.cgl, run.path(indexed("member_", i, "_cgl.csv")));
    write_diagnostics_csv(m.reference, run.path(indexed("member_", i, "_reference.csv")));
  }
  write_sweep_csv(sweep, run.path("sweep.csv"));
  write_fit_csv(sweep, run.path("fit.csv"));

  run.out << kSweepHeader << "\n";
  for (const auto& p : sweep.points)
    run.out << format_double(p.theta) << "," << format_double(p.gap) << ","
            << format_double(p.sup_h1) << "," << format_double(p.sup_l2) << "\n";
  run.out << "slope = " << format_double(sweep.fit.slope)
          << ", constant = " << format_double(sweep.fit.constant)
          << ", log residual = " << format_double(sweep.fit.residual) << "\n";
  const auto loo = leave_one_out_constants(sweep);
  const auto [lo, hi] = std::minmax_element(loo.begin(), loo.end());
  run.out << "leave-one-out constant spread = " << format_double(*hi / *lo) << "\n";
  return kExitOk;
}

int cmd_selftest(Run& run) {
  const auto results = run_selftest();
  std::string report;
  int failed = 0;
  for (const auto& r : results) {
    report += (r.passed ? "PASS " : "FAIL ") + r.name;
    if (!r.passed && !r.detail.empty()) report += " (" + r.detail + ")";
    report += "\n";
    if (!r.passed) ++failed;
  }
  report += std::to_string(results.size() - failed) + "/" + std::to_string(results.size()) +
            " passed\n";
  run.out << report;
  write_text_file(run.path("selftest.txt"), report);
  return failed == 0 ? kExitOk : kExitTolerance;
}

int dispatch(Run& run, const std::string& command) {
  if (command == "simulate") return cmd_simulate(run);
  if (command == "check-identities") return cmd_check_identities(run);
  if (command == "ground-state") return cmd_ground_state(run);
  if (command == "sweep-theta") return cmd_sweep(run, SweepMode::dispersion);
  if (command == "sweep-inviscid") return cmd_sweep(run, SweepMode::inviscid);
  if (command == "selftest") return cmd_selftest(run);
  throw InvalidArgument("unknown command '" + command + "'");
}

const char* status_name(int code) {
  switch (code) {
    case kExitOk: return "ok";
    case kExitUsage: return "usage error";
    case kExitNumerical: return "numerical failure";
    case kExitTolerance: return "tolerance failure";
  }
  return "unknown";
}

}  // namespace

int run_command(const CommandRequest& request, std::ostream& out, std::ostream& err) {
  const auto start = std::chrono::steady_clock::now();
  Config cfg;
  try {
    if (std::find(command_names().begin(), command_names().end(), request.command) ==
        command_names().end())
      throw InvalidArgument("unknown command '" + request.command + "'");
    if (request.config_text)
      cfg = parse_config(*request.config_text);
    else if (request.config_path)
      cfg = load_config(*request.config_path);
    else if (request.command != "ground-state" && request.command != "selftest")
      throw InvalidArgument(request.command + " needs --config");
    if (request.output_dir) cfg.output_dir = *request.output_dir;
    if (request.threads) {
      if (*request.threads < 1) throw InvalidArgument("--threads must be >= 1");
      cfg.threads = *request.threads;
    }
    fs::create_directories(cfg.output_dir);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  Run run{cfg, cfg.output_dir, {}, out, err};
  run.manifest.command = request.command;
  run.manifest.config = format_config(cfg);
  run.manifest.version = CGL_VERSION;
  run.manifest.threads = cfg.threads;

  int code = kExitOk;
  try {
    code = dispatch(run, request.command);
  } catch (const NumericalFailure& e) {
    err << "error: " << e.what() << "\n";
    code = kExitNumerical;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    code = kExitUsage;
  }

  run.manifest.status = status_name(code);
  run.manifest.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  try {
    write_manifest(run.manifest, (fs::path(run.dir) / "manifest.json").string());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    if (code == kExitOk) code = kExitUsage;
  }
  return code;
}

int rerun_manifest(const std::string& manifest_path, std::optional<std::string> output_dir,
                   std::ostream& out, std::ostream& err) {
  RunManifest manifest;
  try {
    manifest = read_manifest(manifest_path);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  CommandRequest request;
  request.command = manifest.command;
  request.config_text = manifest.config;
  request.output_dir = output_dir ? *output_dir
                                  : (fs::path(manifest_path).parent_path() / "rerun").string();
  return run_command(request, out, err);
}

}  // namespace cgl
