#include "cgl/selftest.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>

#include "cgl/config.hpp"
#include "cgl/diagnostics.hpp"
#include "cgl/error.hpp"
#include "cgl/ground_state.hpp"
#include "cgl/io.hpp"
#include "cgl/limits.hpp"
#include "cgl/semiflow.hpp"

namespace cgl {

namespace {

namespace fs = std::filesystem;
constexpr double kPi = std::numbers::pi;

/// Case body: returns an empty string on success, a failure description otherwise.
using Check = std::function<std::string()>;

std::string close(double got, double want, double tol, const std::string& what) {
  if (std::abs(got - want) <= tol * std::max(1.0, std::abs(want))) return {};
  std::ostringstream msg;
  msg.precision(17);
  msg << what << ": got " << got << ", want " << want;
  return msg.str();
}

template <class E>
std::string throws(const std::function<void()>& fn, const std::string& needle = {}) {
  try {
    fn();
  } catch (const E& e) {
    if (needle.empty() || std::string(e.what()).find(needle) != std::string::npos) return {};
    return std::string("message lacks '") + needle + "': " + e.what();
  } catch (const std::exception& e) {
    return std::string("wrong exception: ") + e.what();
  }
  return "no exception";
}

Field constant_field(const GridSpec& grid, Complex a) {
  return Field(grid, std::vector<Complex>(grid.size(), a));
}

Field plane_wave(const GridSpec& grid, std::array<int, 4> m, Complex a) {
  std::vector<Complex> v(grid.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    const auto x = coordinates(grid, i);
    double phase = 0.0;
    for (int ax = 0; ax < grid.d; ++ax) phase += 2 * kPi * m[ax] * x[ax] / grid.L;
    v[i] = a * std::polar(1.0, phase);
  }
  return Field(grid, std::move(v));
}

std::size_t flat_index(const GridSpec& grid, std::array<int, 4> m) {
  std::size_t flat = 0;
  for (int ax = 0; ax < grid.d; ++ax) flat = flat * grid.n + ((m[ax] + grid.n) % grid.n);
  return flat;
}

/// Largest |c_j| over all j other than `keep`.
double off_mode_max(const SpectralField& g, std::size_t keep) {
  double worst = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i)
    if (i != keep) worst = std::max(worst, std::abs(g[i]));
  return worst;
}

std::string all_zero(const DiagnosticRecord& r) {
  const double v[] = {r.mass, r.kinetic, r.potential, r.energy, r.hi_potential,
                      r.lap,  r.cross,   r.grad_flow_sq, r.h2, r.h3};
  for (double x : v)
    if (x != 0.0) return "record has a nonzero entry";
  return {};
}

fs::path scratch_dir() {
  const auto stamp = std::chrono::steady_clock::now().time_since_epoch().count();
  auto dir = fs::temp_directory_path() / ("cgl-selftest-" + std::to_string(stamp));
  fs::create_directories(dir);
  return dir;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Trajectory smoke_run(double theta, double T) {
  const auto grid = make_grid(2, 32, 20.0);
  DataDescriptor data;
  data.sigma = 1.2;
  EquationSpec spec{theta, 1, 2, 3, true};
  StepperConfig cfg;
  cfg.dt = 0.01;
  cfg.sample_stride = 2;
  return evolve(initial_data(data, grid), spec, T, cfg);
}

std::vector<std::pair<std::string, Check>> cases() {
  std::vector<std::pair<std::string, Check>> c;

  c.emplace_back("grid (1, 8, 2pi) has dx = 2pi/8", [] {
    return close(make_grid(1, 8, 2 * kPi).dx(), 2 * kPi / 8, 1e-15, "dx");
  });
  c.emplace_back("grid (3, 32, 40) has 32768 points", [] {
    return make_grid(3, 32, 40).size() == 32768 ? "" : "wrong size";
  });
  c.emplace_back("grid (5, 8, 1) is rejected", [] {
    return throws<InvalidArgument>([] { make_grid(5, 8, 1); });
  });

  c.emplace_back("constant field has only the zero mode", [] {
    const auto grid = make_grid(3, 8, 5.0);
    const auto g = to_spectral(constant_field(grid, {1.5, -0.5}));
    if (off_mode_max(g, 0) > 1e-14) return std::string("leakage into other modes");
    return close(std::abs(g[0] - Complex(1.5, -0.5)), 0.0, 1e-14, "zero mode");
  });
  c.emplace_back("pure mode has one coefficient at its index", [] {
    const auto grid = make_grid(2, 8, 3.0);
    const auto g = to_spectral(plane_wave(grid, {1, 2, 0, 0}, 1.0));
    const auto j = flat_index(grid, {1, 2, 0, 0});
    if (off_mode_max(g, j) > 1e-14) return std::string("leakage into other modes");
    return close(std::abs(g[j] - 1.0), 0.0, 1e-14, "mode coefficient");
  });
  c.emplace_back("Laplacian of a constant is zero", [] {
    const auto grid = make_grid(2, 8, 3.0);
    const auto g = apply_laplacian(to_spectral(constant_field(grid, 2.0)));
    return off_mode_max(g, g.size()) == 0.0 ? "" : "nonzero result";
  });
  c.emplace_back("mode (1,0,0) on L = 2pi has eigenvalue -1", [] {
    const auto grid = make_grid(3, 8, 2 * kPi);
    const auto g = to_spectral(plane_wave(grid, {1, 0, 0, 0}, 1.0));
    const auto lap = apply_laplacian(g);
    const auto j = flat_index(grid, {1, 0, 0, 0});
    return close((lap[j] / g[j]).real(), -1.0, 1e-14, "eigenvalue");
  });

  c.emplace_back("norms of the zero field vanish", [] {
    const auto n = sobolev_norms(Field(make_grid(2, 8, 1.0)));
    return n.l2 == 0 && n.grad_l2 == 0 && n.h1 == 0 && n.h2 == 0 && n.h3 == 0 ? "" : "nonzero norm";
  });
  c.emplace_back("constant a has l2 = |a| L^{d/2}, grad = 0", [] {
    const auto grid = make_grid(3, 8, 2.0);
    const auto n = sobolev_norms(constant_field(grid, {0, 3.0}));
    if (n.grad_l2 != 0.0) return std::string("gradient not zero");
    return close(n.l2, 3.0 * std::pow(2.0, 1.5), 1e-14, "l2");
  });
  c.emplace_back("plane wave gradient norm", [] {
    const auto grid = make_grid(2, 8, 3.0);
    const auto n = sobolev_norms(plane_wave(grid, {1, -2, 0, 0}, 0.5));
    return close(n.grad_l2, 0.5 * 3.0 * (2 * kPi * std::sqrt(5.0) / 3.0), 1e-13, "grad_l2");
  });
  c.emplace_back("Lp norm of a constant is |a| L^{d/p}", [] {
    const auto grid = make_grid(4, 8, 2.0);
    return close(lp_norm(constant_field(grid, 1.5), 3.0), 1.5 * std::pow(2.0, 4.0 / 3.0), 1e-13,
                 "L3 norm");
  });
  c.emplace_back("Lp norm of zero is zero", [] {
    return lp_norm(Field(make_grid(1, 8, 1.0)), 6.0) == 0.0 ? "" : "nonzero";
  });

  c.emplace_back("W = 1 at the centre", [] {
    const auto grid = make_grid(3, 8, 8.0);
    const std::vector<double> center = {4, 4, 4};
    const auto w = sample_ground_state(grid, center, 1.0);
    return close(w[flat_index(grid, {4, 4, 4, 0})].real(), 1.0, 1e-15, "W(c)");
  });
  c.emplace_back("W at |x - c|^2 = 3 in d = 3 is 1/sqrt 2", [] {
    const auto grid = make_grid(3, 8, 8.0);
    const std::vector<double> center = {4, 4, 4};
    const auto w = sample_ground_state(grid, center, 1.0);
    return close(w[flat_index(grid, {5, 5, 5, 0})].real(), 0.70710678118654752, 1e-15, "W");
  });
  c.emplace_back("W at |x - c|^2 = 8 in d = 4 is 1/2", [] {
    const auto grid = make_grid(4, 8, 8.0);
    const std::vector<double> center = {4, 4, 4, 4};
    const auto w = sample_ground_state(grid, center, 1.0);
    return close(w[flat_index(grid, {6, 6, 4, 4})].real(), 0.5, 1e-15, "W");
  });
  c.emplace_back("ground-state constants reject d = 5", [] {
    return throws<InvalidArgument>([] { ground_state_constants(5); });
  });
  c.emplace_back("stationarity residual rejects the zero field", [] {
    return throws<InvalidArgument>([] { stationarity_residual(Field(make_grid(4, 8, 40.0))); });
  });
  c.emplace_back("zero data is admissible with full margins", [] {
    const auto& k = cached_ground_state_constants(4);
    const auto a = admissibility(Field(make_grid(4, 8, 40.0)), -1, k);
    if (!a.admissible) return std::string("rejected");
    auto e = close(a.energy_margin, k.energy, 1e-15, "energy margin");
    return e.empty() ? close(a.kinetic_margin, k.kinetic, 1e-15, "kinetic margin") : e;
  });
  c.emplace_back("sampled ground state above threshold is not admissible", [] {
    const auto grid = make_grid(4, 16, 40.0);
    DataDescriptor data;
    data.kind = DataKind::scaled_ground_state;
    data.amplitude = 1.25;
    data.scale = kDefaultScaleSpacing / grid.dx();
    const auto a = admissibility(initial_data(data, grid), -1, cached_ground_state_constants(4));
    return a.admissible ? "accepted" : "";
  });

  c.emplace_back("f(a) = |a|^2 a for constant a in d = 4", [] {
    const auto grid = make_grid(4, 8, 3.0);
    const Complex a(0.6, -0.8);
    const auto f = nonlinearity(constant_field(grid, a), {0.0, 1, 4}, DealiasFactor::two);
    double worst = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) worst = std::max(worst, std::abs(f[i] - a));
    return close(worst, 0.0, 1e-14, "deviation");
  });
  c.emplace_back("f(0) = 0", [] {
    const auto f = nonlinearity(Field(make_grid(3, 8, 3.0)), {0.0, 1, 3}, DealiasFactor::three);
    for (std::size_t i = 0; i < f.size(); ++i)
      if (f[i] != 0.0) return std::string("nonzero entry");
    return std::string();
  });
  c.emplace_back("phi functions at z = 0 are 1, 1/2, 1/6", [] {
    const auto p = phi_functions(0.0, 2.0);
    auto e = close(std::abs(p.phi1 - 1.0), 0, 1e-16, "phi1");
    if (e.empty()) e = close(std::abs(p.phi2 - 0.5), 0, 1e-16, "phi2");
    if (e.empty()) e = close(std::abs(p.phi3 - 1.0 / 6), 0, 1e-16, "phi3");
    return e;
  });
  c.emplace_back("phi1(-100) = 0.01", [] {
    return close(std::abs(phi_functions(-100.0, 2.0).phi1 - 0.01), 0, 1e-12, "phi1");
  });
  c.emplace_back("one step of the zero field stays zero", [] {
    const auto grid = make_grid(2, 8, 5.0);
    const EquationSpec spec{0.3, -1, 2, 3, true};
    const auto cfg = resolve({0.01, std::nullopt, 2.0, 1}, grid, spec);
    const auto out = step(SpectralField(grid), spec, cfg, etd_coefficients(grid, spec, 0.01, 2.0));
    return off_mode_max(out, out.size()) == 0.0 ? "" : "nonzero";
  });
  c.emplace_back("linear heat step multiplies a mode by exp(-|k|^2 dt)", [] {
    const auto grid = make_grid(2, 8, 2 * kPi);
    const EquationSpec spec{0.0, 1, 2, 3, false};
    const double dt = 0.05;
    const auto cfg = resolve({dt, std::nullopt, 2.0, 1}, grid, spec);
    const auto g = to_spectral(plane_wave(grid, {2, 1, 0, 0}, 0.7));
    const auto out = step(g, spec, cfg, etd_coefficients(grid, spec, dt, 2.0));
    const auto j = flat_index(grid, {2, 1, 0, 0});
    return close(std::abs(out[j] - 0.7 * std::exp(-5.0 * dt)), 0, 1e-15, "coefficient");
  });
  c.emplace_back("zero data yields all-zero records", [] {
    const auto grid = make_grid(2, 8, 5.0);
    const auto traj = evolve(Field(grid), {0.2, 1, 2, 3, true}, 0.1, {0.01, std::nullopt, 2.0, 2});
    for (const auto& r : traj.records)
      if (auto e = all_zero(r); !e.empty()) return e;
    return std::string();
  });
  c.emplace_back("linear heat mass decays as exp(-2|k|^2 t)", [] {
    const auto grid = make_grid(1, 16, 2 * kPi);
    const auto traj = evolve(plane_wave(grid, {3, 0, 0, 0}, 1.0), {0.0, 1, 1, 3, false}, 0.2,
                             {0.01, std::nullopt, 2.0, 4});
    const double m0 = traj.records.front().mass;
    double worst = 0.0;
    for (const auto& r : traj.records)
      worst = std::max(worst, std::abs(r.mass - m0 * std::exp(-18.0 * r.t)) / m0);
    return close(worst, 0.0, 1e-10, "relative mass error");
  });

  c.emplace_back("record of the zero field is zero", [] {
    return all_zero(record(Field(make_grid(3, 8, 4.0)), {0.1, -1, 3}, 0.7));
  });
  c.emplace_back("constant a in d = 4: energy = |a|^4 L^4 / 4", [] {
    const auto grid = make_grid(4, 8, 2.0);
    const auto r = record(constant_field(grid, 1.5), {0.0, 1, 4}, 0.0);
    if (r.kinetic != 0.0) return std::string("kinetic not zero");
    return close(r.energy, std::pow(1.5, 4) * 16.0 / 4.0, 1e-13, "energy");
  });
  c.emplace_back("mass is conserved at theta = pi/2", [] {
    const auto traj = smoke_run(kPi / 2, 0.2);
    return close(mass_balance_residual(traj).max_abs, 0.0, 1e-8, "mass residual");
  });
  c.emplace_back("energy is conserved at theta = pi/2", [] {
    const auto traj = smoke_run(kPi / 2, 0.2);
    return close(energy_balance_residual(traj).max_abs, 0.0, 1e-8, "energy residual");
  });
  c.emplace_back("zero trajectory has zero residuals", [] {
    const auto grid = make_grid(2, 8, 5.0);
    const auto traj = evolve(Field(grid), {0.4, 1, 2, 3, true}, 0.1, {0.01, std::nullopt, 2.0, 2});
    return mass_balance_residual(traj).max_abs == 0 && energy_balance_residual(traj).max_abs == 0
               ? ""
               : "nonzero residual";
  });
  c.emplace_back("S norm of the zero trajectory is zero", [] {
    Trajectory traj;
    traj.spec = {0.1, 1, 4};
    traj.records.resize(3);
    traj.records[1].t = 0.5;
    traj.records[2].t = 1.0;
    return s_norm(traj, 0.0, 1.0) == 0.0 ? "" : "nonzero";
  });
  c.emplace_back("S norm of a constant field", [] {
    const auto grid = make_grid(4, 8, 2.0);
    const EquationSpec spec{0.0, 1, 4};
    Trajectory traj;
    traj.spec = spec;
    const double tau = 0.75;
    for (double t : {0.0, 0.25, tau}) traj.records.push_back(record(constant_field(grid, 1.2), spec, t));
    const double want = std::pow(std::pow(1.2, 6) * 16.0 * tau, 1.0 / 6.0);
    return close(s_norm(traj, 0.0, tau), want, 1e-13, "S norm");
  });
  c.emplace_back("H1 distance of a field to itself is zero", [] {
    const auto a = plane_wave(make_grid(2, 8, 3.0), {1, 1, 0, 0}, 0.4);
    return h1_distance(a, a) == 0.0 ? "" : "nonzero";
  });
  c.emplace_back("H1 distance to zero is the H1 norm", [] {
    const auto a = plane_wave(make_grid(2, 8, 3.0), {1, 1, 0, 0}, 0.4);
    return close(h1_distance(a, Field(a.grid())), sobolev_norms(a).h1, 1e-15, "distance");
  });
  c.emplace_back("trapping monitor on a zero trajectory is not applicable", [] {
    Trajectory traj;
    traj.spec = {0.1, -1, 4};
    traj.records.resize(2);
    const auto rep = energy_trapping_monitor(traj, cached_ground_state_constants(4));
    return !rep.applicable && !rep.violated ? "" : "wrong report";
  });
  c.emplace_back("trapping monitor flags kinetic above threshold", [] {
    const auto& k = cached_ground_state_constants(4);
    Trajectory traj;
    traj.spec = {0.1, -1, 4};
    traj.records.resize(2);
    traj.records[1].kinetic = 1.01 * k.kinetic;
    return energy_trapping_monitor(traj, k).violated ? "" : "not flagged";
  });

  c.emplace_back("gaussian equals its amplitude at the centre", [] {
    const auto grid = make_grid(2, 32, 40.0);
    const auto f = initial_data({}, grid);
    return close(f[flat_index(grid, {16, 16, 0, 0})].real(), 1.0, 1e-15, "value");
  });
  c.emplace_back("gaussian with sigma = L/2 fails the tail check", [] {
    DataDescriptor data;
    data.sigma = 20.0;
    return throws<InvalidArgument>([&] { initial_data(data, make_grid(2, 32, 40.0)); }, "mass");
  });
  c.emplace_back("scaled ground state delegates to the sampler", [] {
    const auto grid = make_grid(3, 16, 20.0);
    DataDescriptor data;
    data.kind = DataKind::scaled_ground_state;
    data.amplitude = 0.5;
    data.center = {7, 9, 11};
    const auto f = initial_data(data, grid);
    const auto w = sample_ground_state(grid, data.center, 1.0);
    for (std::size_t i = 0; i < f.size(); ++i)
      if (f[i] != 0.5 * w[i]) return std::string("mismatch");
    return std::string();
  });
  c.emplace_back("no perturbation gives zero initial distance", [] {
    PairRunConfig cfg;
    cfg.grid = make_grid(2, 32, 20.0);
    cfg.data.sigma = 1.2;
    cfg.T = 0.05;
    cfg.stepper.dt = 0.01;
    return run_zero_dispersion_pair(cfg).initial_distance == 0.0 ? "" : "nonzero";
  });
  c.emplace_back("theta = 0 pair has zero distance", [] {
    PairRunConfig cfg;
    cfg.grid = make_grid(2, 32, 20.0);
    cfg.data.sigma = 1.2;
    cfg.theta = 0.0;
    cfg.T = 0.1;
    cfg.stepper.dt = 0.01;
    return close(run_zero_dispersion_pair(cfg).sup_h1, 0, 1e-12, "sup_h1");
  });
  c.emplace_back("theta = pi/2 inviscid pair has zero distance", [] {
    PairRunConfig cfg;
    cfg.grid = make_grid(4, 16, 40.0);
    cfg.target = LimitTarget::schrodinger;
    cfg.theta = kPi / 2;
    cfg.mu = -1;
    cfg.data.amplitude = 0.5;
    cfg.data.sigma = 2.5;
    cfg.T = 0.05;
    cfg.stepper.dt = 0.01;
    return close(run_inviscid_pair(cfg).sup_h1, 0, 1e-12, "sup_h1");
  });
  c.emplace_back("inviscid pair with mu = +1 needs exploratory", [] {
    PairRunConfig cfg;
    cfg.grid = make_grid(4, 8, 40.0);
    cfg.target = LimitTarget::schrodinger;
    cfg.mu = 1;
    return throws<InvalidArgument>([&] { run_inviscid_pair(cfg); }, "exploratory");
  });
  c.emplace_back("fit of 2g has slope 1 and constant 2", [] {
    const std::vector<double> g = {0.1, 0.2, 0.4}, v = {0.2, 0.4, 0.8};
    const auto fit = fit_power_law(g, v);
    auto e = close(fit.slope, 1.0, 1e-10, "slope");
    return e.empty() ? close(fit.constant, 2.0, 1e-10, "constant") : e;
  });
  c.emplace_back("fit of 3g^2 has slope 2", [] {
    const std::vector<double> g = {0.1, 0.2, 0.4}, v = {0.03, 0.12, 0.48};
    return close(fit_power_law(g, v).slope, 2.0, 1e-10, "slope");
  });

  c.emplace_back("partial configuration takes defaults", [] {
    const auto cfg = parse_config("d = 4\nn = 16\nL = 40\ntheta = 0.2\nmu = -1");
    return cfg.d == 4 && cfg.n == 16 && cfg.L == 40 && cfg.theta == 0.2 && cfg.mu == -1 && cfg.T == 1.0
               ? ""
               : "wrong values";
  });
  c.emplace_back("d = 7 is rejected naming d and 1..4", [] {
    try {
      parse_config("d = 7");
    } catch (const ConfigError& e) {
      return e.key() == "d" && std::string(e.what()).find("1..4") != std::string::npos
                 ? std::string()
                 : std::string("message: ") + e.what();
    }
    return std::string("no error");
  });
  c.emplace_back("misspelled key is echoed", [] {
    try {
      parse_config("thetaa = 0.2");
    } catch (const ConfigError& e) {
      return e.key() == "thetaa" ? std::string() : std::string("message: ") + e.what();
    }
    return std::string("no error");
  });

  c.emplace_back("empty trajectory writes only the header", [] {
    const auto dir = scratch_dir();
    const auto p = (dir / "d.csv").string();
    write_diagnostics_csv(Trajectory{}, p);
    const bool ok = read_file(p) == std::string(kDiagnosticsHeader) + "\n";
    fs::remove_all(dir);
    return ok ? "" : "unexpected contents";
  });
  c.emplace_back("single zero record writes one row of zeros", [] {
    const auto dir = scratch_dir();
    const auto p = (dir / "d.csv").string();
    Trajectory traj;
    traj.records.resize(1);
    write_diagnostics_csv(traj, p);
    const bool ok = read_file(p) == std::string(kDiagnosticsHeader) + "\n0,0,0,0,0,0,0,0,0,0,0\n";
    fs::remove_all(dir);
    return ok ? "" : "unexpected contents";
  });
  c.emplace_back("snapshot header is 41 bytes", [] {
    const auto dir = scratch_dir();
    const auto p = (dir / "s.cglf").string();
    const auto grid = make_grid(2, 8, 1.0);
    write_snapshot(Field(grid), {}, p);
    const auto size = fs::file_size(p);
    fs::remove_all(dir);
    return size == 41 + 16 * grid.size() ? "" : "wrong file size";
  });
  c.emplace_back("snapshot with magic XXXX is rejected", [] {
    const auto dir = scratch_dir();
    const auto p = (dir / "s.cglf").string();
    write_text_file(p, std::string("XXXX") + std::string(60, '\0'));
    auto e = throws<IoError>([&] { read_snapshot(p); }, "magic");
    fs::remove_all(dir);
    return e;
  });
  return c;
}

}  // namespace

std::vector<SelftestResult> run_selftest() {
  std::vector<SelftestResult> results;
  for (auto& [name, check] : cases()) {
    SelftestResult r{name, false, {}};
    try {
      r.detail = check();
      r.passed = r.detail.empty();
    } catch (const std::exception& e) {
      r.detail = std::string("exception: ") + e.what();
    }
    results.push_back(std::move(r));
  }
  return results;
}

}  // namespace cgl
