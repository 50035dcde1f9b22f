#include "cgl/limits.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <numbers>
#include <sstream>
#include <thread>

#include "cgl/error.hpp"

namespace cgl {

std::string to_string(DataKind kind) {
  switch (kind) {
    case DataKind::gaussian: return "gaussian";
    case DataKind::modulated_gaussian: return "modulated_gaussian";
    case DataKind::scaled_ground_state: return "scaled_ground_state";
  }
  return "unknown";
}

std::optional<DataKind> parse_data_kind(const std::string& text) {
  if (text == "gaussian") return DataKind::gaussian;
  if (text == "modulated_gaussian") return DataKind::modulated_gaussian;
  if (text == "scaled_ground_state") return DataKind::scaled_ground_state;
  return std::nullopt;
}

std::string to_string(SweepMode mode) {
  return mode == SweepMode::dispersion ? "dispersion" : "inviscid";
}

std::optional<SweepMode> parse_sweep_mode(const std::string& text) {
  if (text == "dispersion") return SweepMode::dispersion;
  if (text == "inviscid") return SweepMode::inviscid;
  return std::nullopt;
}

namespace {

std::vector<double> resolved_center(const DataDescriptor& data, const GridSpec& grid) {
  if (data.center.empty()) return std::vector<double>(static_cast<std::size_t>(grid.d), grid.L / 2);
  if (data.center.size() != static_cast<std::size_t>(grid.d))
    throw InvalidArgument("data centre needs " + std::to_string(grid.d) + " coordinates");
  return data.center;
}

}  // namespace

double tail_mass_fraction(const Field& f, std::span<const double> center) {
  const auto& grid = f.grid();
  const double radius2 = (grid.L / 4) * (grid.L / 4);
  double inside = 0.0;
  double outside = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double m = std::norm(f[i]);
    (periodic_distance_squared(grid, i, center) < radius2 ? inside : outside) += m;
  }
  const double total = inside + outside;
  return total > 0.0 ? outside / total : 0.0;
}

Field initial_data(const DataDescriptor& data, const GridSpec& grid) {
  const auto center = resolved_center(data, grid);
  if (data.kind == DataKind::scaled_ground_state) {
    Field w = sample_ground_state(grid, center, data.scale);
    w *= data.amplitude;
    return w;
  }

  if (!(data.sigma > 0.0)) throw InvalidArgument("gaussian width sigma must be positive");
  std::vector<double> k(static_cast<std::size_t>(grid.d), 0.0);
  if (data.kind == DataKind::modulated_gaussian) {
    if (data.modes.size() != static_cast<std::size_t>(grid.d))
      throw InvalidArgument("modulated_gaussian needs one mode number per axis");
    for (int a = 0; a < grid.d; ++a) k[a] = 2.0 * std::numbers::pi * data.modes[a] / grid.L;
  }

  std::vector<Complex> values(grid.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    const auto x = coordinates(grid, i);
    double r2 = 0.0;
    double phase = 0.0;
    for (int a = 0; a < grid.d; ++a) {
      double delta = x[a] - center[a];
      delta -= grid.L * std::round(delta / grid.L);
      r2 += delta * delta;
      phase += k[a] * delta;
    }
    values[i] = data.amplitude * std::exp(-r2 / (data.sigma * data.sigma)) *
                std::polar(1.0, phase);
  }
  Field f(grid, std::move(values));
  if (data.amplitude != 0.0) {
    const double tail = tail_mass_fraction(f, center);
    if (tail > kTailMassTolerance) {
      std::ostringstream msg;
      msg << "initial data is not concentrated: mass fraction " << tail
          << " lies outside |x - c| < L/4 (limit " << kTailMassTolerance << ")";
      throw InvalidArgument(msg.str());
    }
  }
  return f;
}

double dispersion_gap(double theta) { return std::abs(std::polar(1.0, theta) - 1.0); }

double inviscid_gap(double theta) {
  return std::abs(std::polar(1.0, theta) - Complex(0.0, 1.0));
}

namespace {

void require_positive_distance_fields(const PairRunConfig& cfg) {
  if (!(cfg.T > 0.0) || !std::isfinite(cfg.T)) throw InvalidArgument("pair run: T must be positive");
  if (cfg.mu != 1 && cfg.mu != -1) throw InvalidArgument("mu must be +1 or -1");
}

double distance_sq(const SpectralField& a, const SpectralField& b, bool with_gradient,
                   const std::vector<double>& k2) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double w = with_gradient ? 1.0 + k2[i] : 1.0;
    s += w * std::norm(a[i] - b[i]);
  }
  return s * a.grid().box_volume();
}

PairResult run_pair(const PairRunConfig& cfg, double reference_theta) {
  require_positive_distance_fields(cfg);
  const GridSpec& grid = cfg.grid;

  EquationSpec cgl_spec{cfg.theta, cfg.mu, grid.d, cfg.smoke_power, true};
  EquationSpec ref_spec{reference_theta, cfg.mu, grid.d, cfg.smoke_power, true};
  validate(cgl_spec);
  validate(ref_spec);

  PairResult result;
  result.config = cfg;

  const Field reference_data = initial_data(cfg.data, grid);
  Field cgl_data = reference_data;
  if (cfg.perturbation && cfg.perturbation->size > 0.0) {
    Field shape = initial_data(cfg.perturbation->shape, grid);
    const double norm = sobolev_norms(shape).h1;
    if (!(norm > 0.0)) throw InvalidArgument("perturbation shape has zero H^1 norm");
    shape *= cfg.perturbation->size / norm;
    cgl_data += shape;
  }

  const auto cgl0 = to_spectral(cgl_data);
  const auto ref0 = to_spectral(reference_data);
  const auto k2 = wavenumber_squared(grid);
  result.initial_distance = std::sqrt(distance_sq(cgl0, ref0, true, k2));

  const GroundStateConstants* consts = nullptr;
  if (cgl_spec.is_critical()) {
    consts = &cached_ground_state_constants(grid.d);
    result.cgl_admissibility = admissibility(cgl_data, cfg.mu, *consts);
    result.reference_admissibility = admissibility(reference_data, cfg.mu, *consts);
    if (cfg.mu == -1 && !cfg.override_admissibility &&
        !(result.cgl_admissibility.admissible && result.reference_admissibility.admissible)) {
      std::ostringstream msg;
      msg << "pair data is not sub-threshold (energy margins " << result.cgl_admissibility.energy_margin
          << ", " << result.reference_admissibility.energy_margin << "; kinetic margins "
          << result.cgl_admissibility.kinetic_margin << ", "
          << result.reference_admissibility.kinetic_margin << ")";
      throw AdmissibilityError(msg.str());
    }
  } else {
    result.cgl_admissibility.admissible = true;
    result.reference_admissibility.admissible = true;
  }

  // Both runs share dt; the theta-independent default keeps sweep members aligned.
  StepperConfig stepper = cfg.stepper;
  if (stepper.dt == 0.0) stepper.dt = default_time_step(grid, 0.0);
  stepper = resolve(stepper, grid, cgl_spec, &result.warnings);
  const long total = static_cast<long>(std::ceil(cfg.T / stepper.dt - 1e-9));
  stepper.dt = cfg.T / static_cast<double>(total);

  Integrator cgl_run(cgl0, cgl_spec, stepper);
  Integrator ref_run(ref0, ref_spec, stepper);
  result.cgl.spec = cgl_spec;
  result.reference.spec = ref_spec;
  result.cgl.dt = result.reference.dt = stepper.dt;

  const bool focusing = cfg.mu == -1 && consts != nullptr;
  auto sample = [&](long k) {
    const double t = k == total ? cfg.T : static_cast<double>(k) * stepper.dt;
    auto rc = cgl_run.record();
    auto rr = ref_run.record();
    rc.t = rr.t = t;
    result.cgl.records.push_back(rc);
    result.reference.records.push_back(rr);
    const double h1 = std::sqrt(distance_sq(cgl_run.state(), ref_run.state(), true, k2));
    const double l2 = std::sqrt(distance_sq(cgl_run.state(), ref_run.state(), false, k2));
    result.times.push_back(t);
    result.h1.push_back(h1);
    result.l2.push_back(l2);
    result.sup_h1 = std::max(result.sup_h1, h1);
    result.sup_l2 = std::max(result.sup_l2, l2);
  };
  auto check_threshold = [&](const Integrator& run, const char* label) {
    if (focusing && run.kinetic() >= consts->kinetic) {
      std::ostringstream msg;
      msg << "threshold exit in the " << label << " run at t = " << run.time();
      throw NumericalFailure(msg.str());
    }
  };

  sample(0);
  for (long k = 1; k <= total; ++k) {
    cgl_run.advance();
    ref_run.advance();
    check_threshold(cgl_run, "CGL");
    check_threshold(ref_run, "reference");
    if (k % stepper.sample_stride == 0 || k == total) sample(k);
  }
  return result;
}

void warn_window(PairResult& result, double window, const char* formula) {
  if (result.config.T >= window) {
    std::ostringstream msg;
    msg << "T = " << result.config.T << " exceeds the limit-theorem window " << formula << " = "
        << window << " for the measured perturbation eps = " << result.initial_distance;
    result.warnings.push_back(msg.str());
  }
}

}  // namespace

PairResult run_zero_dispersion_pair(const PairRunConfig& cfg) {
  if (cfg.target != LimitTarget::heat)
    throw InvalidArgument("zero-dispersion pair needs target = heat");
  if (!(std::abs(cfg.theta) < std::numbers::pi / 2))
    throw InvalidArgument("zero-dispersion pair needs |theta| < pi/2");
  auto result = run_pair(cfg, 0.0);
  const double eps = result.initial_distance;
  const double gap = dispersion_gap(cfg.theta);
  if (eps > 0.0 && gap > 0.0) warn_window(result, eps * eps / (gap * gap), "eps^2 |e^{i theta} - 1|^{-2}");
  return result;
}

PairResult run_inviscid_pair(const PairRunConfig& cfg) {
  if (cfg.target != LimitTarget::schrodinger)
    throw InvalidArgument("inviscid pair needs target = schrodinger");
  if (!cfg.exploratory) {
    if (cfg.grid.d != 4 || cfg.mu != -1)
      throw InvalidArgument(
          "inviscid pair is defined for d = 4, mu = -1; set exploratory to run other settings");
    if (!(cfg.theta > 0.0))
      throw InvalidArgument("inviscid pair needs theta in (0, pi/2] unless exploratory");
  }
  auto result = run_pair(cfg, std::numbers::pi / 2);
  const double eps = result.initial_distance;
  const double gap = inviscid_gap(cfg.theta);
  if (eps > 0.0 && gap > 0.0) warn_window(result, eps / gap, "eps |e^{i theta} - i|^{-1}");
  return result;
}

PowerLawFit fit_power_law(std::span<const double> gaps, std::span<const double> values) {
  if (gaps.size() != values.size() || gaps.size() < 2)
    throw InvalidArgument("power-law fit needs at least two (gap, value) pairs");
  const std::size_t n = gaps.size();
  std::vector<double> x(n), y(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(gaps[i] > 0.0) || !(values[i] > 0.0))
      throw InvalidArgument("degenerate fit: gaps and values must be positive");
    x[i] = std::log(gaps[i]);
    y[i] = std::log(values[i]);
  }
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx > 1e-300)) throw InvalidArgument("degenerate fit: gaps have zero variance");

  PowerLawFit fit;
  fit.slope = sxy / sxx;
  const double intercept = my - fit.slope * mx;
  fit.constant = std::exp(intercept);
  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - (intercept + fit.slope * x[i]);
    ss += r * r;
  }
  fit.residual = std::sqrt(ss / n);
  return fit;
}

SweepResult fit_sweep(SweepMode mode, std::vector<SweepPoint> points) {
  SweepResult out;
  out.mode = mode;
  out.points = std::move(points);
  std::vector<double> gaps, values;
  for (const auto& p : out.points) {
    gaps.push_back(p.gap);
    values.push_back(p.sup_h1);
  }
  out.fit = fit_power_law(gaps, values);
  return out;
}

SweepResult sweep_and_fit(const PairRunConfig& base, std::span<const double> thetas,
                          SweepMode mode, int threads) {
  if (thetas.size() < 3) throw InvalidArgument("a sweep needs at least 3 theta values");
  const std::size_t n = thetas.size();
  std::vector<std::optional<PairResult>> members(n);
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};

  auto worker = [&]() {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        PairRunConfig cfg = base;
        cfg.theta = thetas[i];
        if (mode == SweepMode::dispersion) {
          cfg.target = LimitTarget::heat;
          members[i] = run_zero_dispersion_pair(cfg);
        } else {
          cfg.target = LimitTarget::schrodinger;
          members[i] = run_inviscid_pair(cfg);
        }
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };

  const int workers = std::max(1, std::min<int>(threads, static_cast<int>(n)));
  std::vector<std::thread> pool;
  for (int w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  std::vector<SweepPoint> points;
  for (std::size_t i = 0; i < n; ++i) {
    const double gap = mode == SweepMode::dispersion ? dispersion_gap(thetas[i]) : inviscid_gap(thetas[i]);
    points.push_back({thetas[i], gap, members[i]->sup_h1, members[i]->sup_l2});
  }
  SweepResult out = fit_sweep(mode, std::move(points));
  for (auto& m : members) out.members.push_back(std::move(*m));
  return out;
}

std::vector<double> leave_one_out_constants(const SweepResult& sweep) {
  if (sweep.points.size() < 3)
    throw InvalidArgument("leave-one-out refits need at least 3 sweep points");
  std::vector<double> constants;
  for (std::size_t skip = 0; skip < sweep.points.size(); ++skip) {
    std::vector<double> gaps, values;
    for (std::size_t i = 0; i < sweep.points.size(); ++i) {
      if (i == skip) continue;
      gaps.push_back(sweep.points[i].gap);
      values.push_back(sweep.points[i].sup_h1);
    }
    constants.push_back(fit_power_law(gaps, values).constant);
  }
  return constants;
}

}  // namespace cgl
