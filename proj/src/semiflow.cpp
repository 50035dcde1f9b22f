#include "cgl/semiflow.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <sstream>

#include "cgl/error.hpp"
#include "cgl/ground_state.hpp"
#include "grid_loops.hpp"

namespace cgl {

double default_time_step(const GridSpec& grid, double theta) {
  const double dx = grid.dx();
  const double parabolic = 0.5 * dx * dx / (4.0 * std::cos(theta) + 0.1);
  const double dt = std::min(parabolic, 0.05 * dx);
  return std::clamp(dt, 1e-5, 1e-2);
}

StepperConfig resolve(const StepperConfig& cfg, const GridSpec& grid,
                      const EquationSpec& spec, std::vector<std::string>* warnings) {
  StepperConfig out = cfg;
  if (out.dt == 0.0) out.dt = default_time_step(grid, spec.theta);
  if (!(out.dt > 0.0) || !std::isfinite(out.dt))
    throw InvalidArgument("time step must be positive");
  if (out.sample_stride < 1) throw InvalidArgument("sample_stride must be >= 1");
  if (!(out.coefficient_switch_radius > 0.0))
    throw InvalidArgument("coefficient_switch_radius must be positive");
  if (!out.dealias) out.dealias = exact_dealias_factor(spec);
  if (spec.power() == 5 && *out.dealias != DealiasFactor::three && warnings != nullptr)
    warnings->push_back("quintic nonlinearity with dealias factor " + to_string(*out.dealias) +
                        " is not alias-free (exact factor is 3)");
  return out;
}

// --- phi-functions -----------------------------------------------------------

PhiFunctions phi_series(Complex z) {
  // phi_k(z) = sum_j z^j / (j + k)!
  std::array<Complex, 3> sums{};
  for (int k = 1; k <= 3; ++k) {
    double factorial = 1.0;
    for (int i = 2; i <= k; ++i) factorial *= i;
    Complex term = 1.0 / factorial;
    Complex sum = term;
    for (int j = 1; j < 200; ++j) {
      term *= z / static_cast<double>(j + k);
      sum += term;
      if (std::abs(term) < 1e-17 * std::abs(sum)) break;
    }
    sums[k - 1] = sum;
  }
  return {sums[0], sums[1], sums[2]};
}

PhiFunctions phi_contour(Complex z, int points) {
  PhiFunctions acc{};
  for (int j = 0; j < points; ++j) {
    const double angle = 2.0 * std::numbers::pi * (j + 0.5) / points;
    const Complex w = z + std::polar(1.0, angle);
    const Complex ew = std::exp(w);
    acc.phi1 += (ew - 1.0) / w;
    acc.phi2 += (ew - 1.0 - w) / (w * w);
    acc.phi3 += (ew - 1.0 - w - 0.5 * w * w) / (w * w * w);
  }
  const double inv = 1.0 / points;
  return {acc.phi1 * inv, acc.phi2 * inv, acc.phi3 * inv};
}

PhiFunctions phi_functions(Complex z, double switch_radius) {
  return std::abs(z) < switch_radius ? phi_series(z) : phi_contour(z);
}

namespace {

struct EtdEntry {
  Complex e, e_half, q, f1, f2, f3;
};

EtdEntry etd_entry(Complex z, double dt, double switch_radius) {
  const auto full = phi_functions(z, switch_radius);
  const auto half = phi_functions(0.5 * z, switch_radius);
  EtdEntry out;
  out.e = std::exp(z);
  out.e_half = std::exp(0.5 * z);
  out.q = 0.5 * dt * half.phi1;
  out.f1 = dt * (full.phi1 - 3.0 * full.phi2 + 4.0 * full.phi3);
  out.f2 = dt * (full.phi2 - 2.0 * full.phi3);
  out.f3 = dt * (4.0 * full.phi3 - full.phi2);
  return out;
}

void push(EtdCoefficients& c, const EtdEntry& e) {
  c.e.push_back(e.e);
  c.e_half.push_back(e.e_half);
  c.q.push_back(e.q);
  c.f1.push_back(e.f1);
  c.f2.push_back(e.f2);
  c.f3.push_back(e.f3);
}

void reserve(EtdCoefficients& c, std::size_t n) {
  for (auto* v : {&c.e, &c.e_half, &c.q, &c.f1, &c.f2, &c.f3}) v->reserve(n);
}

}  // namespace

EtdCoefficients etd_coefficients(std::span<const Complex> z, double dt, double switch_radius) {
  EtdCoefficients out;
  out.dt = dt;
  reserve(out, z.size());
  for (const auto& zi : z) {
    if (!std::isfinite(zi.real()) || !std::isfinite(zi.imag()))
      throw InvalidArgument("etd_coefficients: non-finite symbol");
    push(out, etd_entry(zi, dt, switch_radius));
  }
  return out;
}

EtdCoefficients etd_coefficients(const GridSpec& grid, const EquationSpec& spec, double dt,
                                 double switch_radius) {
  EtdCoefficients out;
  out.dt = dt;
  reserve(out, grid.size());
  const Complex rot = spec.rotation();
  // Many modes share |k|^2; evaluate each distinct symbol once.
  std::map<double, EtdEntry> cache;
  detail::for_each_mode(grid, [&](std::size_t, double k2) {
    auto it = cache.find(k2);
    if (it == cache.end())
      it = cache.emplace(k2, etd_entry(rot * (-k2) * dt, dt, switch_radius)).first;
    push(out, it->second);
  });
  return out;
}

// --- ETDRK4 update ------------------------------------------------------------

namespace {

struct Workspace {
  std::vector<Complex> v0, nv, na, nb, nc, a, b, c;
  explicit Workspace(std::size_t n) {
    for (auto* v : {&v0, &nv, &na, &nb, &nc, &a, &b, &c}) v->assign(n, Complex{});
  }
};

// Cox-Matthews ETDRK4; `eval(v, t, out)` writes N(v, t). Overwrites v in place
// and reports whether the result is finite.
template <class Eval>
bool etdrk4_update(std::span<Complex> v, const EtdCoefficients& k, double t, Eval&& eval,
                   Workspace& w) {
  const std::size_t n = v.size();
  const double h = k.dt;
  std::copy(v.begin(), v.end(), w.v0.begin());
  eval(w.v0, t, w.nv);
  for (std::size_t i = 0; i < n; ++i) w.a[i] = k.e_half[i] * w.v0[i] + k.q[i] * w.nv[i];
  eval(w.a, t + 0.5 * h, w.na);
  for (std::size_t i = 0; i < n; ++i) w.b[i] = k.e_half[i] * w.v0[i] + k.q[i] * w.na[i];
  eval(w.b, t + 0.5 * h, w.nb);
  for (std::size_t i = 0; i < n; ++i)
    w.c[i] = k.e_half[i] * w.a[i] + k.q[i] * (2.0 * w.nb[i] - w.nv[i]);
  eval(w.c, t + h, w.nc);

  bool finite = true;
  for (std::size_t i = 0; i < n; ++i) {
    v[i] = k.e[i] * w.v0[i] + k.f1[i] * w.nv[i] + 2.0 * k.f2[i] * (w.na[i] + w.nb[i]) +
           k.f3[i] * w.nc[i];
    finite = finite && std::isfinite(v[i].real()) && std::isfinite(v[i].imag());
  }
  return finite;
}

// N(v, t) = -mu e^{i theta} P f(v) + F(t)
struct NonlinearTerm {
  const EquationSpec& spec;
  Nonlinearity& op;
  const Forcing& forcing;
  std::vector<Complex>& scratch;

  void operator()(const std::vector<Complex>& v, double t, std::vector<Complex>& out) const {
    const double mu = spec.coupling();
    if (mu != 0.0) {
      op.apply(v, out);
      const Complex w = -mu * spec.rotation();
      for (auto& x : out) x *= w;
    } else {
      std::fill(out.begin(), out.end(), Complex{});
    }
    if (forcing) {
      forcing(t, scratch);
      for (std::size_t i = 0; i < out.size(); ++i) out[i] += scratch[i];
    }
  }
};

}  // namespace

SpectralField step(const SpectralField& state, const EquationSpec& spec,
                   const StepperConfig& cfg, const EtdCoefficients& coeffs, double t,
                   const Forcing& forcing) {
  validate(spec);
  if (coeffs.e.size() != state.size())
    throw InvalidArgument("step: coefficients were built for a different grid");
  Nonlinearity op(state.grid(), spec, cfg.dealias.value_or(exact_dealias_factor(spec)));
  std::vector<Complex> scratch(state.size());
  Workspace work(state.size());
  SpectralField out = state;
  if (!etdrk4_update(out.coeffs(), coeffs, t, NonlinearTerm{spec, op, forcing, scratch}, work)) {
    std::ostringstream msg;
    msg << "instability: non-finite field at t = " << t + coeffs.dt;
    throw NumericalFailure(msg.str());
  }
  return out;
}

Field step(const Field& state, const EquationSpec& spec, const StepperConfig& cfg,
           const EtdCoefficients& coeffs, double t) {
  return from_spectral(step(to_spectral(state), spec, cfg, coeffs, t));
}

// --- Integrator --------------------------------------------------------------

struct Integrator::Work : Workspace {
  using Workspace::Workspace;
};

Integrator::Integrator(SpectralField initial, const EquationSpec& spec,
                       const StepperConfig& cfg, Forcing forcing)
    : state_(std::move(initial)),
      spec_(spec),
      cfg_(cfg),
      forcing_(std::move(forcing)),
      coeffs_(etd_coefficients(state_.grid(), spec, cfg.dt, cfg.coefficient_switch_radius)),
      nonlinearity_(state_.grid(), spec, cfg.dealias.value_or(exact_dealias_factor(spec))),
      k2_(wavenumber_squared(state_.grid())),
      scratch_(state_.size()),
      work_(std::make_unique<Work>(state_.size())) {
  validate(spec_);
  if (!(cfg_.dt > 0.0)) throw InvalidArgument("Integrator needs a resolved time step");
}

Integrator::~Integrator() = default;
Integrator::Integrator(Integrator&&) noexcept = default;

void Integrator::advance() {
  const double t = time();
  const bool finite = etdrk4_update(state_.coeffs(), coeffs_, t,
                                    NonlinearTerm{spec_, nonlinearity_, forcing_, scratch_},
                                    *work_);
  ++steps_;
  if (!finite) {
    std::ostringstream msg;
    msg << "instability: non-finite field at t = " << time();
    throw NumericalFailure(msg.str());
  }
}

double Integrator::kinetic() const {
  double s = 0.0;
  const auto& v = state_.coeffs();
  for (std::size_t i = 0; i < v.size(); ++i) s += k2_[i] * std::norm(v[i]);
  return s * state_.grid().box_volume();
}

DiagnosticRecord Integrator::record() { return cgl::record(state_, spec_, time(), nonlinearity_); }

// --- evolve ------------------------------------------------------------------

Trajectory evolve(const Field& initial, const EquationSpec& spec, double T,
                  const StepperConfig& cfg, const EvolveOptions& options) {
  validate(spec);
  if (spec.d != initial.grid().d)
    throw InvalidArgument("evolve: equation and grid dimensions differ");
  if (!(T > 0.0) || !std::isfinite(T)) throw InvalidArgument("evolve: T must be positive");

  Trajectory traj;
  traj.spec = spec;
  StepperConfig resolved = resolve(cfg, initial.grid(), spec, &traj.warnings);
  const long total = static_cast<long>(std::ceil(T / resolved.dt - 1e-9));
  resolved.dt = T / static_cast<double>(total);
  traj.dt = resolved.dt;

  const bool focusing = spec.mu == -1 && spec.is_critical() && spec.nonlinear;
  const GroundStateConstants* consts = nullptr;
  if (focusing) {
    consts = &cached_ground_state_constants(spec.d);
    if (!options.override_admissibility) {
      const auto gate = admissibility(initial, spec.mu, *consts);
      if (!gate.admissible) {
        std::ostringstream msg;
        msg << "initial data is not sub-threshold: energy margin " << gate.energy_margin
            << ", kinetic margin " << gate.kinetic_margin;
        throw AdmissibilityError(msg.str());
      }
    }
  }

  Integrator integ(to_spectral(initial), spec, resolved, options.forcing);
  auto emit = [&](long k) {
    auto r = integ.record();
    r.t = k == total ? T : static_cast<double>(k) * resolved.dt;
    if (options.observer) options.observer(r);
    traj.records.push_back(r);
    if (options.snapshots) traj.snapshots.push_back({r.t, from_spectral(integ.state())});
  };

  emit(0);
  auto threshold_hit = [&]() {
    if (consts == nullptr || integ.kinetic() < consts->kinetic) return false;
    traj.status = RunStatus::threshold_exit;
    std::ostringstream msg;
    msg << "threshold exit: kinetic energy reached |grad W|^2 at t = " << integ.time();
    traj.message = msg.str();
    return true;
  };
  if (threshold_hit()) return traj;

  try {
    for (long k = 1; k <= total; ++k) {
      integ.advance();
      const bool sample = k % resolved.sample_stride == 0 || k == total;
      if (threshold_hit()) {
        emit(k);
        return traj;
      }
      if (sample) emit(k);
    }
  } catch (const NumericalFailure& e) {
    traj.status = RunStatus::instability;
    traj.message = e.what();
  }
  return traj;
}

}  // namespace cgl
