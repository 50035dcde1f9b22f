#ifndef CGL_SEMIFLOW_HPP
#define CGL_SEMIFLOW_HPP

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "cgl/diagnostics.hpp"
#include "cgl/equation.hpp"
#include "cgl/spectral_grid.hpp"

namespace cgl {

struct StepperConfig {
  /// Requested step; 0 selects default_time_step.
  double dt = 0.0;
  /// Unset selects exact_dealias_factor.
  std::optional<DealiasFactor> dealias;
  /// |z| below which the phi-functions use their Taylor series.
  double coefficient_switch_radius = 2.0;
  int sample_stride = 10;
};

/// min(0.5 dx^2 / (4 cos(theta) + 0.1), 0.05 dx), clipped to [1e-5, 1e-2].
double default_time_step(const GridSpec& grid, double theta);

/// Fills dt and dealias; throws InvalidArgument for dt <= 0 or stride < 1.
/// A quintic run with a factor below 3 adds a warning to `warnings`.
StepperConfig resolve(const StepperConfig& cfg, const GridSpec& grid,
                      const EquationSpec& spec, std::vector<std::string>* warnings = nullptr);

/// phi_1(z) = (e^z - 1)/z, phi_2 = (e^z - 1 - z)/z^2, phi_3 = (e^z - 1 - z - z^2/2)/z^3.
struct PhiFunctions {
  Complex phi1, phi2, phi3;
};

/// Taylor series, summed until terms drop below 1e-17 relative.
PhiFunctions phi_series(Complex z);
/// Trapezoidal mean over the circle |w - z| = 1 (Cauchy integral formula).
PhiFunctions phi_contour(Complex z, int points = 64);
/// Series for |z| < switch_radius, contour otherwise.
PhiFunctions phi_functions(Complex z, double switch_radius);

/// Per-mode ETDRK4 (Cox-Matthews) weights for v' = Lv + N, z = L dt:
///   e = e^z, e_half = e^{z/2}, q = dt phi_1(z/2)/2,
///   f1 = dt (phi1 - 3 phi2 + 4 phi3), f2 = dt (phi2 - 2 phi3), f3 = dt (4 phi3 - phi2).
struct EtdCoefficients {
  double dt = 0.0;
  std::vector<Complex> e, e_half, q, f1, f2, f3;
};

EtdCoefficients etd_coefficients(std::span<const Complex> z, double dt,
                                 double switch_radius);
/// z = e^{i theta} (-|k|^2) dt on every mode of the grid.
EtdCoefficients etd_coefficients(const GridSpec& grid, const EquationSpec& spec, double dt,
                                 double switch_radius);

/// Writes spectral forcing coefficients F(t) into `out` (overwriting).
using Forcing = std::function<void(double t, std::span<Complex> out)>;

/// One ETDRK4 step of v_t = e^{i theta} Lap v - mu e^{i theta} P f(v) + F(t).
/// Throws NumericalFailure when the result is non-finite.
SpectralField step(const SpectralField& state, const EquationSpec& spec,
                   const StepperConfig& cfg, const EtdCoefficients& coeffs, double t = 0.0,
                   const Forcing& forcing = {});
Field step(const Field& state, const EquationSpec& spec, const StepperConfig& cfg,
           const EtdCoefficients& coeffs, double t = 0.0);

/// Stateful ETDRK4 propagation with preallocated work arrays.
class Integrator {
 public:
  /// cfg must be resolved (dt > 0, dealias set).
  Integrator(SpectralField initial, const EquationSpec& spec, const StepperConfig& cfg,
             Forcing forcing = {});
  ~Integrator();
  Integrator(Integrator&&) noexcept;

  /// Advances by cfg.dt. Throws NumericalFailure on non-finite state.
  void advance();

  const SpectralField& state() const { return state_; }
  double time() const { return static_cast<double>(steps_) * cfg_.dt; }
  long steps() const { return steps_; }
  const EquationSpec& spec() const { return spec_; }
  const StepperConfig& config() const { return cfg_; }
  double kinetic() const;
  DiagnosticRecord record();

 private:
  struct Work;

  SpectralField state_;
  EquationSpec spec_;
  StepperConfig cfg_;
  Forcing forcing_;
  EtdCoefficients coeffs_;
  Nonlinearity nonlinearity_;
  std::vector<double> k2_;
  std::vector<Complex> scratch_;
  std::unique_ptr<Work> work_;
  long steps_ = 0;
};

struct EvolveOptions {
  /// Called with every record as it is produced.
  std::function<void(const DiagnosticRecord&)> observer;
  bool snapshots = false;
  /// Skip the focusing admissibility gate.
  bool override_admissibility = false;
  Forcing forcing;
};

/// Integrates to T with records every sample_stride steps plus t = 0 and t = T.
/// The step is shrunk to T / ceil(T / dt) so the last record lands on T.
///
/// Focusing critical runs must pass the admissibility gate (AdmissibilityError
/// otherwise) and stop with RunStatus::threshold_exit once the kinetic energy
/// reaches |grad W|^2. Non-finite states stop with RunStatus::instability. In
/// both cases the partial trajectory is returned.
Trajectory evolve(const Field& initial, const EquationSpec& spec, double T,
                  const StepperConfig& cfg, const EvolveOptions& options = {});

}  // namespace cgl

#endif  // CGL_SEMIFLOW_HPP
