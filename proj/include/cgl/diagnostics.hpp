#ifndef CGL_DIAGNOSTICS_HPP
#define CGL_DIAGNOSTICS_HPP

#include <optional>
#include <string>
#include <vector>

#include "cgl/equation.hpp"
#include "cgl/ground_state.hpp"
#include "cgl/spectral_grid.hpp"

namespace cgl {

/// Integral quantities of one sample. Field order is the CSV column order.
///
/// f is the dealiased nonlinearity P f(v) actually used by the flow, so
/// hi_potential = |P f(v)|^2 and grad_flow_sq = |Lap v - mu P f(v)|^2. For a
/// resolved field P f(v) = f(v) up to spectrally small terms.
struct DiagnosticRecord {
  double t = 0.0;
  double mass = 0.0;
  double kinetic = 0.0;
  double potential = 0.0;
  double energy = 0.0;
  double hi_potential = 0.0;
  double lap = 0.0;
  double cross = 0.0;
  double grad_flow_sq = 0.0;
  double h2 = 0.0;
  double h3 = 0.0;

  friend bool operator==(const DiagnosticRecord&, const DiagnosticRecord&) = default;
};

enum class RunStatus { completed, instability, threshold_exit };

std::string to_string(RunStatus status);

struct Snapshot {
  double t = 0.0;
  Field field;
};

struct Trajectory {
  EquationSpec spec;
  std::vector<DiagnosticRecord> records;
  std::vector<Snapshot> snapshots;
  RunStatus status = RunStatus::completed;
  /// Failure description for instability / threshold exit.
  std::string message;
  /// Effective step (T divided into whole steps).
  double dt = 0.0;
  std::vector<std::string> warnings;
};

/// Record with a caller-owned nonlinearity evaluator (reuses its buffers).
DiagnosticRecord record(const SpectralField& g, const EquationSpec& spec, double t,
                        Nonlinearity& op);
DiagnosticRecord record(const SpectralField& g, const EquationSpec& spec, double t,
                        DealiasFactor factor);
/// Uses the exact dealiasing factor for the spec's power.
DiagnosticRecord record(const Field& f, const EquationSpec& spec, double t);

/// Relative mismatches of the two record identities (definition of the energy
/// and algebraic expansion of grad_flow_sq).
struct RecordConsistency {
  double energy = 0.0;
  double expansion = 0.0;
};
RecordConsistency record_consistency(const DiagnosticRecord& r, const EquationSpec& spec);

inline constexpr double kResidualFloor = 1e-14;

struct ResidualSeries {
  std::vector<double> values;  // one per adjacent record pair
  double max_abs = 0.0;
};

/// M(t2) - M(t1) + int 2 cos(theta) (kinetic + mu potential) dt, trapezoidal,
/// divided by max(M(0), floor). Needs at least 3 records.
ResidualSeries mass_balance_residual(const Trajectory& traj);

/// E(t2) - E(t1) + int cos(theta) grad_flow_sq dt, trapezoidal, divided by
/// max(|E(0)|, floor). Needs at least 3 records.
ResidualSeries energy_balance_residual(const Trajectory& traj);

/// (int_{t1}^{t2} hi_potential dt)^{1/(2(p-1))}: the S(I) norm, with
/// 1/(2(p-1)) = (d-2)/(2(d+2)) in the critical dimensions.
double s_norm(const Trajectory& traj, double t1, double t2);

/// H^1 norm of a - b.
double h1_distance(const Field& a, const Field& b);

struct TrappingReport {
  bool applicable = false;
  double max_kinetic_ratio = 0.0;
  std::optional<double> min_energy_ratio;
  std::optional<double> max_energy_ratio;
  bool violated = false;
};

/// Kinetic energy against |grad W|^2 and the energy/kinetic comparability
/// ratio along a focusing trajectory.
TrappingReport energy_trapping_monitor(const Trajectory& traj,
                                       const GroundStateConstants& consts);

}  // namespace cgl

#endif  // CGL_DIAGNOSTICS_HPP
