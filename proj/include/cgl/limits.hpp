#ifndef CGL_LIMITS_HPP
#define CGL_LIMITS_HPP

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cgl/diagnostics.hpp"
#include "cgl/ground_state.hpp"
#include "cgl/semiflow.hpp"
#include "cgl/spectral_grid.hpp"

namespace cgl {

enum class DataKind { gaussian, modulated_gaussian, scaled_ground_state };

std::string to_string(DataKind kind);
std::optional<DataKind> parse_data_kind(const std::string& text);

/// gaussian:            a exp(-|x-c|^2 / sigma^2)
/// modulated_gaussian:  gaussian * exp(i k_m . (x-c)), k_m = 2 pi m / L
/// scaled_ground_state: a lambda^{(d-2)/2} W(lambda (x-c))
/// Distances are minimum-image. An empty centre means the box centre.
struct DataDescriptor {
  DataKind kind = DataKind::gaussian;
  double amplitude = 1.0;
  std::vector<double> center;
  double sigma = 2.0;
  double scale = 1.0;
  std::vector<int> modes;
};

/// Fraction of the mass that gaussian data may carry outside |x-c| < L/4.
inline constexpr double kTailMassTolerance = 1e-10;

/// Builds the field; gaussian kinds that leak more than kTailMassTolerance of
/// their mass outside |x - c| < L/4 are rejected. Ground-state data has a
/// power-law tail by construction and is exempt.
Field initial_data(const DataDescriptor& data, const GridSpec& grid);

/// Mass fraction outside the ball |x - c| < L/4.
double tail_mass_fraction(const Field& f, std::span<const double> center);

/// Perturbation added to the CGL data, rescaled to H^1 norm `size`.
struct PerturbationDescriptor {
  DataDescriptor shape;
  double size = 0.0;
};

enum class LimitTarget { heat, schrodinger };

struct PairRunConfig {
  GridSpec grid;
  LimitTarget target = LimitTarget::heat;
  double theta = 0.1;
  int mu = 1;
  int smoke_power = 3;
  DataDescriptor data;
  std::optional<PerturbationDescriptor> perturbation;
  double T = 1.0;
  StepperConfig stepper{0.0, std::nullopt, 2.0, 5};
  /// Allows leaving the theorem settings (inviscid runs with mu = +1, d = 3, theta < 0).
  bool exploratory = false;
  bool override_admissibility = false;
};

/// w = v^theta - u (heat) or v^theta - v (Schrodinger) at each sample time.
struct PairResult {
  PairRunConfig config;
  std::vector<double> times;
  std::vector<double> h1;
  std::vector<double> l2;
  double sup_h1 = 0.0;
  double sup_l2 = 0.0;
  /// Measured |v_0^theta - u_0|_{H^1}.
  double initial_distance = 0.0;
  Admissibility cgl_admissibility;
  Admissibility reference_admissibility;
  Trajectory cgl;
  Trajectory reference;
  std::vector<std::string> warnings;
};

/// |e^{i theta} - 1| = 2 |sin(theta/2)|
double dispersion_gap(double theta);
/// |e^{i theta} - i|
double inviscid_gap(double theta);

/// CGL at angle theta against the heat flow (theta = 0) from the same or
/// perturbed data, stepped in lockstep with shared grid and dt.
PairResult run_zero_dispersion_pair(const PairRunConfig& cfg);

/// CGL at angle theta against the focusing NLS endpoint (theta = pi/2). The
/// theorem setting (d = 4, mu = -1, theta > 0) is enforced unless exploratory.
PairResult run_inviscid_pair(const PairRunConfig& cfg);

enum class SweepMode { dispersion, inviscid };

std::string to_string(SweepMode mode);
std::optional<SweepMode> parse_sweep_mode(const std::string& text);

struct SweepPoint {
  double theta = 0.0;
  double gap = 0.0;
  double sup_h1 = 0.0;
  double sup_l2 = 0.0;
};

/// log(value) = slope log(gap) + log(constant); residual is the RMS misfit in log space.
struct PowerLawFit {
  double slope = 0.0;
  double constant = 0.0;
  double residual = 0.0;
};

/// Least squares in log-log space. Throws InvalidArgument with fewer than 2
/// points, non-positive values or zero variance in the gaps.
PowerLawFit fit_power_law(std::span<const double> gaps, std::span<const double> values);

struct SweepResult {
  SweepMode mode = SweepMode::dispersion;
  std::vector<SweepPoint> points;
  PowerLawFit fit;
  std::vector<PairResult> members;
};

/// Runs one pair per theta (members in parallel on `threads` workers) and fits
/// sup_h1 against the gap. Needs at least 3 angles.
SweepResult sweep_and_fit(const PairRunConfig& base, std::span<const double> thetas,
                          SweepMode mode, int threads = 1);

/// Fit from points already measured.
SweepResult fit_sweep(SweepMode mode, std::vector<SweepPoint> points);

/// Fitted constant of every leave-one-out refit (requires >= 3 points).
std::vector<double> leave_one_out_constants(const SweepResult& sweep);

}  // namespace cgl

#endif  // CGL_LIMITS_HPP
