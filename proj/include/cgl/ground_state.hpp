#ifndef CGL_GROUND_STATE_HPP
#define CGL_GROUND_STATE_HPP

#include <span>

#include "cgl/spectral_grid.hpp"

namespace cgl {

/// Variational constants of the Aubin-Talenti profile
/// W(x) = (1 + |x|^2 / (d(d-2)))^{-(d-2)/2} on R^d.
struct GroundStateConstants {
  int d = 0;
  double kinetic = 0.0;    // |grad W|_2^2
  double potential = 0.0;  // |W|_{2d/(d-2)}^{2d/(d-2)}
  double energy = 0.0;     // E(W) = kinetic/2 - (d-2)/(2d) potential
  double quadrature_error = 0.0;
};

struct RadialQuadrature {
  double outer_radius = 1e3;
  double tolerance = 1e-10;
  unsigned max_depth = 15;
  int tail_terms = 8;
};

/// lambda^{(d-2)/2} W(lambda (x - center)) with minimum-image distances.
/// d must be 3 or 4.
Field sample_ground_state(const GridSpec& grid, std::span<const double> center,
                          double scale);

/// Radial Gauss-Kronrod quadrature on [0, R] plus the power-law tail beyond R
/// summed as a convergent series in d(d-2)/r^2. Throws NumericalFailure when
/// the error estimate exceeds quad.tolerance.
GroundStateConstants ground_state_constants(int d, const RadialQuadrature& quad = {});

/// Computed once per dimension and shared.
const GroundStateConstants& cached_ground_state_constants(int d);

/// Largest lambda*dx at which a box-sampled profile is accepted as resolved.
inline constexpr double kMaxResolvedScaleSpacing = 2.0;
/// lambda*dx used when the residual picks its own scale.
inline constexpr double kDefaultScaleSpacing = 1.5;

/// |Lap W_h + W_h^{(d+2)/(d-2)}| / |W_h^{(d+2)/(d-2)}| on the box, with W_h
/// centred in the box at scale lambda = 1.5 / dx.
double stationarity_residual(const GridSpec& grid);
/// Same at an explicit scale; throws InvalidArgument if lambda*dx exceeds
/// kMaxResolvedScaleSpacing.
double stationarity_residual(const GridSpec& grid, double scale);
/// Residual of an arbitrary field; a zero field is rejected.
double stationarity_residual(const Field& field);

struct Admissibility {
  bool admissible = false;
  double energy_margin = 0.0;   // E(W) - E(f)
  double kinetic_margin = 0.0;  // |grad W|^2 - |grad f|^2
};

/// Relative band the margins must clear for focusing data to pass.
inline constexpr double kAdmissibilityBand = 1e-3;

/// Sub-threshold test of the focusing theory. For mu = -1 the data passes iff
/// both margins exceed kAdmissibilityBand times the threshold values; for
/// mu = +1 it always passes and the margins are informational.
Admissibility admissibility(const Field& f, int mu, const GroundStateConstants& consts);

}  // namespace cgl

#endif  // CGL_GROUND_STATE_HPP
