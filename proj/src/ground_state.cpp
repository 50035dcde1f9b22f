#include "cgl/ground_state.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "cgl/equation.hpp"
#include "cgl/error.hpp"
#include "cgl/fft.hpp"
#include "grid_loops.hpp"

namespace cgl {
namespace {

void require_critical_dimension(int d) {
  if (d != 3 && d != 4)
    throw InvalidArgument("dimension out of range for the ground state: d = " +
                          std::to_string(d) + " (expected 3 or 4)");
}

double sphere_area(int d) {
  // |S^{d-1}| for d = 3, 4
  return d == 3 ? 4.0 * std::numbers::pi : 2.0 * std::numbers::pi * std::numbers::pi;
}

double profile(int d, double r2) {
  const double c = d * (d - 2.0);
  return std::pow(1.0 + r2 / c, -(d - 2.0) / 2.0);
}

struct RadialIntegral {
  double value = 0.0;
  double error = 0.0;
};

// int_0^inf r^q (1 + r^2/c)^{-d} dr for the two integrands of the constants.
RadialIntegral radial_integral(int d, int q, const RadialQuadrature& quad) {
  using boost::math::quadrature::gauss_kronrod;
  const double c = d * (d - 2.0);
  auto integrand = [&](double r) {
    return std::pow(r, q) * std::pow(1.0 + r * r / c, -static_cast<double>(d));
  };

  RadialIntegral out;
  // Geometric panels keep every panel's integrand within a few decades.
  double a = 0.0;
  double b = 1.0;
  while (a < quad.outer_radius) {
    b = std::min(b, quad.outer_radius);
    double err = 0.0;
    out.value += gauss_kronrod<double, 15>::integrate(integrand, a, b, quad.max_depth,
                                                      1e-13, &err);
    out.error += err;
    a = b;
    b *= 2.0;
  }

  // Tail: (1 + r^2/c)^{-d} = (c/r^2)^d sum_j binom(-d, j) (c/r^2)^j.
  const double R = quad.outer_radius;
  double tail = 0.0;
  double binom = 1.0;
  double last = 0.0;
  for (int j = 0; j < quad.tail_terms; ++j) {
    if (j > 0) binom *= -static_cast<double>(d + j - 1) / j;
    const double exponent = q + 1.0 - 2.0 * d - 2.0 * j;
    last = binom * std::pow(c, d + j) * std::pow(R, exponent) / (-exponent);
    tail += last;
  }
  out.value += tail;
  out.error += std::abs(last);
  return out;
}

}  // namespace

Field sample_ground_state(const GridSpec& grid, std::span<const double> center,
                          double scale) {
  require_critical_dimension(grid.d);
  if (!(scale > 0.0)) throw InvalidArgument("ground state scale must be positive");
  if (center.size() < static_cast<std::size_t>(grid.d))
    throw InvalidArgument("ground state centre needs one coordinate per axis");
  const double amplitude = std::pow(scale, (grid.d - 2) / 2.0);
  std::vector<Complex> values(grid.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double r2 = periodic_distance_squared(grid, i, center);
    values[i] = amplitude * profile(grid.d, scale * scale * r2);
  }
  return Field(grid, std::move(values));
}

GroundStateConstants ground_state_constants(int d, const RadialQuadrature& quad) {
  require_critical_dimension(d);
  const double c = d * (d - 2.0);
  const double omega = sphere_area(d);

  // |W'|^2 r^{d-1} = (d-2)^2/c^2 r^{d+1} (1 + r^2/c)^{-d}
  const auto kin = radial_integral(d, d + 1, quad);
  const auto pot = radial_integral(d, d - 1, quad);
  const double kin_factor = omega * (d - 2.0) * (d - 2.0) / (c * c);

  GroundStateConstants out;
  out.d = d;
  out.kinetic = kin_factor * kin.value;
  out.potential = omega * pot.value;
  out.energy = 0.5 * out.kinetic - (d - 2.0) / (2.0 * d) * out.potential;
  out.quadrature_error = kin_factor * kin.error + omega * pot.error;
  if (!(out.quadrature_error <= quad.tolerance))
    throw NumericalFailure("ground-state quadrature error " +
                           std::to_string(out.quadrature_error) +
                           " exceeds tolerance");
  return out;
}

const GroundStateConstants& cached_ground_state_constants(int d) {
  require_critical_dimension(d);
  static const GroundStateConstants d3 = ground_state_constants(3);
  static const GroundStateConstants d4 = ground_state_constants(4);
  return d == 3 ? d3 : d4;
}

double stationarity_residual(const GridSpec& grid) {
  return stationarity_residual(grid, kDefaultScaleSpacing / grid.dx());
}

double stationarity_residual(const GridSpec& grid, double scale) {
  require_critical_dimension(grid.d);
  if (!(scale > 0.0)) throw InvalidArgument("ground state scale must be positive");
  if (scale * grid.dx() > kMaxResolvedScaleSpacing)
    throw InvalidArgument("under-resolved ground state: lambda*L/n = " +
                          std::to_string(scale * grid.dx()) + " exceeds " +
                          std::to_string(kMaxResolvedScaleSpacing));

  // One grid-sized buffer: W is recomputed pointwise rather than stored.
  const std::vector<double> center(static_cast<std::size_t>(grid.d), grid.L / 2);
  const double amplitude = std::pow(scale, (grid.d - 2) / 2.0);
  auto w_at = [&](std::size_t i) {
    return amplitude * profile(grid.d, scale * scale * periodic_distance_squared(grid, i, center));
  };

  std::vector<Complex> lap(grid.size());
  for (std::size_t i = 0; i < lap.size(); ++i) lap[i] = w_at(i);
  detail::fft_inplace(lap, grid.d, grid.n, detail::FftDirection::forward);
  const double inv = 1.0 / static_cast<double>(grid.size());
  detail::for_each_mode(grid, [&](std::size_t i, double k2) { lap[i] *= -k2 * inv; });
  detail::fft_inplace(lap, grid.d, grid.n, detail::FftDirection::backward);

  const double exponent = (grid.d + 2.0) / (grid.d - 2.0);
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < lap.size(); ++i) {
    const double source = std::pow(w_at(i), exponent);
    num += std::norm(lap[i] + source);
    den += source * source;
  }
  return std::sqrt(num / den);
}

double stationarity_residual(const Field& field) {
  const auto& grid = field.grid();
  require_critical_dimension(grid.d);
  const auto lap = from_spectral(apply_laplacian(to_spectral(field)));
  const double s = 4.0 / (grid.d - 2.0);
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < field.size(); ++i) {
    const Complex source = std::pow(std::abs(field[i]), s) * field[i];
    num += std::norm(lap[i] + source);
    den += std::norm(source);
  }
  if (!(den > 0.0))
    throw InvalidArgument("stationarity residual is undefined for a zero field");
  return std::sqrt(num / den);
}

Admissibility admissibility(const Field& f, int mu, const GroundStateConstants& consts) {
  if (consts.d != f.grid().d)
    throw InvalidArgument("admissibility: constants are for d = " + std::to_string(consts.d) +
                          " but the field has d = " + std::to_string(f.grid().d));
  if (mu != 1 && mu != -1) throw InvalidArgument("mu must be +1 or -1");
  EquationSpec spec;
  spec.d = f.grid().d;
  spec.mu = mu;
  const auto parts = energy_parts(f, spec);

  Admissibility out;
  out.energy_margin = consts.energy - parts.energy;
  out.kinetic_margin = consts.kinetic - parts.kinetic;
  if (mu == 1) {
    out.admissible = true;
  } else {
    out.admissible = out.energy_margin > kAdmissibilityBand * consts.energy &&
                     out.kinetic_margin > kAdmissibilityBand * consts.kinetic;
  }
  return out;
}

}  // namespace cgl
