#include <cmath>

#include "cgl/equation.hpp"
#include "cgl/error.hpp"
#include "cgl/ground_state.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace cgl;
using cgl::test::kPi;

namespace {

// |grad W|^2 = |W|^p_p = omega_d c^{d/2} B(d/2, d/2) / 2 with c = d(d-2),
// from the substitution r^2/c = s/(1-s) in the radial integrals.
double closed_form_kinetic(int d) {
  const double omega = d == 3 ? 4 * kPi : 2 * kPi * kPi;
  const double c = d * (d - 2.0);
  return omega * std::pow(c, d / 2.0) * std::beta(d / 2.0, d / 2.0) / 2.0;
}

}  // namespace

TEST_CASE("constants match the Beta-function closed form") {
  for (int d : {3, 4}) {
    const auto k = ground_state_constants(d);
    CHECK(k.kinetic == doctest::Approx(closed_form_kinetic(d)).epsilon(1e-11));
    CHECK(k.potential == doctest::Approx(closed_form_kinetic(d)).epsilon(1e-11));
    CHECK(k.energy == doctest::Approx(closed_form_kinetic(d) / d).epsilon(1e-11));
    CHECK(k.quadrature_error < 1e-10);
  }
  CHECK(ground_state_constants(4).kinetic == doctest::Approx(32 * kPi * kPi / 3).epsilon(1e-12));
}

TEST_CASE("Pohozaev-type ratios hold to 1e-9") {
  for (int d : {3, 4}) {
    const auto& k = cached_ground_state_constants(d);
    CHECK(std::abs(k.potential / k.kinetic - 1) < 1e-9);
    CHECK(std::abs(k.energy * d / k.kinetic - 1) < 1e-9);
  }
}

TEST_CASE("a tolerance the quadrature cannot meet is reported") {
  RadialQuadrature q;
  q.tolerance = 1e-30;
  CHECK_THROWS_AS(ground_state_constants(3, q), NumericalFailure);
  CHECK_THROWS_AS(ground_state_constants(2), InvalidArgument);
  CHECK_THROWS_AS(ground_state_constants(5), InvalidArgument);
}

TEST_CASE("sampled profile values") {
  const auto grid = make_grid(3, 8, 8.0);
  const std::vector<double> c = {4, 4, 4};
  const auto w = sample_ground_state(grid, c, 1.0);
  CHECK(w[test::flat_index(grid, {4, 4, 4, 0})].real() == doctest::Approx(1.0));
  CHECK(w[test::flat_index(grid, {5, 5, 5, 0})].real() == doctest::Approx(std::sqrt(0.5)));
  // Scaling: lambda^{1/2} W(lambda x) at the centre.
  const auto w2 = sample_ground_state(grid, c, 4.0);
  CHECK(w2[test::flat_index(grid, {4, 4, 4, 0})].real() == doctest::Approx(2.0));
  // Minimum image: the centre near a corner wraps around.
  const std::vector<double> corner = {0, 0, 0};
  const auto wc = sample_ground_state(grid, corner, 1.0);
  CHECK(wc[test::flat_index(grid, {7, 0, 0, 0})].real() ==
        doctest::Approx(wc[test::flat_index(grid, {1, 0, 0, 0})].real()));
  CHECK_THROWS_AS(sample_ground_state(make_grid(2, 8, 1.0), corner, 1.0), InvalidArgument);
}

TEST_CASE("stationarity residual decreases under refinement in d = 4") {
  const double r16 = stationarity_residual(make_grid(4, 16, 40.0));
  const double r32 = stationarity_residual(make_grid(4, 32, 40.0));
  CHECK(r32 < r16);
  CHECK(r32 < 0.15);
}

TEST_CASE("stationarity residual in d = 3 at fixed point density") {
  double previous = 1e300;
  for (int k = 0; k < 3; ++k) {
    const int n = 16 << k;
    const double r = stationarity_residual(make_grid(3, n, 10.0 * (1 << k)));
    CHECK(r < previous);
    previous = r;
  }
}

TEST_CASE("under-resolved profiles are refused") {
  const auto grid = make_grid(4, 16, 40.0);
  CHECK_THROWS_AS(stationarity_residual(grid, 1.0), InvalidArgument);
  CHECK_NOTHROW(stationarity_residual(grid, 0.5));
  CHECK_THROWS_AS(stationarity_residual(Field(grid)), InvalidArgument);
}

TEST_CASE("admissibility margins") {
  const auto& k = cached_ground_state_constants(4);
  const auto grid = make_grid(4, 16, 40.0);

  const auto zero = admissibility(Field(grid), -1, k);
  CHECK(zero.admissible);
  CHECK(zero.energy_margin == doctest::Approx(k.energy));
  CHECK(zero.kinetic_margin == doctest::Approx(k.kinetic));

  CHECK_THROWS_AS(admissibility(Field(make_grid(3, 8, 10.0)), -1, k), InvalidArgument);
  CHECK(admissibility(Field(grid), 1, k).admissible);
}

TEST_CASE("box-sampled ground state sits at the threshold") {
  // Periodic truncation removes the power-law tail, so a = 1 falls a few
  // percent short of both thresholds; slightly larger amplitudes cross them.
  const auto& k = cached_ground_state_constants(3);
  const auto grid = make_grid(3, 64, 40.0);
  const std::vector<double> c(3, 20.0);
  const double lambda = kDefaultScaleSpacing / grid.dx();
  const auto w = sample_ground_state(grid, c, lambda);
  const auto at_one = admissibility(w, -1, k);
  CHECK(at_one.kinetic_margin / k.kinetic < 0.08);
  CHECK(at_one.kinetic_margin / k.kinetic > 0.0);

  auto above = w;
  above *= 1.1;
  CHECK_FALSE(admissibility(above, -1, k).admissible);
  auto below = w;
  below *= 0.8;
  CHECK(admissibility(below, -1, k).admissible);
}
