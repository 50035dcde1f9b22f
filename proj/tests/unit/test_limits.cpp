#include <cmath>

#include "cgl/error.hpp"
#include "cgl/limits.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace cgl;
using cgl::test::kPi;

namespace {

PairRunConfig smoke_pair(double theta) {
  PairRunConfig cfg;
  cfg.grid = make_grid(2, 32, 20.0);
  cfg.theta = theta;
  cfg.data.sigma = 1.2;
  cfg.T = 0.1;
  cfg.stepper.dt = 0.01;
  return cfg;
}

PairRunConfig inviscid_pair(double theta) {
  PairRunConfig cfg;
  cfg.grid = make_grid(4, 16, 40.0);
  cfg.target = LimitTarget::schrodinger;
  cfg.theta = theta;
  cfg.mu = -1;
  cfg.data.amplitude = 0.5;
  cfg.data.sigma = 2.5;
  cfg.T = 0.02;
  cfg.stepper.dt = 0.01;
  return cfg;
}

}  // namespace

TEST_CASE("gaps") {
  for (double t : {0.05, 0.4, 1.0, -0.3}) {
    CHECK(dispersion_gap(t) == doctest::Approx(2 * std::abs(std::sin(t / 2))));
    CHECK(inviscid_gap(t) == doctest::Approx(2 * std::abs(std::sin((t - kPi / 2) / 2))));
  }
  CHECK(dispersion_gap(0.0) == 0.0);
  CHECK(inviscid_gap(kPi / 2) < 1e-16);
}

TEST_CASE("initial data shapes") {
  const auto grid = make_grid(2, 32, 40.0);
  DataDescriptor g;
  g.amplitude = 0.7;
  const auto f = initial_data(g, grid);
  CHECK(f[test::flat_index(grid, {16, 16, 0, 0})].real() == doctest::Approx(0.7));
  // one grid step (1.25) from the centre with sigma = 2
  CHECK(f[test::flat_index(grid, {17, 16, 0, 0})].real() ==
        doctest::Approx(0.7 * std::exp(-1.25 * 1.25 / 4.0)));

  DataDescriptor m = g;
  m.kind = DataKind::modulated_gaussian;
  m.modes = {1, 0};
  const auto fm = initial_data(m, grid);
  const auto j = test::flat_index(grid, {18, 16, 0, 0});
  const Complex ratio = fm[j] / f[j];
  CHECK(std::abs(ratio - std::polar(1.0, 2 * kPi * 2.5 / 40.0)) < 1e-14);

  m.modes = {1};
  CHECK_THROWS_AS(initial_data(m, grid), InvalidArgument);
  DataDescriptor wide;
  wide.sigma = 20.0;
  CHECK_THROWS_AS(initial_data(wide, grid), InvalidArgument);
  DataDescriptor offset;
  offset.center = {1.0};
  CHECK_THROWS_AS(initial_data(offset, grid), InvalidArgument);
  CHECK(tail_mass_fraction(Field(grid), std::vector<double>{20, 20}) == 0.0);
}

TEST_CASE("data kind and sweep mode names round trip") {
  for (auto k : {DataKind::gaussian, DataKind::modulated_gaussian, DataKind::scaled_ground_state})
    CHECK(parse_data_kind(to_string(k)) == k);
  for (auto m : {SweepMode::dispersion, SweepMode::inviscid}) CHECK(parse_sweep_mode(to_string(m)) == m);
  CHECK_FALSE(parse_data_kind("box").has_value());
}

TEST_CASE("degenerate pairs coincide") {
  const auto heat = run_zero_dispersion_pair(smoke_pair(0.0));
  CHECK(heat.sup_h1 < 1e-12);
  CHECK(heat.initial_distance == 0.0);
  CHECK(heat.times.size() == heat.h1.size());
  CHECK(heat.times.back() == doctest::Approx(0.1));

  const auto nls = run_inviscid_pair(inviscid_pair(kPi / 2));
  CHECK(nls.sup_h1 < 1e-12);
}

TEST_CASE("pair distance grows from zero away from the limit") {
  const auto r = run_zero_dispersion_pair(smoke_pair(0.3));
  CHECK(r.h1.front() == 0.0);
  CHECK(r.sup_h1 > 0.0);
  CHECK(r.sup_l2 <= r.sup_h1);
  CHECK(r.cgl.records.size() == r.times.size());
}

TEST_CASE("perturbation is injected at its requested H1 size") {
  auto cfg = smoke_pair(0.2);
  PerturbationDescriptor p;
  p.shape.kind = DataKind::modulated_gaussian;
  p.shape.modes = {2, -1};
  p.shape.sigma = 1.0;
  p.size = 0.03;
  cfg.perturbation = p;
  const auto r = run_zero_dispersion_pair(cfg);
  CHECK(std::abs(r.initial_distance - 0.03) < 1e-12 * 0.03);
  CHECK(r.h1.front() == r.initial_distance);
  CHECK(r.sup_h1 >= r.initial_distance * (1 - 1e-9));
}

TEST_CASE("time-window warning") {
  auto cfg = smoke_pair(0.2);
  PerturbationDescriptor p;
  p.shape.sigma = 1.0;
  p.size = 0.01;
  cfg.perturbation = p;
  CHECK(run_zero_dispersion_pair(cfg).warnings.size() == 1);
  cfg.perturbation->size = 1.0;
  CHECK(run_zero_dispersion_pair(cfg).warnings.empty());
  CHECK(run_zero_dispersion_pair(smoke_pair(0.2)).warnings.empty());
}

TEST_CASE("pair gates") {
  auto heat = smoke_pair(0.2);
  heat.target = LimitTarget::schrodinger;
  CHECK_THROWS_AS(run_zero_dispersion_pair(heat), InvalidArgument);
  CHECK_THROWS_AS(run_zero_dispersion_pair(smoke_pair(kPi / 2)), InvalidArgument);

  auto defocusing = inviscid_pair(1.4);
  defocusing.mu = 1;
  CHECK_THROWS_AS(run_inviscid_pair(defocusing), InvalidArgument);
  defocusing.exploratory = true;
  CHECK_NOTHROW(run_inviscid_pair(defocusing));
  CHECK_THROWS_AS(run_inviscid_pair(inviscid_pair(-0.2)), InvalidArgument);

  auto heavy = inviscid_pair(1.4);
  heavy.data.amplitude = 2.0;
  CHECK_THROWS_AS(run_inviscid_pair(heavy), AdmissibilityError);
}

TEST_CASE("power-law fits") {
  const std::vector<double> g = {0.05, 0.1, 0.2, 0.4};
  std::vector<double> v;
  for (double x : g) v.push_back(2 * x);
  auto fit = fit_power_law(g, v);
  CHECK(fit.slope == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(fit.constant == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(fit.residual < 1e-12);

  v.clear();
  for (double x : g) v.push_back(3 * x * x);
  CHECK(fit_power_law(g, v).slope == doctest::Approx(2.0).epsilon(1e-12));

  CHECK_THROWS_AS(fit_power_law(std::vector<double>{0.1}, std::vector<double>{0.1}), InvalidArgument);
  CHECK_THROWS_AS(fit_power_law(std::vector<double>{0.1, 0.1}, std::vector<double>{1, 2}),
                  InvalidArgument);
  CHECK_THROWS_AS(fit_power_law(std::vector<double>{0.1, 0.2}, std::vector<double>{0, 2}),
                  InvalidArgument);
}

TEST_CASE("leave-one-out constants of exact data coincide") {
  std::vector<SweepPoint> pts;
  for (double t : {0.4, 0.2, 0.1}) pts.push_back({t, dispersion_gap(t), 1.5 * dispersion_gap(t), 0});
  const auto sweep = fit_sweep(SweepMode::dispersion, pts);
  for (double c : leave_one_out_constants(sweep)) CHECK(c == doctest::Approx(1.5).epsilon(1e-12));
  pts.pop_back();
  CHECK_THROWS_AS(leave_one_out_constants(fit_sweep(SweepMode::dispersion, pts)), InvalidArgument);
}

TEST_CASE("sweeps are independent of the thread count") {
  const std::vector<double> thetas = {0.3, 0.2, 0.1};
  const auto serial = sweep_and_fit(smoke_pair(0.0), thetas, SweepMode::dispersion, 1);
  const auto parallel = sweep_and_fit(smoke_pair(0.0), thetas, SweepMode::dispersion, 3);
  REQUIRE(serial.points.size() == 3);
  REQUIRE(serial.members.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(serial.points[i].theta == thetas[i]);
    CHECK(serial.points[i].sup_h1 == parallel.points[i].sup_h1);
    CHECK(serial.members[i].h1 == parallel.members[i].h1);
  }
  CHECK(serial.points[0].sup_h1 > serial.points[1].sup_h1);
  CHECK(serial.points[1].sup_h1 > serial.points[2].sup_h1);
  CHECK_THROWS_AS(sweep_and_fit(smoke_pair(0.0), std::vector<double>{0.1, 0.2},
                                SweepMode::dispersion),
                  InvalidArgument);
}
