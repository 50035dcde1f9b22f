#include "cgl/diagnostics.hpp"

#include <algorithm>
#include <cmath>

#include "cgl/error.hpp"
#include "grid_loops.hpp"

namespace cgl {

std::string to_string(RunStatus status) {
  switch (status) {
    case RunStatus::completed: return "completed";
    case RunStatus::instability: return "instability";
    case RunStatus::threshold_exit: return "threshold exit";
  }
  return "unknown";
}

DiagnosticRecord record(const SpectralField& g, const EquationSpec& spec, double t,
                        Nonlinearity& op) {
  const auto& grid = g.grid();
  std::vector<Complex> pf(g.size());
  const double potential = op.apply(g.coeffs(), pf);
  const double mu = spec.coupling();

  double s0 = 0, s1 = 0, s2 = 0, s3 = 0, hi = 0, cross = 0, flow = 0;
  detail::for_each_mode(grid, [&](std::size_t i, double k2) {
    const double a = std::norm(g[i]);
    s0 += a;
    s1 += k2 * a;
    s2 += k2 * k2 * a;
    s3 += k2 * k2 * k2 * a;
    const Complex lap = -k2 * g[i];
    hi += std::norm(pf[i]);
    cross += (std::conj(pf[i]) * lap).real();
    flow += std::norm(lap - mu * pf[i]);
  });
  const double vol = grid.box_volume();

  DiagnosticRecord r;
  r.t = t;
  r.mass = vol * s0;
  r.kinetic = vol * s1;
  r.potential = potential;
  r.energy = 0.5 * r.kinetic + mu * potential / spec.potential_exponent();
  r.hi_potential = vol * hi;
  r.lap = vol * s2;
  r.cross = vol * cross;
  r.grad_flow_sq = vol * flow;
  r.h2 = std::sqrt(vol * (s0 + s2));
  r.h3 = std::sqrt(vol * (s0 + s3));

  const double fields[] = {r.mass, r.kinetic, r.potential, r.energy, r.hi_potential,
                           r.lap,  r.cross,   r.grad_flow_sq, r.h2, r.h3};
  for (double v : fields)
    if (!std::isfinite(v)) throw NumericalFailure("non-finite diagnostic record at t = " +
                                                  std::to_string(t));
  return r;
}

DiagnosticRecord record(const SpectralField& g, const EquationSpec& spec, double t,
                        DealiasFactor factor) {
  Nonlinearity op(g.grid(), spec, factor);
  return record(g, spec, t, op);
}

DiagnosticRecord record(const Field& f, const EquationSpec& spec, double t) {
  return record(to_spectral(f), spec, t, exact_dealias_factor(spec));
}

RecordConsistency record_consistency(const DiagnosticRecord& r, const EquationSpec& spec) {
  const double mu = spec.coupling();
  auto rel = [](double a, double b) {
    const double scale = std::max({std::abs(a), std::abs(b), 1e-300});
    return std::abs(a - b) / scale;
  };
  RecordConsistency out;
  out.energy = rel(r.energy, 0.5 * r.kinetic + mu * r.potential / spec.potential_exponent());
  const double expansion = r.lap - 2.0 * mu * r.cross + mu * mu * r.hi_potential;
  // The expansion can cancel; measure against the size of its terms.
  const double terms = r.lap + 2.0 * std::abs(r.cross) + r.hi_potential;
  out.expansion = terms > 0 ? std::abs(r.grad_flow_sq - expansion) / terms : 0.0;
  return out;
}

namespace {

void require_records(const Trajectory& traj, std::size_t count) {
  if (traj.records.size() < count)
    throw InvalidArgument("trajectory needs at least " + std::to_string(count) +
                          " records, has " + std::to_string(traj.records.size()));
}

template <class Quantity, class Flux>
ResidualSeries balance_residual(const Trajectory& traj, double normalizer,
                                Quantity quantity, Flux flux) {
  ResidualSeries out;
  const double scale = std::max(normalizer, kResidualFloor);
  const auto& rec = traj.records;
  out.values.reserve(rec.size() - 1);
  for (std::size_t i = 0; i + 1 < rec.size(); ++i) {
    const double h = rec[i + 1].t - rec[i].t;
    const double integral = 0.5 * h * (flux(rec[i]) + flux(rec[i + 1]));
    const double r = (quantity(rec[i + 1]) - quantity(rec[i]) + integral) / scale;
    out.values.push_back(r);
    out.max_abs = std::max(out.max_abs, std::abs(r));
  }
  return out;
}

}  // namespace

ResidualSeries mass_balance_residual(const Trajectory& traj) {
  require_records(traj, 3);
  const double c = std::cos(traj.spec.theta);
  const double mu = traj.spec.coupling();
  return balance_residual(
      traj, traj.records.front().mass, [](const DiagnosticRecord& r) { return r.mass; },
      [&](const DiagnosticRecord& r) { return 2.0 * c * (r.kinetic + mu * r.potential); });
}

ResidualSeries energy_balance_residual(const Trajectory& traj) {
  require_records(traj, 3);
  const double c = std::cos(traj.spec.theta);
  return balance_residual(
      traj, std::abs(traj.records.front().energy),
      [](const DiagnosticRecord& r) { return r.energy; },
      [&](const DiagnosticRecord& r) { return c * r.grad_flow_sq; });
}

double s_norm(const Trajectory& traj, double t1, double t2) {
  require_records(traj, 1);
  const auto& rec = traj.records;
  const double slack = 1e-12 * std::max(1.0, std::abs(rec.back().t));
  if (t1 > t2 || t1 < rec.front().t - slack || t2 > rec.back().t + slack)
    throw InvalidArgument("s_norm interval lies outside the recorded range");
  t1 = std::max(t1, rec.front().t);
  t2 = std::min(t2, rec.back().t);

  auto value_at = [&](double t) {
    auto it = std::lower_bound(rec.begin(), rec.end(), t,
                               [](const DiagnosticRecord& r, double s) { return r.t < s; });
    if (it == rec.begin()) return it->hi_potential;
    if (it == rec.end()) return rec.back().hi_potential;
    const auto& b = *it;
    const auto& a = *(it - 1);
    const double w = (t - a.t) / (b.t - a.t);
    return (1 - w) * a.hi_potential + w * b.hi_potential;
  };

  double integral = 0.0;
  double prev_t = t1;
  double prev_v = value_at(t1);
  for (const auto& r : rec) {
    if (r.t <= t1) continue;
    if (r.t >= t2) break;
    integral += 0.5 * (r.t - prev_t) * (prev_v + r.hi_potential);
    prev_t = r.t;
    prev_v = r.hi_potential;
  }
  integral += 0.5 * (t2 - prev_t) * (prev_v + value_at(t2));

  const int p = traj.spec.potential_exponent();
  return std::pow(integral, 1.0 / (2.0 * (p - 1)));
}

double h1_distance(const Field& a, const Field& b) {
  if (!(a.grid() == b.grid())) throw InvalidArgument("h1_distance: grid mismatch");
  return sobolev_norms(a - b).h1;
}

TrappingReport energy_trapping_monitor(const Trajectory& traj,
                                       const GroundStateConstants& consts) {
  if (traj.spec.mu != -1)
    throw InvalidArgument("energy trapping monitor applies to focusing trajectories");
  if (consts.d != traj.spec.d)
    throw InvalidArgument("energy trapping monitor: constants dimension mismatch");

  TrappingReport out;
  for (const auto& r : traj.records) {
    const double ratio = r.kinetic / consts.kinetic;
    out.max_kinetic_ratio = std::max(out.max_kinetic_ratio, ratio);
    if (ratio >= 1.0) out.violated = true;
    if (r.kinetic > 0.0) {
      out.applicable = true;
      const double er = r.energy / r.kinetic;
      out.min_energy_ratio = out.min_energy_ratio ? std::min(*out.min_energy_ratio, er) : er;
      out.max_energy_ratio = out.max_energy_ratio ? std::max(*out.max_energy_ratio, er) : er;
    }
  }
  return out;
}

}  // namespace cgl
