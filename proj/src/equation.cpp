#include "cgl/equation.hpp"

#include <cmath>
#include <numbers>

#include "cgl/error.hpp"
#include "cgl/fft.hpp"
#include "grid_loops.hpp"

namespace cgl {
namespace {

constexpr double kAngleSlack = 1e-12;

}  // namespace

int EquationSpec::power() const {
  switch (d) {
    case 3: return 5;
    case 4: return 3;
    default: return smoke_power;
  }
}

Complex EquationSpec::rotation() const { return std::polar(1.0, theta); }

bool EquationSpec::is_nls_endpoint() const {
  return std::abs(std::abs(theta) - std::numbers::pi / 2) <= kAngleSlack;
}

bool EquationSpec::is_focusing_nls_setting() const {
  return is_nls_endpoint() && theta > 0 && mu == -1 && d == 4;
}

void validate(const EquationSpec& spec) {
  if (spec.d < 1 || spec.d > 4)
    throw InvalidArgument("equation dimension must be in 1..4");
  if (spec.mu != 1 && spec.mu != -1) throw InvalidArgument("mu must be +1 or -1");
  if (!std::isfinite(spec.theta) ||
      std::abs(spec.theta) > std::numbers::pi / 2 + kAngleSlack)
    throw InvalidArgument("theta must lie in [-pi/2, pi/2]");
  if (spec.d < 3 && spec.smoke_power != 3 && spec.smoke_power != 5)
    throw InvalidArgument("smoke_power must be 3 or 5");
}

int padded_size(int n, DealiasFactor factor) {
  switch (factor) {
    case DealiasFactor::none: return n;
    case DealiasFactor::three_halves: return 3 * n / 2;
    case DealiasFactor::two: return 2 * n;
    case DealiasFactor::three: return 3 * n;
  }
  return n;
}

double dealias_ratio(DealiasFactor factor) {
  return static_cast<double>(padded_size(2, factor)) / 2.0;
}

std::optional<DealiasFactor> parse_dealias_factor(const std::string& text) {
  if (text == "1") return DealiasFactor::none;
  if (text == "3/2" || text == "1.5") return DealiasFactor::three_halves;
  if (text == "2") return DealiasFactor::two;
  if (text == "3") return DealiasFactor::three;
  return std::nullopt;
}

std::string to_string(DealiasFactor factor) {
  switch (factor) {
    case DealiasFactor::none: return "1";
    case DealiasFactor::three_halves: return "3/2";
    case DealiasFactor::two: return "2";
    case DealiasFactor::three: return "3";
  }
  return "?";
}

DealiasFactor exact_dealias_factor(const EquationSpec& spec) {
  return spec.power() <= 3 ? DealiasFactor::two : DealiasFactor::three;
}

// --- Nonlinearity ----------------------------------------------------------

Nonlinearity::Nonlinearity(const GridSpec& grid, const EquationSpec& spec,
                           DealiasFactor factor)
    : grid_(grid),
      half_power_((spec.power() - 1) / 2),
      factor_(factor),
      padded_n_(padded_size(grid.n, factor)) {
  const GridSpec padded{grid.d, padded_n_, grid.L};
  buffer_.resize(padded.size());
  pad_index_.resize(grid.size());
  const auto M = static_cast<std::size_t>(padded_n_);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto idx = unflatten(grid, i);
    std::size_t flat = 0;
    for (int a = 0; a < grid.d; ++a) {
      const int m = mode_number(static_cast<std::size_t>(idx[a]), grid.n);
      flat = flat * M + static_cast<std::size_t>(m < 0 ? m + padded_n_ : m);
    }
    pad_index_[i] = flat;
  }
}

double Nonlinearity::apply(std::span<const Complex> coeffs, std::span<Complex> out) {
  std::fill(buffer_.begin(), buffer_.end(), Complex{});
  for (std::size_t i = 0; i < coeffs.size(); ++i) buffer_[pad_index_[i]] = coeffs[i];
  detail::fft_inplace(buffer_, grid_.d, padded_n_, detail::FftDirection::backward);

  double potential = 0.0;
  for (auto& v : buffer_) {
    const double a2 = std::norm(v);
    double w = 1.0;
    for (int s = 0; s < half_power_; ++s) w *= a2;
    potential += w * a2;
    v *= w;
  }
  const double padded_dx = grid_.L / padded_n_;
  potential *= std::pow(padded_dx, grid_.d);

  detail::fft_inplace(buffer_, grid_.d, padded_n_, detail::FftDirection::forward);
  const double scale = 1.0 / static_cast<double>(buffer_.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = buffer_[pad_index_[i]] * scale;
  return potential;
}

SpectralField nonlinearity(const SpectralField& g, const EquationSpec& spec,
                           DealiasFactor factor) {
  Nonlinearity op(g.grid(), spec, factor);
  SpectralField out(g.grid());
  op.apply(g.coeffs(), out.coeffs());
  return out;
}

Field nonlinearity(const Field& f, const EquationSpec& spec, DealiasFactor factor) {
  return from_spectral(nonlinearity(to_spectral(f), spec, factor));
}

EnergyParts energy_parts(const SpectralField& g, const EquationSpec& spec) {
  EnergyParts parts;
  double s1 = 0.0;
  detail::for_each_mode(g.grid(), [&](std::size_t i, double k2) { s1 += k2 * std::norm(g[i]); });
  parts.kinetic = g.grid().box_volume() * s1;
  Nonlinearity op(g.grid(), spec, exact_dealias_factor(spec));
  std::vector<Complex> scratch(g.size());
  parts.potential = op.apply(g.coeffs(), scratch);
  parts.energy = 0.5 * parts.kinetic + spec.mu * parts.potential / spec.potential_exponent();
  return parts;
}

EnergyParts energy_parts(const Field& f, const EquationSpec& spec) {
  return energy_parts(to_spectral(f), spec);
}

}  // namespace cgl
