#include "cgl/spectral_grid.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "cgl/error.hpp"
#include "cgl/fft.hpp"
#include "grid_loops.hpp"

namespace cgl {

std::size_t GridSpec::size() const {
  std::size_t total = 1;
  for (int a = 0; a < d; ++a) total *= static_cast<std::size_t>(n);
  return total;
}

double GridSpec::cell_volume() const { return std::pow(dx(), d); }

double GridSpec::box_volume() const { return std::pow(L, d); }

GridSpec make_grid(int d, int n, double L) {
  if (d < 1 || d > 4)
    throw InvalidArgument("dimension out of range: d = " + std::to_string(d) +
                          " (expected 1..4)");
  if (n < 8 || (n & (n - 1)) != 0)
    throw InvalidArgument("points per axis must be a power of two >= 8, got " +
                          std::to_string(n));
  if (!(L > 0.0) || !std::isfinite(L))
    throw InvalidArgument("box length must be positive and finite");
  return GridSpec{d, n, L};
}

std::array<int, 4> unflatten(const GridSpec& grid, std::size_t flat) {
  std::array<int, 4> idx{};
  for (int a = grid.d - 1; a >= 0; --a) {
    idx[a] = static_cast<int>(flat % static_cast<std::size_t>(grid.n));
    flat /= static_cast<std::size_t>(grid.n);
  }
  return idx;
}

std::array<double, 4> coordinates(const GridSpec& grid, std::size_t flat) {
  const auto idx = unflatten(grid, flat);
  std::array<double, 4> x{};
  for (int a = 0; a < grid.d; ++a) x[a] = idx[a] * grid.dx();
  return x;
}

double periodic_distance_squared(const GridSpec& grid, std::size_t flat,
                                 std::span<const double> center) {
  const auto x = coordinates(grid, flat);
  double r2 = 0.0;
  for (int a = 0; a < grid.d; ++a) {
    double delta = x[a] - center[a];
    delta -= grid.L * std::round(delta / grid.L);
    r2 += delta * delta;
  }
  return r2;
}

std::vector<double> wavenumber_squared(const GridSpec& grid) {
  std::vector<double> k2(grid.size());
  detail::for_each_mode(grid, [&](std::size_t i, double ksq) { k2[i] = ksq; });
  return k2;
}

// --- Field -----------------------------------------------------------------

namespace {

bool finite_span(std::span<const Complex> values) {
  for (const auto& v : values)
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
  return true;
}

void require_same_grid(const GridSpec& a, const GridSpec& b) {
  if (!(a == b)) throw InvalidArgument("fields live on different grids");
}

}  // namespace

Field::Field(const GridSpec& grid) : grid_(grid), values_(grid.size()) {}

Field::Field(const GridSpec& grid, std::vector<Complex> values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.size())
    throw InvalidArgument("field has " + std::to_string(values_.size()) +
                          " samples, grid needs " + std::to_string(grid_.size()));
  if (!all_finite()) throw InvalidArgument("field contains non-finite samples");
}

bool Field::all_finite() const { return finite_span(values_); }

Field& Field::operator+=(const Field& other) {
  require_same_grid(grid_, other.grid_);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
  return *this;
}

Field& Field::operator-=(const Field& other) {
  require_same_grid(grid_, other.grid_);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= other.values_[i];
  return *this;
}

Field& Field::operator*=(Complex scale) {
  for (auto& v : values_) v *= scale;
  return *this;
}

Field operator+(Field a, const Field& b) { return a += b; }
Field operator-(Field a, const Field& b) { return a -= b; }
Field operator*(Complex scale, Field f) { return f *= scale; }

SpectralField::SpectralField(const GridSpec& grid) : grid_(grid), coeffs_(grid.size()) {}

SpectralField::SpectralField(const GridSpec& grid, std::vector<Complex> coeffs)
    : grid_(grid), coeffs_(std::move(coeffs)) {
  if (coeffs_.size() != grid_.size())
    throw InvalidArgument("spectral field size does not match its grid");
}

bool SpectralField::all_finite() const { return finite_span(coeffs_); }

// --- transforms --------------------------------------------------------------

SpectralField to_spectral(const Field& f) {
  if (!f.all_finite()) throw InvalidArgument("to_spectral: non-finite input samples");
  const auto& grid = f.grid();
  std::vector<Complex> coeffs(f.values().begin(), f.values().end());
  detail::fft_inplace(coeffs, grid.d, grid.n, detail::FftDirection::forward);
  const double scale = 1.0 / static_cast<double>(grid.size());
  for (auto& c : coeffs) c *= scale;
  return SpectralField(grid, std::move(coeffs));
}

Field from_spectral(const SpectralField& g) {
  if (!g.all_finite()) throw InvalidArgument("from_spectral: non-finite coefficients");
  const auto& grid = g.grid();
  std::vector<Complex> values(g.coeffs().begin(), g.coeffs().end());
  detail::fft_inplace(values, grid.d, grid.n, detail::FftDirection::backward);
  return Field(grid, std::move(values));
}

SpectralField apply_laplacian(const SpectralField& g) {
  SpectralField out(g.grid());
  detail::for_each_mode(g.grid(), [&](std::size_t i, double k2) { out[i] = -k2 * g[i]; });
  return out;
}

SobolevNorms sobolev_norms(const SpectralField& g) {
  double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
  detail::for_each_mode(g.grid(), [&](std::size_t i, double k2) {
    const double a = std::norm(g[i]);
    s0 += a;
    s1 += k2 * a;
    s2 += k2 * k2 * a;
    s3 += k2 * k2 * k2 * a;
  });
  const double vol = g.grid().box_volume();
  SobolevNorms out;
  out.l2 = std::sqrt(vol * s0);
  out.grad_l2 = std::sqrt(vol * s1);
  out.h1 = std::sqrt(vol * (s0 + s1));
  out.h2 = std::sqrt(vol * (s0 + s2));
  out.h3 = std::sqrt(vol * (s0 + s3));
  return out;
}

SobolevNorms sobolev_norms(const Field& f) { return sobolev_norms(to_spectral(f)); }

double lp_norm(const Field& f, double p) {
  if (!(p >= 1.0)) throw InvalidArgument("lp_norm: exponent must be >= 1");
  double sum = 0.0;
  for (const auto& v : f.values()) sum += std::pow(std::abs(v), p);
  return std::pow(sum * f.grid().cell_volume(), 1.0 / p);
}

}  // namespace cgl
