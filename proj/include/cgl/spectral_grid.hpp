#ifndef CGL_SPECTRAL_GRID_HPP
#define CGL_SPECTRAL_GRID_HPP

#include <array>
#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace cgl {

using Complex = std::complex<double>;

/// Periodic box [0, L)^d sampled with n points per axis.
struct GridSpec {
  int d = 1;
  int n = 8;
  double L = 1.0;

  double dx() const { return L / n; }
  std::size_t size() const;
  double cell_volume() const;
  double box_volume() const;

  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

/// Validated constructor; throws InvalidArgument for d outside 1..4, n not a
/// power of two or below 8, and L <= 0.
GridSpec make_grid(int d, int n, double L);

/// Signed mode number of FFT index j on an axis with n points: j for j < n/2,
/// j - n otherwise.
constexpr int mode_number(std::size_t j, int n) {
  const int jj = static_cast<int>(j);
  return jj < n / 2 ? jj : jj - n;
}

/// Per-axis indices of a row-major flat index.
std::array<int, 4> unflatten(const GridSpec& grid, std::size_t flat);

/// Physical coordinates x_a = j_a * dx of a flat index.
std::array<double, 4> coordinates(const GridSpec& grid, std::size_t flat);

/// Squared minimum-image distance between a grid point and `center`.
double periodic_distance_squared(const GridSpec& grid, std::size_t flat,
                                 std::span<const double> center);

/// |k|^2 for every mode in FFT storage order.
std::vector<double> wavenumber_squared(const GridSpec& grid);

/// Complex samples on the grid, row-major over axes.
class Field {
 public:
  explicit Field(const GridSpec& grid);
  /// Throws InvalidArgument on a size mismatch or non-finite entries.
  Field(const GridSpec& grid, std::vector<Complex> values);

  const GridSpec& grid() const { return grid_; }
  std::span<const Complex> values() const { return values_; }
  std::span<Complex> values() { return values_; }
  std::size_t size() const { return values_.size(); }

  Complex& operator[](std::size_t i) { return values_[i]; }
  const Complex& operator[](std::size_t i) const { return values_[i]; }

  bool all_finite() const;

  Field& operator+=(const Field& other);
  Field& operator-=(const Field& other);
  Field& operator*=(Complex scale);

 private:
  GridSpec grid_;
  std::vector<Complex> values_;
};

Field operator+(Field a, const Field& b);
Field operator-(Field a, const Field& b);
Field operator*(Complex scale, Field f);

/// Fourier coefficients c_m with f(x) = sum_m c_m exp(i k_m . x), stored in
/// FFT order (index j <-> mode mode_number(j, n) on every axis).
class SpectralField {
 public:
  explicit SpectralField(const GridSpec& grid);
  SpectralField(const GridSpec& grid, std::vector<Complex> coeffs);

  const GridSpec& grid() const { return grid_; }
  std::span<const Complex> coeffs() const { return coeffs_; }
  std::span<Complex> coeffs() { return coeffs_; }
  std::size_t size() const { return coeffs_.size(); }

  Complex& operator[](std::size_t i) { return coeffs_[i]; }
  const Complex& operator[](std::size_t i) const { return coeffs_[i]; }

  bool all_finite() const;

 private:
  GridSpec grid_;
  std::vector<Complex> coeffs_;
};

/// Throws InvalidArgument when the field holds non-finite samples.
SpectralField to_spectral(const Field& f);
Field from_spectral(const SpectralField& g);

/// Multiplies mode m by -|k_m|^2. The Nyquist mode keeps its |k|^2.
SpectralField apply_laplacian(const SpectralField& g);

struct SobolevNorms {
  double l2 = 0.0;
  double grad_l2 = 0.0;
  double h1 = 0.0;
  double h2 = 0.0;
  double h3 = 0.0;
};

/// h1^2 = l2^2 + |grad f|^2, h2^2 = l2^2 + |Lap f|^2, h3^2 = l2^2 + sum |k|^6 |c|^2 L^d.
SobolevNorms sobolev_norms(const SpectralField& g);
SobolevNorms sobolev_norms(const Field& f);

/// Rectangle-rule (sum |f|^p dx^d)^(1/p); throws for p < 1.
double lp_norm(const Field& f, double p);

}  // namespace cgl

#endif  // CGL_SPECTRAL_GRID_HPP
