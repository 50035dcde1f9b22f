#ifndef CGL_EQUATION_HPP
#define CGL_EQUATION_HPP

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cgl/spectral_grid.hpp"

namespace cgl {

/// Selects one member of the family  v_t = e^{i theta} (Lap v - mu |v|^{2s} v).
///
/// In d = 3, 4 the power is energy-critical: f(v) = |v|^{4/(d-2)} v, i.e.
/// quintic in d = 3 and cubic in d = 4. In d = 1, 2 the critical exponent is
/// undefined, so those dimensions run a non-critical smoke mode with the odd
/// power `smoke_power` (3 or 5).
struct EquationSpec {
  double theta = 0.0;
  int mu = 1;
  int d = 3;
  int smoke_power = 3;
  /// When false the flow is the linear semigroup v_t = e^{i theta} Lap v.
  bool nonlinear = true;

  /// Odd polynomial degree of f.
  int power() const;
  /// p with f(v) = |v|^{p-2} v; potential = int |v|^p.
  int potential_exponent() const { return power() + 1; }
  /// mu when the nonlinearity is active, 0 otherwise.
  double coupling() const { return nonlinear ? static_cast<double>(mu) : 0.0; }
  Complex rotation() const;
  bool is_critical() const { return d >= 3; }
  /// |theta| = pi/2 (to rounding).
  bool is_nls_endpoint() const;
  /// theta = pi/2, mu = -1, d = 4: the focusing Schrodinger setting.
  bool is_focusing_nls_setting() const;
};

/// Throws InvalidArgument when the spec is outside the supported family.
void validate(const EquationSpec& spec);

/// Zero-padding factor used when evaluating f pseudo-spectrally.
enum class DealiasFactor { none, three_halves, two, three };

int padded_size(int n, DealiasFactor factor);
double dealias_ratio(DealiasFactor factor);
/// Parses "1", "3/2", "2", "3".
std::optional<DealiasFactor> parse_dealias_factor(const std::string& text);
std::string to_string(DealiasFactor factor);
/// Smallest listed factor that makes the product of f exact: 2 for cubic,
/// 3 for quintic.
DealiasFactor exact_dealias_factor(const EquationSpec& spec);

/// Pseudo-spectral evaluation of f on a zero-padded grid. Holds its scratch
/// buffers, so one instance per thread.
class Nonlinearity {
 public:
  Nonlinearity(const GridSpec& grid, const EquationSpec& spec, DealiasFactor factor);

  /// out = P f(v) in spectral form, P the truncation back to the n^d modes.
  /// Returns the padded-grid rectangle rule of int |v|^p, which equals
  /// Re <v, P f(v)> exactly.
  double apply(std::span<const Complex> coeffs, std::span<Complex> out);

  const GridSpec& grid() const { return grid_; }
  DealiasFactor factor() const { return factor_; }
  int padded_n() const { return padded_n_; }

 private:
  GridSpec grid_;
  int half_power_;  // s with f = |v|^{2s} v
  DealiasFactor factor_;
  int padded_n_;
  std::vector<std::size_t> pad_index_;
  std::vector<Complex> buffer_;
};

SpectralField nonlinearity(const SpectralField& g, const EquationSpec& spec,
                           DealiasFactor factor);
/// Pointwise f(v) after padded interpolation and truncation.
Field nonlinearity(const Field& f, const EquationSpec& spec, DealiasFactor factor);

struct EnergyParts {
  double kinetic = 0.0;    // |grad v|^2
  double potential = 0.0;  // int |v|^p
  double energy = 0.0;     // kinetic/2 + mu/p * potential
};

/// Energy functional of the spec (uses spec.mu even when the nonlinearity is
/// disabled), evaluated with the exact dealiasing factor.
EnergyParts energy_parts(const SpectralField& g, const EquationSpec& spec);
EnergyParts energy_parts(const Field& f, const EquationSpec& spec);

}  // namespace cgl

#endif  // CGL_EQUATION_HPP
