#ifndef CGL_CONFIG_HPP
#define CGL_CONFIG_HPP

#include <optional>
#include <string>
#include <vector>

#include "cgl/equation.hpp"
#include "cgl/error.hpp"
#include "cgl/limits.hpp"
#include "cgl/semiflow.hpp"
#include "cgl/spectral_grid.hpp"

namespace cgl {

/// Parse failure carrying the offending key and 1-based line (0 when the
/// problem is not tied to a line).
class ConfigError : public InvalidArgument {
 public:
  ConfigError(std::string key, int line, const std::string& what);
  const std::string& key() const { return key_; }
  int line() const { return line_; }

 private:
  std::string key_;
  int line_;
};

/// Run configuration with every default applied.
///
/// `dt = 0` and an unset dealias factor mean "choose automatically"; both
/// resolve deterministically, so the echo reproduces a run exactly.
struct Config {
  int d = 4;
  int n = 16;
  double L = 40.0;
  double theta = 0.2;
  int mu = 1;
  double T = 1.0;
  double dt = 0.0;
  std::optional<DealiasFactor> dealias;
  std::optional<int> sample_stride;
  double coefficient_switch_radius = 2.0;
  bool nonlinear = true;
  int smoke_power = 3;

  DataDescriptor data;
  /// Unset means no perturbation.
  std::optional<DataKind> perturbation_kind;
  double perturbation_eps = 0.0;
  double perturbation_sigma = 1.0;
  std::vector<double> perturbation_center;
  std::vector<int> perturbation_modes;

  std::vector<double> sweep_thetas;
  std::optional<SweepMode> sweep_mode;

  std::string output_dir = "out";
  bool snapshots = false;
  int threads = 1;
  bool exploratory = false;
  bool override_admissibility = false;
  double check_tolerance = 1e-5;
};

/// Flat `key = value` lines; `#` starts a comment. Unknown or repeated keys,
/// malformed values and constraint violations throw ConfigError.
Config parse_config(const std::string& text);
Config load_config(const std::string& path);

/// Every key in a fixed order, doubles to 17 significant digits. Parsing the
/// result gives back an identical Config.
std::string format_config(const Config& cfg);

/// All recognised keys in echo order.
const std::vector<std::string>& config_keys();

GridSpec grid_of(const Config& cfg);
EquationSpec equation_of(const Config& cfg);
/// Sample stride falls back to `default_stride` when the key is absent.
StepperConfig stepper_of(const Config& cfg, int default_stride = 10);
PairRunConfig pair_config_of(const Config& cfg, LimitTarget target, int default_stride = 5);

}  // namespace cgl

#endif  // CGL_CONFIG_HPP
