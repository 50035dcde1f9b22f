#include "cgl/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

namespace cgl {

ConfigError::ConfigError(std::string key, int line, const std::string& what)
    : InvalidArgument((line > 0 ? "line " + std::to_string(line) + ": " : std::string()) +
                      "key '" + key + "': " + what),
      key_(std::move(key)),
      line_(line) {}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> items;
  if (trim(value).empty()) return items;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) items.push_back(trim(item));
  return items;
}

struct Ctx {
  std::string key;
  int line;
  [[noreturn]] void fail(const std::string& what) const { throw ConfigError(key, line, what); }
};

double to_double(const std::string& text, const Ctx& ctx) {
  double v = 0.0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end || text.empty() || !std::isfinite(v))
    ctx.fail("expected a finite number, got '" + text + "'");
  return v;
}

int to_int(const std::string& text, const Ctx& ctx) {
  int v = 0;
  const char* begin = text.data();
  if (!text.empty() && text[0] == '+') ++begin;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc() || ptr != end || text.empty())
    ctx.fail("expected an integer, got '" + text + "'");
  return v;
}

bool to_bool(const std::string& text, const Ctx& ctx) {
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  ctx.fail("expected true or false, got '" + text + "'");
}

std::vector<double> to_doubles(const std::string& text, const Ctx& ctx) {
  std::vector<double> out;
  for (const auto& item : split_list(text)) out.push_back(to_double(item, ctx));
  return out;
}

std::vector<int> to_ints(const std::string& text, const Ctx& ctx) {
  std::vector<int> out;
  for (const auto& item : split_list(text)) out.push_back(to_int(item, ctx));
  return out;
}

void require(bool ok, const Ctx& ctx, const std::string& what) {
  if (!ok) ctx.fail(what);
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

template <class T>
std::string join(const std::vector<T>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ", ";
    if constexpr (std::is_same_v<T, double>)
      out += fmt(values[i]);
    else
      out += std::to_string(values[i]);
  }
  return out;
}

std::string fmt_bool(bool b) { return b ? "true" : "false"; }

struct Key {
  std::string name;
  std::function<void(Config&, const std::string&, const Ctx&)> set;
  std::function<std::string(const Config&)> get;
};

const std::vector<Key>& key_table() {
  static const std::vector<Key> table = [] {
    std::vector<Key> t;
    t.push_back({"d",
                 [](Config& c, const std::string& v, const Ctx& x) {
                   c.d = to_int(v, x);
                   require(c.d >= 1 && c.d <= 4, x, "d must be in 1..4, got " + v);
                 },
                 [](const Config& c) { return std::to_string(c.d); }});
    t.push_back({"n",
                 [](Config& c, const std::string& v, const Ctx& x) {
                   c.n = to_int(v, x);
                   require(c.n >= 8 && (c.n & (c.n - 1)) == 0, x,
                           "n must be a power of two >= 8, got " + v);
                 },
                 [](const Config& c) { return std::to_string(c.n); }});
    t.push_back({"L",
                 [](Config& c, const std::string& v, const Ctx& x) {
                   c.L = to_double(v, x);
                   require(c.L > 0, x, "L must be positive");
                 },
                 [](const Config& c) { return fmt(c.L); }});
    t.push_back({"theta",
                 [](Config& c, const std::string& v, const Ctx& x) {
                   c.theta = to_double(v, x);
                   require(std::abs(c.theta) <= std::numbers::pi / 2 + 1e-12, x,
                           "theta must lie in [-pi/2, pi/2]");
                 },
                 [](const Config& c) { return fmt(c.theta); }});
    t.push_back({"mu",
                 [](Config& c, const std::string& v, const Ctx& x) {
                   c.mu = to_int(v, x);
                   require(c.mu == 1 || c.mu == -1, x, "mu must be +1 or -1");
                 },
                 [](const Config& c) { return std::to_string(c.mu); }});
    t.push_back({"T",
                 [](Config& c, const std::string& v, const Ctx& x) {
                   c.T = to_double(v, x);
                   require(c.T > 0, x, "T must be positive");
                 },
                 [](const Config& c) { return fmt(c.T); }});
    t.push_back({"dt",
                 [](Config& c, const std::string& v, const Ctx& x) {
                   c.dt = v == "auto" ? 0.0 : to_double(v, x);
                   require(c.dt >= 0, x, "dt must be positive or auto");
                 },
                 [](const Config& c) { return c.dt == 0.0 ? std::string("auto") : fmt(c.dt); }});
    t.push_back({"dealias_factor",
                 [](Config& c, const std::string& v, const Ctx& x) {
                   if (v == "auto") {
                     c.dealias.reset();
                     return;
                   }
                   c.dealias = parse_dealias_factor(v);
                   require(c.dealias.has_value(), x, "dealias_factor must be 1, 3/2, 2, 3 or auto");
                 },
                 [](const Config& c) {
                   return c.dealias ? to_string(*c.dealias) : std::string("auto");
                 }});
    t.push_back({"sample_stride",
                 [](Config& c, const std::string& v, const Ctx& x) {
                   if (v == "auto") {
                     c.sample_stride.reset();
                     return;
                   }
                   c.sample_stride = to_int(v, x);
                   require(*c.sample_stride >= 1, x, "sample_stride must be >= 1");
                 },
                 [](const Config& c) {
                   return c.sample_stride ? std::to_string(*c.sample_stride) : std::string("auto");
                 }});
    t.push_back({"coefficient_switch_radius",
                 [](Config& c, const std::string& v, const Ctx& x) {
                   c.coefficient_switch_radius = to_double(v, x);
                   require(c.coefficient_switch_radius > 0, x, "switch radius must be positive");
                 },
                 [](const Config& c) { return fmt(c.coefficient_switch_radius); }});
    t.push_back({"nonlinear",
                 [](Config& c, const std::string& v, const Ctx& x) { c.nonlinear = to_bool(v, x); },
                 [](const Config& c) { return fmt_bool(c.nonlinear); }});
    t.push_back({"smoke_power",
                 [](Config& c, const std::string& v, const Ctx& x) {
                   c.smoke_power = to_int(v, x);
                   require(c.smoke_power == 3 || c.smoke_power == 5, x, "smoke_power must be 3 or 5");
                 },
                 [](const Config& c) { return std::to_string(c.smoke_power); }});
    t.push_back({"data.kind",
                 [](Config& c, const std::string& v, const Ctx& x) {
                   auto k = parse_data_kind(v);
                   require(k.has_value(), x,
                           "expected gaussian, modulated_gaussian or scaled_ground_state");
                   c.data.kind = *k;
                 },
                 [](const Config& c) { return to_string(c.data.kind); }});
    t.push_back({"data.a",
                 [](Config& c, const std::string& v, const Ctx& x) { c.data.amplitude = to_double(v, x); },
                 [](const Config& c) { return fmt(c.data.amplitude); }});
    t.push_back({"data.c",
                 [](Config& c, const std::string& v, const Ctx& x) { c.data.center = to_doubles(v, x); },
                 [](const Config& c) { return join(c.data.center); }});
    t.push_back({"data.sigma",
                 [](Config& c, const std::string& v, const Ctx& x) {
                   c.data.sigma = to_double(v, x);
                   require(c.data.sigma > 0, x, "data.sigma must be positive");
                 },
                 [](const Config& c) { return fmt(c.data.sigma); }});
    t.push_back({"data.lambda",
                 [](Config& c, const std::string& v, const Ctx& x) {
                   c.data.scale = to_double(v, x);
                   require(c.data.scale > 0, x, "data.lambda must be positive");
                 },
                 [](const Config& c) { return fmt(c.data.scale); }});
    t.push_back({"data.m",
                 [](Config& c, const std::string& v, const Ctx& x) { c.data.modes = to_ints(v, x); },
                 [](const Config& c) { return join(c.data.modes); }});
    t.push_back({"perturbation.kind",
                 [](Config& c, const std::string& v, const Ctx& x) {
                   if (v == "none") {
                     c.perturbation_kind.reset();
                     return;
                   }
                   auto k = parse_data_kind(v);
                   require(k == DataKind::gaussian || k == DataKind::modulated_gaussian, x,
                           "expected none, gaussian or modulated_gaussian");
                   c.perturbation_kind = *k;
                 },
                 [](const Config& c) {
                   return c.perturbation_kind ? to_string(*c.perturbation_kind) : std::string("none");
                 }});
    t.push_back({"perturbation.eps",
                 [](Config& c, const std::string& v, const Ctx& x) {
                   c.perturbation_eps = to_double(v, x);
                   require(c.perturbation_eps >= 0, x, "perturbation.eps must be >= 0");
                 },
                 [](const Config& c) { return fmt(c.perturbation_eps); }});
    t.push_back({"perturbation.sigma",
                 [](Config& c, const std::string& v, const Ctx& x) {
                   c.perturbation_sigma = to_double(v, x);
                   require(c.perturbation_sigma > 0, x, "perturbation.sigma must be positive");
                 },
                 [](const Config& c) { return fmt(c.perturbation_sigma); }});
    t.push_back({"perturbation.c",
                 [](Config& c, const std::string& v, const Ctx& x) {
                   c.perturbation_center = to_doubles(v, x);
                 },
                 [](const Config& c) { return join(c.perturbation_center); }});
    t.push_back({"perturbation.m",
                 [](Config& c, const std::string& v, const Ctx& x) {
                   c.perturbation_modes = to_ints(v, x);
                 },
                 [](const Config& c) { return join(c.perturbation_modes); }});
    t.push_back({"sweep.thetas",
                 [](Config& c, const std::string& v, const Ctx& x) { c.sweep_thetas = to_doubles(v, x); },
                 [](const Config& c) { return join(c.sweep_thetas); }});
    t.push_back({"sweep.mode",
                 [](Config& c, const std::string& v, const Ctx& x) {
                   if (v == "auto") {
                     c.sweep_mode.reset();
                     return;
                   }
                   c.sweep_mode = parse_sweep_mode(v);
                   require(c.sweep_mode.has_value(), x, "expected dispersion, inviscid or auto");
                 },
                 [](const Config& c) {
                   return c.sweep_mode ? to_string(*c.sweep_mode) : std::string("auto");
                 }});
    t.push_back({"output.dir",
                 [](Config& c, const std::string& v, const Ctx& x) {
                   require(!v.empty(), x, "output.dir must not be empty");
                   c.output_dir = v;
                 },
                 [](const Config& c) { return c.output_dir; }});
    t.push_back({"snapshots.enabled",
                 [](Config& c, const std::string& v, const Ctx& x) { c.snapshots = to_bool(v, x); },
                 [](const Config& c) { return fmt_bool(c.snapshots); }});
    t.push_back({"threads",
                 [](Config& c, const std::string& v, const Ctx& x) {
                   c.threads = to_int(v, x);
                   require(c.threads >= 1, x, "threads must be >= 1");
                 },
                 [](const Config& c) { return std::to_string(c.threads); }});
    t.push_back({"exploratory",
                 [](Config& c, const std::string& v, const Ctx& x) { c.exploratory = to_bool(v, x); },
                 [](const Config& c) { return fmt_bool(c.exploratory); }});
    t.push_back({"override_admissibility",
                 [](Config& c, const std::string& v, const Ctx& x) {
                   c.override_admissibility = to_bool(v, x);
                 },
                 [](const Config& c) { return fmt_bool(c.override_admissibility); }});
    t.push_back({"check.tolerance",
                 [](Config& c, const std::string& v, const Ctx& x) {
                   c.check_tolerance = to_double(v, x);
                   require(c.check_tolerance > 0, x, "check.tolerance must be positive");
                 },
                 [](const Config& c) { return fmt(c.check_tolerance); }});
    return t;
  }();
  return table;
}

}  // namespace

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    for (const auto& e : key_table()) k.push_back(e.name);
    return k;
  }();
  return keys;
}

Config parse_config(const std::string& text) {
  std::map<std::string, const Key*> index;
  for (const auto& e : key_table()) index[e.name] = &e;

  Config cfg;
  std::set<std::string> seen;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    if (const auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    const std::string body = trim(raw);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) throw ConfigError(body, line, "expected 'key = value'");
    const std::string key = trim(body.substr(0, eq));
    const std::string value = trim(body.substr(eq + 1));
    const auto it = index.find(key);
    if (it == index.end()) throw ConfigError(key, line, "unknown key");
    if (!seen.insert(key).second) throw ConfigError(key, line, "key given twice");
    it->second->set(cfg, value, Ctx{key, line});
  }

  auto check_length = [&](const std::string& key, std::size_t size) {
    if (size != 0 && size != static_cast<std::size_t>(cfg.d))
      throw ConfigError(key, 0, "needs " + std::to_string(cfg.d) + " entries (one per axis)");
  };
  check_length("data.c", cfg.data.center.size());
  check_length("data.m", cfg.data.modes.size());
  check_length("perturbation.c", cfg.perturbation_center.size());
  check_length("perturbation.m", cfg.perturbation_modes.size());
  if (cfg.data.kind == DataKind::modulated_gaussian && cfg.data.modes.empty())
    throw ConfigError("data.m", 0, "modulated_gaussian data needs mode numbers");
  if (cfg.perturbation_kind == DataKind::modulated_gaussian && cfg.perturbation_modes.empty())
    throw ConfigError("perturbation.m", 0, "modulated_gaussian perturbation needs mode numbers");
  return cfg;
}

Config load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open configuration file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string format_config(const Config& cfg) {
  std::string out;
  for (const auto& e : key_table()) out += e.name + " = " + e.get(cfg) + "\n";
  return out;
}

GridSpec grid_of(const Config& cfg) { return make_grid(cfg.d, cfg.n, cfg.L); }

EquationSpec equation_of(const Config& cfg) {
  return EquationSpec{cfg.theta, cfg.mu, cfg.d, cfg.smoke_power, cfg.nonlinear};
}

StepperConfig stepper_of(const Config& cfg, int default_stride) {
  StepperConfig s;
  s.dt = cfg.dt;
  s.dealias = cfg.dealias;
  s.coefficient_switch_radius = cfg.coefficient_switch_radius;
  s.sample_stride = cfg.sample_stride.value_or(default_stride);
  return s;
}

PairRunConfig pair_config_of(const Config& cfg, LimitTarget target, int default_stride) {
  PairRunConfig p;
  p.grid = grid_of(cfg);
  p.target = target;
  p.theta = cfg.theta;
  p.mu = cfg.mu;
  p.smoke_power = cfg.smoke_power;
  p.data = cfg.data;
  if (cfg.perturbation_kind) {
    PerturbationDescriptor pert;
    pert.shape.kind = *cfg.perturbation_kind;
    pert.shape.sigma = cfg.perturbation_sigma;
    pert.shape.center = cfg.perturbation_center;
    pert.shape.modes = cfg.perturbation_modes;
    pert.size = cfg.perturbation_eps;
    p.perturbation = pert;
  }
  p.T = cfg.T;
  p.stepper = stepper_of(cfg, default_stride);
  p.exploratory = cfg.exploratory;
  p.override_admissibility = cfg.override_admissibility;
  return p;
}

}  // namespace cgl
