#ifndef CGL_TESTS_SUPPORT_HPP
#define CGL_TESTS_SUPPORT_HPP

#include <array>
#include <cmath>
#include <complex>
#include <filesystem>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "cgl/spectral_grid.hpp"

namespace cgl::test {

inline constexpr double kPi = std::numbers::pi;

inline Field random_field(const GridSpec& grid, unsigned seed, double scale = 1.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, scale);
  std::vector<Complex> v(grid.size());
  for (auto& z : v) z = {normal(rng), normal(rng)};
  return Field(grid, std::move(v));
}

/// Random coefficients restricted to |m_a| <= band on every axis.
inline SpectralField random_band_limited(const GridSpec& grid, int band, unsigned seed,
                                         double scale = 0.3) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, scale);
  SpectralField g(grid);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto idx = unflatten(grid, i);
    bool inside = true;
    for (int a = 0; a < grid.d; ++a) inside = inside && std::abs(mode_number(idx[a], grid.n)) <= band;
    if (inside) g[i] = {normal(rng), normal(rng)};
  }
  return g;
}

inline Field plane_wave(const GridSpec& grid, std::array<int, 4> m, Complex a) {
  std::vector<Complex> v(grid.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    const auto x = coordinates(grid, i);
    double phase = 0.0;
    for (int ax = 0; ax < grid.d; ++ax) phase += 2 * kPi * m[ax] * x[ax] / grid.L;
    v[i] = a * std::polar(1.0, phase);
  }
  return Field(grid, std::move(v));
}

inline std::size_t flat_index(const GridSpec& grid, std::array<int, 4> m) {
  std::size_t flat = 0;
  for (int ax = 0; ax < grid.d; ++ax) flat = flat * grid.n + ((m[ax] % grid.n + grid.n) % grid.n);
  return flat;
}

inline double max_abs_diff(std::span<const Complex> a, std::span<const Complex> b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
  return worst;
}

inline double max_abs(std::span<const Complex> a) {
  double worst = 0.0;
  for (const auto& z : a) worst = std::max(worst, std::abs(z));
  return worst;
}

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    static int counter = 0;
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("cgl-test-" + std::to_string(rd()) + "-" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  std::string file(const std::string& name) const { return (path_ / name).string(); }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace cgl::test

#endif  // CGL_TESTS_SUPPORT_HPP
