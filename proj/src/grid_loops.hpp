#ifndef CGL_SRC_GRID_LOOPS_HPP
#define CGL_SRC_GRID_LOOPS_HPP

#include <array>
#include <numbers>
#include <vector>

#include "cgl/spectral_grid.hpp"

namespace cgl::detail {

inline std::vector<double> axis_wavenumbers(const GridSpec& grid) {
  std::vector<double> k(static_cast<std::size_t>(grid.n));
  for (std::size_t j = 0; j < k.size(); ++j)
    k[j] = 2.0 * std::numbers::pi * mode_number(j, grid.n) / grid.L;
  return k;
}

/// Calls fn(flat_index, |k|^2) for every mode in storage order.
template <class Fn>
void for_each_mode(const GridSpec& grid, Fn&& fn) {
  const auto k = axis_wavenumbers(grid);
  std::vector<double> k2axis(k.size());
  for (std::size_t j = 0; j < k.size(); ++j) k2axis[j] = k[j] * k[j];

  const std::size_t n = static_cast<std::size_t>(grid.n);
  const std::size_t total = grid.size();
  std::array<std::size_t, 4> idx{};
  // The last axis is contiguous; accumulate the outer axes once per row.
  for (std::size_t row = 0; row < total; row += n) {
    double outer = 0.0;
    for (int a = 0; a + 1 < grid.d; ++a) outer += k2axis[idx[a]];
    for (std::size_t j = 0; j < n; ++j) fn(row + j, outer + k2axis[j]);
    for (int a = grid.d - 2; a >= 0; --a) {
      if (++idx[a] < n) break;
      idx[a] = 0;
    }
  }
}

}  // namespace cgl::detail

#endif  // CGL_SRC_GRID_LOOPS_HPP
