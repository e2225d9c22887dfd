#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "adiabat/grid.hpp"

namespace adiabat {

template <typename T>
std::vector<T> cumulative_trapezoid(const Grid& grid, const std::vector<T>& f) {
  if (grid.size() != f.size() || grid.empty()) throw std::invalid_argument("cumulative_trapezoid: size mismatch");
  std::vector<T> out(f.size());
  out[0] = f[0] * 0.0;
  for (std::size_t k = 1; k < f.size(); ++k) {
    const double h = grid[k] - grid[k - 1];
    out[k] = out[k - 1] + (f[k - 1] + f[k]) * (0.5 * h);
  }
  return out;
}

/// Fourth-order cumulative rule on a uniform grid: the trapezoid rule plus
/// end corrections that cancel its h^2 error (equivalently, a Richardson
/// extrapolation of it).  Falls back to the trapezoid rule on non-uniform or
/// very short grids.
template <typename T>
std::vector<T> cumulative_integral(const Grid& grid, const std::vector<T>& f) {
  if (grid.size() != f.size() || grid.empty()) throw std::invalid_argument("cumulative_integral: size mismatch");
  const std::size_t n = f.size();
  if (n < 4 || !is_uniform(grid)) return cumulative_trapezoid(grid, f);
  const double h = (grid.back() - grid.front()) / static_cast<double>(n - 1);
  std::vector<T> out(n);
  out[0] = f[0] * 0.0;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    T step;
    if (k == 0) {
      step = (f[0] * 5.0 + f[1] * 8.0 - f[2]) * (h / 12.0);
    } else if (k + 2 == n) {
      step = (f[k + 1] * 5.0 + f[k] * 8.0 - f[k - 1]) * (h / 12.0);
    } else {
      step = (f[k] * 13.0 + f[k + 1] * 13.0 - f[k - 1] - f[k + 2]) * (h / 24.0);
    }
    out[k + 1] = out[k] + step;
  }
  return out;
}

struct CumulativeResult {
  std::vector<std::complex<double>> values;
  /// max_k |fourth-order - trapezoid|, a conservative error bound for the trapezoid values.
  double richardson_difference = 0.0;
};

CumulativeResult cumulative_with_check(const Grid& grid, const std::vector<std::complex<double>>& f);

}  // namespace adiabat
