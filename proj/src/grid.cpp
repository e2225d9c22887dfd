#include "adiabat/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace adiabat {

Grid uniform_grid(double a, double b, std::size_t intervals) {
  if (intervals == 0) throw std::invalid_argument("uniform_grid: need at least one interval");
  if (!(b > a)) throw std::invalid_argument("uniform_grid: empty range");
  Grid g(intervals + 1);
  const double h = (b - a) / static_cast<double>(intervals);
  for (std::size_t k = 0; k <= intervals; ++k) g[k] = a + h * static_cast<double>(k);
  g.back() = b;
  return g;
}

bool is_uniform(const Grid& grid, double rel_tol) {
  if (grid.size() < 3) return true;
  const double h = (grid.back() - grid.front()) / static_cast<double>(grid.size() - 1);
  for (std::size_t k = 1; k < grid.size(); ++k) {
    if (std::abs(grid[k] - grid[k - 1] - h) > rel_tol * h * 1e3) return false;
  }
  return true;
}

double spectral_spread(const HamiltonianPath& h, double tau, std::size_t samples) {
  double spread = 0.0;
  for (std::size_t k = 0; k < samples; ++k) {
    const double s = h.s_span() * static_cast<double>(k) / static_cast<double>(samples - 1);
    const HermEig e = herm_eig(h(s, tau));
    spread = std::max(spread, e.values.back() - e.values.front());
  }
  return spread;
}

Grid default_grid(const HamiltonianPath& h, double tau, double s_end, const GridPolicy& policy) {
  const double base = static_cast<double>(policy.points_per_2pi) * s_end / (2.0 * std::numbers::pi);
  const double phase = h.rate(tau) * spectral_spread(h, tau) * s_end / policy.max_phase_step;
  double n = std::max({std::ceil(base), std::ceil(phase), static_cast<double>(policy.min_intervals), 1.0});
  const double m = static_cast<double>(std::max<std::size_t>(policy.multiple, 1));
  n = std::ceil(n / m) * m;
  return uniform_grid(0.0, s_end, static_cast<std::size_t>(n));
}

Grid default_grid(const HamiltonianPath& h, double tau, const GridPolicy& policy) {
  return default_grid(h, tau, h.s_span(), policy);
}

}  // namespace adiabat
