#pragma once

#include <cstddef>
#include <vector>

#include "adiabat/hamiltonians.hpp"

namespace adiabat {

using Grid = std::vector<double>;

/// intervals + 1 equally spaced points on [a, b].
Grid uniform_grid(double a, double b, std::size_t intervals);

bool is_uniform(const Grid& grid, double rel_tol = 1e-9);

struct GridPolicy {
  /// Baseline resolution, points per 2 pi of s.
  std::size_t points_per_2pi = 2048;
  /// Largest dynamical phase rate * (E_max - E_min) * ds allowed per interval.
  double max_phase_step = 0.1;
  /// Lower bound on the interval count, for paths with fast explicit drives.
  std::size_t min_intervals = 0;
  /// The interval count is rounded up to a multiple of this.
  std::size_t multiple = 4;
};

/// Largest eigenvalue spread of H(s, tau) over a coarse sample of [0, s_span].
double spectral_spread(const HamiltonianPath& h, double tau, std::size_t samples = 65);

/// Uniform grid on [0, s_end] resolving both the path geometry and the
/// dynamical phase at duration tau.
Grid default_grid(const HamiltonianPath& h, double tau, double s_end, const GridPolicy& policy = {});
Grid default_grid(const HamiltonianPath& h, double tau, const GridPolicy& policy = {});

}  // namespace adiabat
