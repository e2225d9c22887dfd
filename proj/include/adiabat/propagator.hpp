#pragma once

#include <cstdint>
#include <stdexcept>

#include "adiabat/grid.hpp"

namespace adiabat {

struct PropagationResult {
  Grid grid;
  /// U(s_k), with U(s_0) = I.
  std::vector<ComplexMatrix> unitaries;
  double max_unitarity_defect = 0.0;
  std::int64_t steps_taken = 0;
};

struct PropagateOptions {
  /// Midpoint-exponential steps per grid interval.
  std::size_t substeps = 1;
  std::int64_t step_cap = 10'000'000;
  EigOptions eig;
};

class StepCapExceeded : public std::runtime_error {
 public:
  explicit StepCapExceeded(std::int64_t cap);
};

/// Midpoint exponential rule U_{k+1} = exp(-i rate ds H(s_k + ds/2, tau)) U_k
/// on the given ascending grid.
PropagationResult propagate(const HamiltonianPath& h, double tau, const Grid& grid,
                            const PropagateOptions& options = {});

/// Same rule with step doubling: each step is accepted when the Frobenius
/// difference between one full step and two half steps is at most tol * ds.
/// The recorded grid holds the accepted step ends.
PropagationResult propagate_adaptive(const HamiltonianPath& h, double tau, double s_end, double tol,
                                     const PropagateOptions& options = {});

/// U at an arbitrary s by one midpoint step from the nearest grid point below.
ComplexMatrix evaluate_at(const PropagationResult& r, const HamiltonianPath& h, double tau, double s);

/// The propagation result as a path, for use with transform and dual_of at
/// the propagated tau.
UnitaryPath sampled_path(const PropagationResult& r, const HamiltonianPath& h, double tau);

}  // namespace adiabat
