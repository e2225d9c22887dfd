#include "adiabat/propagator.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <string>

namespace adiabat {

namespace {

ComplexMatrix midpoint_step(const HamiltonianPath& h, double tau, double s, double ds, const EigOptions& eig) {
  return unitary_exp(h(s + 0.5 * ds, tau), h.rate(tau) * ds, eig);
}

void check_tau(double tau) {
  if (!(tau > 0.0)) throw std::invalid_argument("propagate: tau must be positive");
}

}  // namespace

StepCapExceeded::StepCapExceeded(std::int64_t cap)
    : std::runtime_error("propagation exceeded the step cap of " + std::to_string(cap)) {}

PropagationResult propagate(const HamiltonianPath& h, double tau, const Grid& grid, const PropagateOptions& options) {
  check_tau(tau);
  if (grid.empty()) throw std::invalid_argument("propagate: empty grid");
  for (std::size_t k = 1; k < grid.size(); ++k) {
    if (!(grid[k] > grid[k - 1])) throw std::invalid_argument("propagate: grid must be strictly ascending");
  }
  const std::size_t sub = std::max<std::size_t>(options.substeps, 1);
  const auto total = static_cast<std::int64_t>((grid.size() - 1) * sub);
  if (total > options.step_cap) throw StepCapExceeded(options.step_cap);

  PropagationResult r;
  r.grid = grid;
  r.unitaries.reserve(grid.size());
  r.unitaries.push_back(ComplexMatrix::identity(h.dim()));
  ComplexMatrix u = r.unitaries.front();
  for (std::size_t k = 1; k < grid.size(); ++k) {
    const double ds = (grid[k] - grid[k - 1]) / static_cast<double>(sub);
    for (std::size_t j = 0; j < sub; ++j) {
      u = midpoint_step(h, tau, grid[k - 1] + ds * static_cast<double>(j), ds, options.eig) * u;
    }
    r.max_unitarity_defect = std::max(r.max_unitarity_defect, unitarity_defect(u));
    r.unitaries.push_back(u);
  }
  r.steps_taken = total;
  return r;
}

PropagationResult propagate_adaptive(const HamiltonianPath& h, double tau, double s_end, double tol,
                                     const PropagateOptions& options) {
  check_tau(tau);
  if (!(tol > 0.0)) throw std::invalid_argument("propagate_adaptive: tol must be positive");
  if (!(s_end > 0.0)) throw std::invalid_argument("propagate_adaptive: s_end must be positive");

  PropagationResult r;
  r.grid.push_back(0.0);
  r.unitaries.push_back(ComplexMatrix::identity(h.dim()));
  ComplexMatrix u = r.unitaries.front();

  // Initial step from the dynamical-phase scale.
  const double scale = std::max(h.rate(tau) * frobenius_norm(h(0.0, tau)), 1e-12);
  double ds = std::min(s_end, 0.1 / scale);
  double s = 0.0;
  std::int64_t steps = 0;
  while (s < s_end) {
    if (steps >= options.step_cap) throw StepCapExceeded(options.step_cap);
    ds = std::min(ds, s_end - s);
    const ComplexMatrix full = midpoint_step(h, tau, s, ds, options.eig);
    const ComplexMatrix half =
        midpoint_step(h, tau, s + 0.5 * ds, 0.5 * ds, options.eig) * midpoint_step(h, tau, s, 0.5 * ds, options.eig);
    const double err = frobenius_norm(full - half);
    steps += 3;
    const double target = tol * ds;
    if (err <= target || ds < 1e-14 * s_end) {
      u = half * u;
      s = (s_end - s - ds < 1e-14 * s_end) ? s_end : s + ds;
      r.grid.push_back(s);
      r.unitaries.push_back(u);
      r.max_unitarity_defect = std::max(r.max_unitarity_defect, unitarity_defect(u));
    }
    // Local error scales as ds^3 against a target linear in ds.
    const double factor = err > 0.0 ? 0.9 * std::sqrt(target / err) : 4.0;
    ds *= std::clamp(factor, 0.2, 4.0);
  }
  r.steps_taken = steps;
  return r;
}

ComplexMatrix evaluate_at(const PropagationResult& r, const HamiltonianPath& h, double tau, double s) {
  const Grid& g = r.grid;
  if (s <= g.front()) return r.unitaries.front();
  auto it = std::upper_bound(g.begin(), g.end(), s);
  const std::size_t k = static_cast<std::size_t>(it - g.begin()) - 1;
  if (k + 1 >= g.size() && s > g.back() + 1e-12 * std::max(1.0, std::abs(g.back()))) {
    throw std::out_of_range("evaluate_at: s beyond the propagated range");
  }
  const double ds = s - g[k];
  if (ds == 0.0) return r.unitaries[k];
  return midpoint_step(h, tau, g[k], ds, {}) * r.unitaries[k];
}

UnitaryPath sampled_path(const PropagationResult& r, const HamiltonianPath& h, double tau) {
  auto shared = std::make_shared<PropagationResult>(r);
  MatrixFunction eval = [shared, h, tau](double s, double) { return evaluate_at(*shared, h, tau, s); };
  MatrixFunction deriv = [shared, h, tau](double s, double) {
    ComplexMatrix d = h(s, tau) * evaluate_at(*shared, h, tau, s);
    d *= Complex(0.0, -h.rate(tau));
    return d;
  };
  return UnitaryPath(h.dim(), h.s_span(), std::move(eval), std::move(deriv), "propagated(" + h.label() + ")");
}

}  // namespace adiabat
