#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "adiabat/linalg.hpp"

namespace adiabat {

/// A matrix-valued function of scaled time s and total duration tau.
using MatrixFunction = std::function<ComplexMatrix(double s, double tau)>;

/// Time-dependent Hamiltonian in scaled time.
///
/// The path is defined for s in [0, s_span].  Real time is t = tau * s / s_span,
/// so the Schroedinger equation reads i dU/ds = rate(tau) H(s, tau) U with
/// rate(tau) = tau / s_span (hbar = 1).  For s_span = 1 the rate is tau itself.
class HamiltonianPath {
 public:
  HamiltonianPath(std::size_t dim, double s_span, MatrixFunction eval, MatrixFunction derivative = {},
                  bool tau_dependent = false, std::string label = {});

  std::size_t dim() const { return dim_; }
  double s_span() const { return s_span_; }
  bool tau_dependent() const { return tau_dependent_; }
  bool has_analytic_derivative() const { return static_cast<bool>(derivative_); }
  const std::string& label() const { return label_; }
  double rate(double tau) const { return tau / s_span_; }

  ComplexMatrix operator()(double s, double tau) const { return eval_(s, tau); }

  /// dH/ds: the registered analytic derivative, otherwise a 4th-order central
  /// difference with step 1e-4 * s_span.
  ComplexMatrix derivative(double s, double tau) const;

  const MatrixFunction& eval_function() const { return eval_; }
  const MatrixFunction& derivative_function() const { return derivative_; }

 private:
  std::size_t dim_;
  double s_span_;
  MatrixFunction eval_;
  MatrixFunction derivative_;
  bool tau_dependent_;
  std::string label_;
};

/// Unitary-valued path with U(0, tau) = I.
class UnitaryPath {
 public:
  UnitaryPath(std::size_t dim, double s_span, MatrixFunction eval, MatrixFunction derivative = {},
              std::string label = {});

  static UnitaryPath identity(std::size_t dim, double s_span);

  std::size_t dim() const { return dim_; }
  double s_span() const { return s_span_; }
  bool has_analytic_derivative() const { return static_cast<bool>(derivative_); }
  const std::string& label() const { return label_; }

  ComplexMatrix operator()(double s, double tau) const { return eval_(s, tau); }
  /// dU/ds, analytic when registered, otherwise 4th-order central difference
  /// with the given step (default 1e-5 * s_span).
  ComplexMatrix derivative(double s, double tau, double step = 0.0) const;

 private:
  std::size_t dim_;
  double s_span_;
  MatrixFunction eval_;
  MatrixFunction derivative_;
  std::string label_;
};

class DimensionMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// H_b(s, tau) = -U^dagger(s, tau) H(s) U(s, tau).
HamiltonianPath dual_of(const HamiltonianPath& h, const UnitaryPath& u);

/// Pointwise -H.
HamiltonianPath negate(const HamiltonianPath& h);

/// H_x(s, tau) = sign * Ux^dagger(s, tau) H(s, tau) Ux(s, tau), sign = +1 or -1.
HamiltonianPath transform(const HamiltonianPath& h, const UnitaryPath& ux, int sign);

/// Constant Hamiltonian, handy for tests and as a degenerate model.
HamiltonianPath constant_path(const ComplexMatrix& h, double s_span = 1.0);

/// Hermitian matrices sampled on an ascending s-grid, joined by cubic Hermite
/// (Catmull-Rom) interpolation.  The derivative is that of the interpolant.
HamiltonianPath interpolated_path(std::vector<double> s_values, std::vector<ComplexMatrix> matrices,
                                  std::string label = "custom");

struct GeneratorOptions {
  /// Finite-difference step in s; 0 selects 1e-5 * s_span.
  double step = 0.0;
  /// Use the analytic dU/ds of the path when one is registered.
  bool use_analytic_derivative = false;
};

/// Hamiltonian whose evolution operator is a given unitary path.
struct GeneratedHamiltonian {
  /// Hermitized generator (i/rate) dU/ds U^dagger.
  HamiltonianPath path;
  /// ||A - A^dagger||_F / 2 of the raw extraction A at (s, tau); a quality metric.
  std::function<double(double s, double tau)> antihermitian_residual;
};

class NonSmoothPath : public std::runtime_error {
 public:
  NonSmoothPath(double s, double residual);
  double s() const { return s_; }
  double residual() const { return residual_; }

 private:
  double s_;
  double residual_;
};

GeneratedHamiltonian generator_of(const UnitaryPath& ux, const GeneratorOptions& options = {});

/// Throws NonSmoothPath at the first grid point where the anti-Hermitian
/// residual of the extracted generator exceeds the threshold.  Returns the
/// largest residual seen.
double check_generator(const GeneratedHamiltonian& g, double tau, const std::vector<double>& grid,
                       double threshold = 1e-6);

}  // namespace adiabat
