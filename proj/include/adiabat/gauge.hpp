#pragma once

#include <memory>
#include <optional>
#include <stdexcept>

#include "adiabat/grid.hpp"

namespace adiabat {

struct FrameOptions {
  /// Smallest admissible eigenvalue separation.
  double gap_floor = 1e-8;
  /// Adjacent-point overlaps below this count as a discontinuous projector.
  double min_overlap = 0.9;
  /// Correct the overlap transport with a midpoint eigenvector (Richardson step).
  bool midpoint_correction = true;
  /// Columns fix the level order and phase at s_0; otherwise levels ascend
  /// and each vector's largest component is made real positive.
  std::optional<ComplexMatrix> reference;
  EigOptions eig;
};

class CrossingDetected : public std::runtime_error {
 public:
  CrossingDetected(double s0, double s1, std::size_t m, std::size_t n, double gap);
  double s0, s1;
  std::size_t m, n;
  double gap;
};

class DiscontinuousFrame : public std::runtime_error {
 public:
  DiscontinuousFrame(double s0, double s1, std::size_t level, double overlap);
  double s0, s1;
  std::size_t level;
  double overlap;
};

/// Eigenvalues, gauged eigenvectors and couplings of a path on a grid.
struct EigenFrame {
  Grid grid;
  std::size_t dim = 0;
  double tau = 1.0;
  double rate = 1.0;
  /// E_n(s_k) at values[k * dim + n].
  std::vector<double> values;
  /// Columns are |E_n(s_k)>.
  std::vector<ComplexMatrix> vectors;
  /// <E_m|dE_n/ds> at s_k, Hellmann-Feynman route, zero diagonal.
  std::vector<ComplexMatrix> couplings;
  /// rate * integral_0^{s_k} E_n, at phases[k * dim + n].
  std::vector<double> phases;
  double min_gap = 0.0;
  /// Smallest |<E_n(s_k)|E_n(s_{k+1})>| met while tracking levels.
  double min_overlap = 1.0;
  FrameOptions options;
  std::shared_ptr<const HamiltonianPath> path;

  std::size_t size() const { return grid.size(); }
  double energy(std::size_t k, std::size_t n) const { return values[k * dim + n]; }
  double phase(std::size_t k, std::size_t n) const { return phases[k * dim + n]; }
  ComplexVector vector(std::size_t k, std::size_t n) const { return vectors[k].column(n); }
  ComplexMatrix projector(std::size_t k, std::size_t n) const;
};

EigenFrame eigenframe(const HamiltonianPath& h, double tau, const Grid& grid, const FrameOptions& options = {});

/// Re-applies level tracking and transport to the frame's stored vectors,
/// keeping the s_0 vectors.  Any per-point phase choice gives the same result.
EigenFrame regauge(const EigenFrame& frame);

/// Same path and options on a grid with `factor` times as many intervals.
EigenFrame refine(const EigenFrame& frame, std::size_t factor);

enum class CouplingRoute { hellmann_feynman, finite_difference };

/// <E_m|dE_n/ds> per grid point.  The finite-difference route differentiates
/// the gauged vectors with 4th-order stencils and keeps the diagonal.
std::vector<ComplexMatrix> couplings(const EigenFrame& frame, CouplingRoute route);

/// U_A(s_k) = sum_n |E_n(s_k)><E_n(s_0)|
ComplexMatrix kato_operator(const EigenFrame& frame, std::size_t k);
/// Phi_A(s_k) = sum_n exp(-i rate int E_n) P_n(s_0)
ComplexMatrix dynamical_phase(const EigenFrame& frame, std::size_t k);
/// K(s_k) = i sum_n dP_n/ds P_n
ComplexMatrix kato_generator(const EigenFrame& frame, std::size_t k);
/// Kbar(s_k) = i sum_{m != n} exp(i rate int (E_m - E_n)) <E_m|dE_n/ds> |E_m(0)><E_n(0)|
ComplexMatrix kernel(const EigenFrame& frame, std::size_t k);

/// Same objects as UnitaryPath / matrix series over the whole grid.
std::vector<ComplexMatrix> kato_series(const EigenFrame& frame);

struct GaugeCheck {
  /// max_k max_n |<E_n(s_k)|dE_n/ds>| with a 4th-order central stencil.
  double transport_residual = 0.0;
  /// min_k min_n |<E_n(s_k)|E_n(s_{k+1})>|
  double min_overlap = 1.0;
  /// max_k ||sum_n P_n - I||_F
  double completeness_defect = 0.0;
  /// max_k max_{m,n} ||P_n P_m - delta_nm P_n||_F
  double idempotence_defect = 0.0;
};

GaugeCheck check_gauge(const EigenFrame& frame);

struct RegularityCheck {
  /// ||dP/ds|| and ||d2P/ds2|| ratios between grids of spacing h and h/2.
  double first_ratio = 1.0;
  double second_ratio = 1.0;
  bool ok = true;
};

/// Projector-regularity premise, checked by proxy: finite-difference first and
/// second derivatives of the projectors must be stable (ratio in [0.5, 2])
/// when the spacing is halved.
RegularityCheck check_projector_regularity(const HamiltonianPath& h, double tau, std::size_t intervals = 256,
                                           const FrameOptions& options = {});

}  // namespace adiabat
