#pragma once

#include <array>
#include <cstdint>

#include "adiabat/hamiltonians.hpp"

namespace adiabat {

/// Spin-1/2 particle in a field of strength omega0 precessing at angle theta
/// about z.  Scaled time s = omega t runs over [0, 2 pi] for one rotation, so
/// tau = 2 pi / omega and the rate tau / s_span equals 1 / omega.
struct SpinHalf {
  double theta = 0.0;
  double omega0 = 1.0;

  static constexpr double kSpan = 6.283185307179586;

  static double tau_of_omega(double omega) { return kSpan / omega; }
  static double omega_of_tau(double tau) { return kSpan / tau; }

  /// -(omega0/2)(sx sin(theta) cos(s) + sy sin(theta) sin(s) + sz cos(theta))
  HamiltonianPath hamiltonian() const;

  /// Closed-form evolution operator.  omega is taken from tau at evaluation.
  UnitaryPath propagator() const;
  ComplexMatrix propagator_at(double s, double omega) const;

  /// Eigenvalue of level 0 (+omega0/2) and level 1 (-omega0/2).
  double energy(int n) const { return n == 0 ? 0.5 * omega0 : -0.5 * omega0; }

  /// Parallel-transported eigenvectors; index 0 has energy +omega0/2.
  std::array<ComplexVector, 2> parallel_eigvecs(double s) const;
  std::array<ComplexVector, 2> parallel_eigvec_derivatives(double s) const;

  /// <E_0|dE_1/ds> = -(i/2) sin(theta) exp(i s cos(theta))
  Complex coupling(double s) const;

  /// Projector onto the +omega0/2 eigenvector.
  ComplexMatrix projector0(double s) const;

  /// (0,1) element of the dual system's projector for the +omega0/2 level
  /// of H_a, written with the trigonometric combination of x = wbar s/(2 omega).
  Complex dual_projector01(double s, double omega) const;

  /// Resonance integral of the dual system, (1/2)(1 - exp(i s cos(theta))) tan(theta).
  Complex dual_resonance(double s) const;

  /// Resonance integrand of the negated dual, -(i/2) sin(theta) exp(i (2 omega0/omega + cos(theta)) s).
  Complex negated_dual_integrand(double s, double omega) const;
  /// Its integral from 0 to s in closed form.
  Complex negated_dual_resonance(double s, double omega) const;
};

/// Two-level system driven at exact resonance, delta/2 sz + (a/2)(sx cos(delta tau s) + sy sin(delta tau s))
/// on s in [0, 1].  The real-time drive frequency equals the level splitting.
HamiltonianPath resonant_drive(double delta = 1.0, double amplitude = 0.5);

/// Two-level system with a slow sweep plus a fast term whose amplitude falls
/// as 1/tau while its real-time frequency grows as tau:
/// delta/2 sz + (b/2) sin(pi s) sx + (g/tau) cos(omega tau^2 s) sx.
HamiltonianPath offresonant_drive(double delta = 1.0, double sweep = 0.5, double g = 0.5, double omega = 1.0);

/// Highest real-time frequency the fast term of offresonant_drive reaches, in s-units.
double offresonant_drive_frequency(double tau, double omega = 1.0);

/// Smooth random Hermitian path on s in [0, 1]: a diagonal ladder with unit
/// spacing plus two Fourier harmonics of random Hermitian matrices with
/// Gaussian entries of standard deviation `amplitude`.  Deterministic in seed.
HamiltonianPath random_smooth_path(std::size_t dim, std::uint64_t seed, double amplitude = 0.1);

/// Smallest eigenvalue gap of h over `samples` equally spaced points.
double sampled_min_gap(const HamiltonianPath& h, double tau, std::size_t samples = 401);

}  // namespace adiabat
