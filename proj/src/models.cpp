#include "adiabat/models.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

namespace adiabat {

namespace {

ComplexMatrix bloch(double x, double y, double z) {
  return ComplexMatrix(2, {Complex(z, 0.0), Complex(x, -y), Complex(x, y), Complex(-z, 0.0)});
}

}  // namespace

HamiltonianPath SpinHalf::hamiltonian() const {
  const double st = std::sin(theta), ct = std::cos(theta), h = -0.5 * omega0;
  MatrixFunction eval = [=](double s, double) { return bloch(h * st * std::cos(s), h * st * std::sin(s), h * ct); };
  MatrixFunction deriv = [=](double s, double) { return bloch(-h * st * std::sin(s), h * st * std::cos(s), 0.0); };
  return HamiltonianPath(2, kSpan, std::move(eval), std::move(deriv), false, "spin_half");
}

ComplexMatrix SpinHalf::propagator_at(double s, double omega) const {
  const double ct = std::cos(theta), st = std::sin(theta);
  const double wbar = std::sqrt(omega0 * omega0 + omega * omega + 2.0 * omega * omega0 * ct);
  const double x = wbar * s / (2.0 * omega);
  const Complex a = Complex(std::cos(x), (omega + omega0 * ct) / wbar * std::sin(x));
  const Complex b = Complex(0.0, omega0 * st / wbar * std::sin(x));
  const Complex em = std::polar(1.0, -0.5 * s), ep = std::polar(1.0, 0.5 * s);
  return ComplexMatrix(2, {a * em, b * em, b * ep, std::conj(a) * ep});
}

UnitaryPath SpinHalf::propagator() const {
  const SpinHalf self = *this;
  const HamiltonianPath h = hamiltonian();
  MatrixFunction eval = [self](double s, double tau) { return self.propagator_at(s, omega_of_tau(tau)); };
  // dU/ds = -i (tau / 2 pi) H U
  MatrixFunction deriv = [self, h](double s, double tau) {
    ComplexMatrix d = h(s, tau) * self.propagator_at(s, omega_of_tau(tau));
    d *= Complex(0.0, -tau / kSpan);
    return d;
  };
  return UnitaryPath(2, kSpan, std::move(eval), std::move(deriv), "spin_half_exact");
}

std::array<ComplexVector, 2> SpinHalf::parallel_eigvecs(double s) const {
  const double c = std::cos(0.5 * theta), sn = std::sin(0.5 * theta), ct = std::cos(theta);
  const Complex em = std::polar(1.0, -0.5 * s), ep = std::polar(1.0, 0.5 * s);
  const Complex g0 = std::polar(1.0, -0.5 * s * ct), g1 = std::polar(1.0, 0.5 * s * ct);
  return {ComplexVector{g0 * em * sn, -g0 * ep * c}, ComplexVector{g1 * em * c, g1 * ep * sn}};
}

std::array<ComplexVector, 2> SpinHalf::parallel_eigvec_derivatives(double s) const {
  const double c = std::cos(0.5 * theta), sn = std::sin(0.5 * theta), ct = std::cos(theta);
  const Complex em = std::polar(1.0, -0.5 * s), ep = std::polar(1.0, 0.5 * s);
  const Complex g0 = std::polar(1.0, -0.5 * s * ct), g1 = std::polar(1.0, 0.5 * s * ct);
  const Complex i = kI;
  return {ComplexVector{-0.5 * i * (ct + 1.0) * g0 * em * sn, -0.5 * i * (1.0 - ct) * g0 * ep * c},
          ComplexVector{0.5 * i * (ct - 1.0) * g1 * em * c, 0.5 * i * (ct + 1.0) * g1 * ep * sn}};
}

Complex SpinHalf::coupling(double s) const {
  return -0.5 * kI * std::sin(theta) * std::polar(1.0, s * std::cos(theta));
}

ComplexMatrix SpinHalf::projector0(double s) const {
  const double sc = std::sin(0.5 * theta) * std::cos(0.5 * theta);
  const double s2 = std::sin(0.5 * theta) * std::sin(0.5 * theta);
  return ComplexMatrix(2, {Complex(s2), -sc * std::polar(1.0, -s), -sc * std::polar(1.0, s), Complex(1.0 - s2)});
}

Complex SpinHalf::dual_projector01(double s, double omega) const {
  const double ct = std::cos(theta);
  const double wbar = std::sqrt(omega0 * omega0 + omega * omega + 2.0 * omega * omega0 * ct);
  const double x = wbar * s / (2.0 * omega);
  const double sc = std::sin(0.5 * theta) * std::cos(0.5 * theta);
  const double sx = std::sin(x), cx = std::cos(x);
  const double r = omega / wbar, r0 = omega0 / wbar;
  return Complex(sx * sx * (r * r - r0 * r0) * sc - cx * cx * sc, 2.0 * sx * cx * r * sc);
}

Complex SpinHalf::dual_resonance(double s) const {
  return 0.5 * (1.0 - std::polar(1.0, s * std::cos(theta))) * std::tan(theta);
}

Complex SpinHalf::negated_dual_integrand(double s, double omega) const {
  return -0.5 * kI * std::sin(theta) * std::polar(1.0, (2.0 * omega0 / omega + std::cos(theta)) * s);
}

Complex SpinHalf::negated_dual_resonance(double s, double omega) const {
  const double kappa = 2.0 * omega0 / omega + std::cos(theta);
  return std::sin(theta) * (1.0 - std::polar(1.0, kappa * s)) / (2.0 * kappa);
}

HamiltonianPath resonant_drive(double delta, double amplitude) {
  MatrixFunction eval = [=](double s, double tau) {
    const double phi = delta * tau * s;
    return bloch(0.5 * amplitude * std::cos(phi), 0.5 * amplitude * std::sin(phi), 0.5 * delta);
  };
  MatrixFunction deriv = [=](double s, double tau) {
    const double phi = delta * tau * s, w = delta * tau;
    return bloch(-0.5 * amplitude * w * std::sin(phi), 0.5 * amplitude * w * std::cos(phi), 0.0);
  };
  return HamiltonianPath(2, 1.0, std::move(eval), std::move(deriv), true, "resonant_drive");
}

HamiltonianPath offresonant_drive(double delta, double sweep, double g, double omega) {
  const double pi = std::numbers::pi;
  MatrixFunction eval = [=](double s, double tau) {
    const double x = 0.5 * sweep * std::sin(pi * s) + g / tau * std::cos(omega * tau * tau * s);
    return bloch(x, 0.0, 0.5 * delta);
  };
  MatrixFunction deriv = [=](double s, double tau) {
    const double dx = 0.5 * sweep * pi * std::cos(pi * s) - g * omega * tau * std::sin(omega * tau * tau * s);
    return bloch(dx, 0.0, 0.0);
  };
  return HamiltonianPath(2, 1.0, std::move(eval), std::move(deriv), true, "offresonant_drive");
}

double offresonant_drive_frequency(double tau, double omega) { return omega * tau * tau; }

HamiltonianPath random_smooth_path(std::size_t dim, std::uint64_t seed, double amplitude) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, amplitude);
  auto random_hermitian = [&] {
    ComplexMatrix m(dim);
    for (std::size_t r = 0; r < dim; ++r) {
      m(r, r) = normal(rng);
      for (std::size_t c = r + 1; c < dim; ++c) {
        m(r, c) = Complex(normal(rng), normal(rng));
        m(c, r) = std::conj(m(r, c));
      }
    }
    return m;
  };
  ComplexMatrix base(dim);
  for (std::size_t r = 0; r < dim; ++r) base(r, r) = static_cast<double>(r);
  constexpr int kHarmonics = 2;
  std::vector<ComplexMatrix> a, b;
  for (int j = 0; j < kHarmonics; ++j) {
    a.push_back(random_hermitian());
    b.push_back(random_hermitian());
  }
  const double w = 2.0 * std::numbers::pi;
  MatrixFunction eval = [=](double s, double) {
    ComplexMatrix h = base;
    for (int j = 0; j < kHarmonics; ++j) {
      h += a[j] * Complex(std::cos(w * (j + 1) * s));
      h += b[j] * Complex(std::sin(w * (j + 1) * s));
    }
    return h;
  };
  MatrixFunction deriv = [=](double s, double) {
    ComplexMatrix d(dim);
    for (int j = 0; j < kHarmonics; ++j) {
      const double f = w * (j + 1);
      d += a[j] * Complex(-f * std::sin(f * s));
      d += b[j] * Complex(f * std::cos(f * s));
    }
    return d;
  };
  return HamiltonianPath(dim, 1.0, std::move(eval), std::move(deriv), false, "random_smooth");
}

double sampled_min_gap(const HamiltonianPath& h, double tau, std::size_t samples) {
  double gap = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < samples; ++k) {
    const double s = h.s_span() * static_cast<double>(k) / static_cast<double>(samples - 1);
    const HermEig e = herm_eig(h(s, tau));
    for (std::size_t n = 1; n < e.values.size(); ++n) gap = std::min(gap, e.values[n] - e.values[n - 1]);
  }
  return gap;
}

}  // namespace adiabat
