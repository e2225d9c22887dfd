#include <doctest.h>

#include <cmath>
#include <numbers>

#include "adiabat/grid.hpp"
#include "adiabat/models.hpp"

using namespace adiabat;

namespace {

constexpr double kPi = std::numbers::pi;

template <typename F>
ComplexMatrix central(const F& f, double s, double h) {
  ComplexMatrix d = f(s + h) - f(s - h);
  d *= Complex(1.0 / (2.0 * h));
  return d;
}

ComplexVector vdiff(const ComplexVector& a, const ComplexVector& b, double scale) {
  ComplexVector out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = (a[i] - b[i]) * scale;
  return out;
}

ComplexMatrix projector_for(const ComplexMatrix& h, double value) {
  const HermEig e = herm_eig(h);
  const std::size_t n = std::abs(e.values[0] - value) < std::abs(e.values[1] - value) ? 0 : 1;
  const ComplexVector v = e.vector(n);
  return ComplexMatrix::outer(v, v);
}

}  // namespace

TEST_CASE("spin-1/2 Hamiltonian by direct substitution") {
  const ComplexMatrix h0 = SpinHalf{0.0, 1.0}.hamiltonian()(1.234, 1.0);
  CHECK(frobenius_norm(h0 - pauli::z() * Complex(-0.5)) <= 1e-15);

  const SpinHalf m{kPi / 3, 2.0};
  const ComplexMatrix expected = -(pauli::y() * Complex(std::sin(kPi / 3)) + pauli::z() * Complex(std::cos(kPi / 3)));
  CHECK(frobenius_norm(m.hamiltonian()(kPi / 2, 1.0) - expected) <= 1e-14);
}

TEST_CASE("analytic derivatives agree with central differences") {
  const SpinHalf m{0.8, 1.5};
  const HamiltonianPath h = m.hamiltonian();
  for (double s = 0.1; s < 6.0; s += 0.7) {
    const ComplexMatrix fd = central([&](double x) { return h(x, 3.0); }, s, 1e-4);
    CHECK(frobenius_norm(fd - h.derivative(s, 3.0)) <= 1e-6);
  }
  for (const HamiltonianPath& p : {resonant_drive(), offresonant_drive(), random_smooth_path(3, 42)}) {
    for (double s = 0.05; s < 1.0; s += 0.15) {
      const double h = 1e-4 / 20.0;  // the drives oscillate at up to omega tau^2 = 400
      const ComplexMatrix fd = central([&](double x) { return p(x, 20.0); }, s, h);
      CHECK(frobenius_norm(fd - p.derivative(s, 20.0)) <= 1e-6 * std::max(1.0, frobenius_norm(fd)));
    }
  }
}

TEST_CASE("closed-form propagator") {
  const SpinHalf m{kPi / 4, 1.0};
  const double omega = 0.1, tau = SpinHalf::tau_of_omega(omega);
  const UnitaryPath u = m.propagator();
  const HamiltonianPath h = m.hamiltonian();
  CHECK(frobenius_norm(u(0.0, tau) - ComplexMatrix::identity(2)) <= 1e-15);
  double residual = 0.0, defect = 0.0;
  for (int k = 0; k < 100; ++k) {
    const double s = 2 * kPi * k / 99.0;
    defect = std::max(defect, unitarity_defect(u(s, tau)));
    if (k == 0) continue;
    // i dU/ds = (1/omega) H U
    const ComplexMatrix lhs = central([&](double x) { return u(x, tau); }, s, 1e-4) * kI;
    residual = std::max(residual, frobenius_norm(lhs - h(s, tau) * u(s, tau) * Complex(1.0 / omega)));
  }
  CHECK(residual <= 1e-6);
  CHECK(defect <= 1e-12);
}

TEST_CASE("parallel-transported eigenvectors") {
  SUBCASE("eigenvectors with the labelled energies") {
    const SpinHalf m{0.9, 1.0};
    for (double s = 0.0; s < 6.3; s += 0.5) {
      const ComplexMatrix h = m.hamiltonian()(s, 1.0);
      const auto e = m.parallel_eigvecs(s);
      for (int n = 0; n < 2; ++n) {
        const ComplexVector hv = h * e[n];
        for (int r = 0; r < 2; ++r) CHECK(std::abs(hv[r] - m.energy(n) * e[n][r]) <= 1e-14);
      }
    }
  }
  SUBCASE("coupling vanishes at theta = 0") {
    const SpinHalf m{0.0, 1.0};
    for (double s = 0.0; s < 6.3; s += 0.5) CHECK(std::abs(m.coupling(s)) == 0.0);
  }
  SUBCASE("coupling at theta = pi/2, s = 0") {
    const Complex c = SpinHalf{kPi / 2, 1.0}.coupling(0.0);
    CHECK(std::abs(c - Complex(0.0, -0.5)) <= 1e-15);
  }
  SUBCASE("finite differences of the eigenvectors") {
    for (double theta : {0.3, kPi / 4, 2.0}) {
      const SpinHalf m{theta, 1.0};
      for (double s = 0.2; s < 6.0; s += 0.9) {
        const double h = 1e-5;
        const auto a = m.parallel_eigvecs(s + h), b = m.parallel_eigvecs(s - h), e = m.parallel_eigvecs(s);
        const ComplexVector d0 = vdiff(a[0], b[0], 0.5 / h), d1 = vdiff(a[1], b[1], 0.5 / h);
        CHECK(std::abs(inner(e[0], d0)) <= 1e-9);
        CHECK(std::abs(inner(e[1], d1)) <= 1e-9);
        CHECK(std::abs(inner(e[0], d1)) == doctest::Approx(std::sin(theta) / 2).epsilon(1e-8));
        CHECK(std::abs(inner(e[0], d1) - m.coupling(s)) <= 1e-9);
        const auto an = m.parallel_eigvec_derivatives(s);
        for (int r = 0; r < 2; ++r) CHECK(std::abs(an[1][r] - d1[r]) <= 1e-9);
      }
    }
  }
}

TEST_CASE("dual Hamiltonian") {
  const SpinHalf m{kPi / 4, 1.0};
  const HamiltonianPath ha = m.hamiltonian();
  const UnitaryPath ua = m.propagator();
  const HamiltonianPath hb = dual_of(ha, ua);
  CHECK(hb.tau_dependent());
  const double omega = 0.05, tau = SpinHalf::tau_of_omega(omega);
  CHECK(frobenius_norm(hb(0.0, tau) + ha(0.0, tau)) <= 1e-15);
  for (double s = 0.0; s < 2 * kPi; s += 0.31) {
    const HermEig e = herm_eig(hb(s, tau));
    CHECK(e.values[0] == doctest::Approx(-0.5).epsilon(1e-12));
    CHECK(e.values[1] == doctest::Approx(0.5).epsilon(1e-12));
    // The dual projector tied to the +omega0/2 level of H_a has eigenvalue -omega0/2.
    const ComplexMatrix p = projector_for(hb(s, tau), -0.5);
    CHECK(std::abs(p(0, 1) - m.dual_projector01(s, omega)) <= 1e-12);
    const ComplexMatrix direct = ua(s, tau).adjoint() * m.projector0(s) * ua(s, tau);
    CHECK(frobenius_norm(direct - p) <= 1e-12);
    // Analytic derivative of the transformed path against central differences.
    const ComplexMatrix fd = central([&](double x) { return hb(x, tau); }, s + 0.01, 1e-5);
    CHECK(frobenius_norm(fd - hb.derivative(s + 0.01, tau)) <= 1e-6);
  }
  CHECK_THROWS_AS(dual_of(ha, UnitaryPath::identity(3, 1.0)), DimensionMismatch);
}

TEST_CASE("negation and general transforms") {
  const SpinHalf m{kPi / 3, 1.0};
  const HamiltonianPath ha = m.hamiltonian();
  const UnitaryPath ua = m.propagator();
  const HamiltonianPath hb = dual_of(ha, ua);
  const HamiltonianPath hc = negate(hb);
  const HamiltonianPath back = negate(negate(ha));
  const HamiltonianPath plus = transform(ha, ua, +1);
  const HamiltonianPath minus = transform(ha, ua, -1);
  const HamiltonianPath same = transform(ha, UnitaryPath::identity(2, SpinHalf::kSpan), +1);
  const double tau = SpinHalf::tau_of_omega(0.02);
  for (int k = 0; k < 20; ++k) {
    const double s = 2 * kPi * k / 19.0;
    CHECK(frobenius_norm(back(s, tau) - ha(s, tau)) == 0.0);
    CHECK(frobenius_norm(same(s, tau) - ha(s, tau)) <= 1e-15);
    CHECK(frobenius_norm(minus(s, tau) - hb(s, tau)) <= 1e-15);
    CHECK(frobenius_norm(hc(s, tau) - plus(s, tau)) <= 1e-12);
    CHECK(frobenius_norm(projector_for(hc(s, tau), 0.5) - projector_for(hb(s, tau), -0.5)) <= 1e-10);
    const HermEig eb = herm_eig(hb(s, tau)), ec = herm_eig(hc(s, tau));
    CHECK(ec.values[0] == doctest::Approx(-eb.values[1]).epsilon(1e-12));
  }
  CHECK_THROWS_AS(transform(ha, ua, 2), std::invalid_argument);
}

TEST_CASE("transform preserves the spectrum up to sign") {
  const HamiltonianPath h = random_smooth_path(4, 17, 0.2);
  const UnitaryPath rot(
      4, 1.0, [&](double s, double) { return unitary_exp(random_smooth_path(4, 99, 0.3)(0.0, 1.0), 3.0 * s); });
  for (int sign : {1, -1}) {
    const HamiltonianPath x = transform(h, rot, sign);
    for (double s = 0.0; s <= 1.0; s += 0.1) {
      const HermEig a = herm_eig(h(s, 1.0)), b = herm_eig(x(s, 1.0));
      for (std::size_t n = 0; n < 4; ++n) {
        const double expected = sign > 0 ? a.values[n] : -a.values[3 - n];
        CHECK(std::abs(b.values[n] - expected) <= 1e-10);
      }
    }
  }
}

TEST_CASE("constructed paths are Hermitian on a 1000-point grid") {
  const SpinHalf m{1.1, 1.0};
  const HamiltonianPath hb = dual_of(m.hamiltonian(), m.propagator());
  const double tau = SpinHalf::tau_of_omega(0.01);
  double worst = 0.0;
  for (double s : uniform_grid(0.0, 2 * kPi, 999)) {
    worst = std::max({worst, hermiticity_defect(hb(s, tau)), hermiticity_defect(negate(hb)(s, tau)),
                      hermiticity_defect(m.hamiltonian()(s, tau))});
  }
  CHECK(worst <= 1e-10);
}

TEST_CASE("generator of a unitary path") {
  SUBCASE("identity gives zero") {
    const GeneratedHamiltonian g = generator_of(UnitaryPath::identity(3, 1.0));
    CHECK(frobenius_norm(g.path(0.4, 5.0)) == 0.0);
  }
  SUBCASE("closed-form propagator recovers the spin-1/2 Hamiltonian") {
    const SpinHalf m{kPi / 4, 1.0};
    const GeneratedHamiltonian g = generator_of(m.propagator(), {1e-5, false});
    const double tau = SpinHalf::tau_of_omega(0.1);
    for (double s = 0.1; s < 6.2; s += 0.6) {
      CHECK(frobenius_norm(g.path(s, tau) - m.hamiltonian()(s, tau)) <= 1e-5);
      CHECK(g.antihermitian_residual(s, tau) <= 1e-6);
    }
  }
  SUBCASE("rotation about z gives a constant generator") {
    const double omega0 = 1.7, tau = 12.0;
    const UnitaryPath u(2, 1.0, [&](double s, double t) { return unitary_exp(pauli::z(), 0.5 * omega0 * t * s); });
    const GeneratedHamiltonian g = generator_of(u);
    const ComplexMatrix expected = pauli::z() * Complex(0.5 * omega0);
    for (double s = 0.1; s < 1.0; s += 0.2) CHECK(frobenius_norm(g.path(s, tau) - expected) <= 1e-6);
  }
  SUBCASE("a jump is flagged") {
    const UnitaryPath u(2, 1.0, [](double s, double) {
      return s < 0.5 ? ComplexMatrix::identity(2) : unitary_exp(pauli::x(), 1.0);
    });
    const GeneratedHamiltonian g = generator_of(u);
    CHECK_THROWS_AS(check_generator(g, 1.0, uniform_grid(0.0, 1.0, 100)), NonSmoothPath);
  }
}

TEST_CASE("interpolated custom path") {
  const HamiltonianPath src = random_smooth_path(3, 5);
  std::vector<double> s;
  std::vector<ComplexMatrix> mats;
  for (int k = 0; k <= 200; ++k) {
    s.push_back(k / 200.0);
    mats.push_back(src(k / 200.0, 1.0));
  }
  const HamiltonianPath p = interpolated_path(s, mats);
  CHECK(p.s_span() == doctest::Approx(1.0));
  for (int k = 0; k <= 200; k += 17) CHECK(frobenius_norm(p(s[k], 1.0) - mats[k]) <= 1e-12);
  for (double x = 0.013; x < 1.0; x += 0.11) {
    CHECK(frobenius_norm(p(x, 1.0) - src(x, 1.0)) <= 1e-4);
    const ComplexMatrix fd = central([&](double y) { return p(y, 1.0); }, x, 1e-7);
    CHECK(frobenius_norm(fd - p.derivative(x, 1.0)) <= 1e-5);
  }
  std::vector<double> bad = s;
  std::swap(bad[3], bad[4]);
  CHECK_THROWS_AS(interpolated_path(bad, mats), std::invalid_argument);
  mats[2](0, 1) += 1.0;
  CHECK_THROWS_AS(interpolated_path(s, mats), NonHermitianError);
}
