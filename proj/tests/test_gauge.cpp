#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "adiabat/diagnostics.hpp"
#include "adiabat/models.hpp"

using namespace adiabat;

namespace {

constexpr double kPi = std::numbers::pi;

FrameOptions paper_labels(const SpinHalf& m) {
  const auto e = m.parallel_eigvecs(0.0);
  FrameOptions o;
  o.reference = ComplexMatrix(2, {e[0][0], e[1][0], e[0][1], e[1][1]});
  return o;
}

EigenFrame spin_frame(double theta, double omega, bool dual, std::size_t intervals = 4096) {
  const SpinHalf m{theta, 1.0};
  const HamiltonianPath h = dual ? dual_of(m.hamiltonian(), m.propagator()) : m.hamiltonian();
  return eigenframe(h, SpinHalf::tau_of_omega(omega), uniform_grid(0.0, 2 * kPi, intervals), paper_labels(m));
}

}  // namespace

TEST_CASE("spin-1/2 frame: constant eigenvalues and the closed-form coupling") {
  const double theta = 0.6;
  const SpinHalf m{theta, 1.0};
  const EigenFrame f = spin_frame(theta, 0.05, false);
  double worst = 0.0;
  for (std::size_t k = 0; k < f.size(); ++k) {
    CHECK(f.energy(k, 0) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(f.energy(k, 1) == doctest::Approx(-0.5).epsilon(1e-12));
    worst = std::max(worst, std::abs(f.couplings[k](0, 1) - m.coupling(f.grid[k])));
    CHECK(f.couplings[k](0, 0) == Complex(0.0));
  }
  CHECK(worst <= 1e-8);
  CHECK(f.min_gap == doctest::Approx(1.0));
}

TEST_CASE("gauged vectors match the transported closed form") {
  const SpinHalf m{kPi / 3, 1.0};
  const EigenFrame f = spin_frame(kPi / 3, 0.05, false, 2048);
  for (std::size_t k = 0; k < f.size(); k += 101) {
    const auto e = m.parallel_eigvecs(f.grid[k]);
    for (std::size_t n = 0; n < 2; ++n) {
      const ComplexVector v = f.vector(k, n);
      for (int r = 0; r < 2; ++r) CHECK(std::abs(v[r] - e[n][r]) <= 1e-9);
    }
  }
}

TEST_CASE("constant Hamiltonian gives a constant frame") {
  std::mt19937_64 rng(1);
  const HamiltonianPath h = constant_path(random_smooth_path(3, 4)(0.3, 1.0));
  const EigenFrame f = eigenframe(h, 10.0, uniform_grid(0.0, 1.0, 50));
  for (std::size_t k = 0; k < f.size(); ++k) {
    CHECK(frobenius_norm(f.vectors[k] - f.vectors[0]) <= 1e-13);
    CHECK(frobenius_norm(kato_operator(f, k) - ComplexMatrix::identity(3)) <= 1e-13);
    CHECK(frobenius_norm(kato_generator(f, k)) == 0.0);
  }
}

TEST_CASE("dual frame projectors stay within O(omega) of their start") {
  for (double omega : {0.01, 0.002}) {
    const EigenFrame f = spin_frame(kPi / 4, omega, true, 16384);
    CHECK(projector_drift(f) <= 2.0 * omega);
    CHECK(projector_drift(f) >= 0.5 * omega);
    // Labels follow overlap, not eigenvalue order: level 0 carries -omega0/2 here.
    CHECK(f.energy(f.size() / 2, 0) == doctest::Approx(-0.5));
  }
}

TEST_CASE("negated dual frame shares the projectors") {
  const SpinHalf m{kPi / 4, 1.0};
  const HamiltonianPath hb = dual_of(m.hamiltonian(), m.propagator());
  const double tau = SpinHalf::tau_of_omega(0.05);
  const Grid g = uniform_grid(0.0, 2 * kPi, 2048);
  const EigenFrame fb = eigenframe(hb, tau, g, paper_labels(m));
  const EigenFrame fc = eigenframe(negate(hb), tau, g, paper_labels(m));
  for (std::size_t k = 0; k < g.size(); k += 100) {
    for (std::size_t n = 0; n < 2; ++n) CHECK(frobenius_norm(fb.projector(k, n) - fc.projector(k, n)) <= 1e-10);
    CHECK(fc.energy(k, 0) == doctest::Approx(-fb.energy(k, 0)));
  }
}

TEST_CASE("crossings are reported with their interval") {
  const HamiltonianPath h(
      2, 1.0, [](double s, double) { return pauli::z() * Complex(s - 0.5) + pauli::x() * Complex(0.0); });
  SUBCASE("crossing inside an interval") {
    try {
      eigenframe(h, 1.0, uniform_grid(0.0, 1.0, 7));
      FAIL("expected CrossingDetected");
    } catch (const CrossingDetected& e) {
      CHECK(e.s0 <= 0.5);
      CHECK(e.s1 >= 0.5);
    }
  }
  SUBCASE("crossing on a grid point") {
    CHECK_THROWS_AS(eigenframe(h, 1.0, uniform_grid(0.0, 1.0, 8)), CrossingDetected);
  }
}

TEST_CASE("an under-resolved rotation is a discontinuous frame") {
  const HamiltonianPath h(2, 1.0, [](double s, double) {
    return pauli::x() * Complex(std::cos(40.0 * s)) + pauli::y() * Complex(std::sin(40.0 * s));
  });
  CHECK_THROWS_AS(eigenframe(h, 1.0, uniform_grid(0.0, 1.0, 10)), DiscontinuousFrame);
  CHECK_NOTHROW(eigenframe(h, 1.0, uniform_grid(0.0, 1.0, 400)));
}

TEST_CASE("re-gauging is idempotent and phase independent") {
  const HamiltonianPath h = random_smooth_path(4, 21);
  const EigenFrame f = eigenframe(h, 5.0, uniform_grid(0.0, 1.0, 600));
  const EigenFrame again = regauge(f);
  double worst = 0.0;
  for (std::size_t k = 0; k < f.size(); ++k) worst = std::max(worst, frobenius_norm(again.vectors[k] - f.vectors[k]));
  CHECK(worst <= 1e-12);

  EigenFrame scrambled = f;
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> phase(-kPi, kPi);
  for (std::size_t k = 1; k < scrambled.size(); ++k) {
    for (std::size_t n = 0; n < 4; ++n) {
      const Complex p = std::polar(1.0, phase(rng));
      for (std::size_t r = 0; r < 4; ++r) scrambled.vectors[k](r, n) *= p;
    }
  }
  const EigenFrame fixed = regauge(scrambled);
  worst = 0.0;
  for (std::size_t k = 0; k < f.size(); ++k) worst = std::max(worst, frobenius_norm(fixed.vectors[k] - f.vectors[k]));
  CHECK(worst <= 1e-12);
}

TEST_CASE("frame invariants on random paths") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const HamiltonianPath h = random_smooth_path(4, seed);
    const EigenFrame f = eigenframe(h, 3.0, uniform_grid(0.0, 1.0, 1000));
    const GaugeCheck c = check_gauge(f);
    CHECK(c.completeness_defect <= 1e-10);
    CHECK(c.idempotence_defect <= 1e-10);
    CHECK(c.transport_residual <= 1e-6);
    CHECK(c.min_overlap >= 0.99);
  }
}

TEST_CASE("Hellmann-Feynman and finite-difference couplings agree") {
  SUBCASE("spin-1/2") {
    const EigenFrame f = spin_frame(kPi / 4, 0.05, false, 4096);
    const auto fd = couplings(f, CouplingRoute::finite_difference);
    for (std::size_t k = 0; k < f.size(); ++k) {
      CHECK(std::abs(fd[k](0, 1) - f.couplings[k](0, 1)) <= 1e-6);
      CHECK(std::abs(fd[k](0, 0)) <= 1e-6);
    }
    CHECK(std::abs(f.couplings[10](0, 1)) == doctest::Approx(std::sin(kPi / 4) / 2));
  }
  SUBCASE("random 4x4") {
    for (std::uint64_t seed = 30; seed < 34; ++seed) {
      const EigenFrame f = eigenframe(random_smooth_path(4, seed), 2.0, uniform_grid(0.0, 1.0, 2000));
      const auto fd = couplings(f, CouplingRoute::finite_difference);
      double worst = 0.0;
      for (std::size_t k = 0; k < f.size(); ++k) worst = std::max(worst, frobenius_norm(fd[k] - f.couplings[k]));
      CHECK(worst <= 1e-6);
    }
  }
  SUBCASE("theta = 0") {
    const EigenFrame f = spin_frame(0.0, 0.05, false, 256);
    for (const auto& c : couplings(f, CouplingRoute::finite_difference)) CHECK(frobenius_norm(c) <= 1e-12);
    for (const auto& c : f.couplings) CHECK(frobenius_norm(c) == 0.0);
  }
}

TEST_CASE("couplings are stable under grid refinement") {
  const HamiltonianPath h = random_smooth_path(3, 12);
  const EigenFrame coarse = eigenframe(h, 1.0, uniform_grid(0.0, 1.0, 200));
  const EigenFrame fine = refine(coarse, 2);
  REQUIRE(fine.size() == 401);
  double worst = 0.0;
  for (std::size_t k = 0; k < coarse.size(); ++k) worst = std::max(worst, frobenius_norm(coarse.couplings[k] - fine.couplings[2 * k]));
  CHECK(worst <= 1e-6);
}

TEST_CASE("Kato operator") {
  const EigenFrame f = spin_frame(kPi / 4, 0.05, false, 1000);
  CHECK(frobenius_norm(kato_operator(f, 0) - ComplexMatrix::identity(2)) <= 1e-15);
  for (std::size_t k = 0; k < f.size(); k += 10) {
    const ComplexMatrix ua = kato_operator(f, k);
    CHECK(unitarity_defect(ua) <= 1e-12);
    for (std::size_t n = 0; n < 2; ++n) {
      CHECK(frobenius_norm(ua * f.projector(0, n) - f.projector(k, n) * ua) <= 1e-8);
    }
  }
}

TEST_CASE("dynamical phase operator") {
  const double omega = 0.05;
  const EigenFrame f = spin_frame(kPi / 4, omega, false, 1000);
  CHECK(frobenius_norm(dynamical_phase(f, 0) - ComplexMatrix::identity(2)) <= 1e-15);
  for (std::size_t k = 0; k < f.size(); k += 37) {
    const ComplexMatrix phi = dynamical_phase(f, k);
    CHECK(unitarity_defect(phi) <= 1e-12);
    // exp(-i (1/omega) (+-omega0/2) s) in the s = 0 eigenbasis
    const double s = f.grid[k];
    const ComplexVector e0 = f.vector(0, 0), e1 = f.vector(0, 1);
    CHECK(std::abs(expectation(e0, phi, e0) - std::polar(1.0, -0.5 * s / omega)) <= 1e-10);
    CHECK(std::abs(expectation(e1, phi, e1) - std::polar(1.0, 0.5 * s / omega)) <= 1e-10);
    CHECK(std::abs(expectation(e0, phi, e1)) <= 1e-14);
  }
}

TEST_CASE("Kato generator") {
  const EigenFrame f = spin_frame(kPi / 3, 0.05, false, 1000);
  const double bound = std::sin(kPi / 3) / 2 * std::sqrt(2.0);
  for (std::size_t k = 0; k < f.size(); k += 23) {
    const ComplexMatrix kg = kato_generator(f, k);
    CHECK(hermiticity_defect(kg) <= 1e-8);
    const ComplexVector e0 = f.vector(k, 0), e1 = f.vector(k, 1);
    CHECK(std::abs(expectation(e0, kg, e1) - kI * f.couplings[k](0, 1)) <= 1e-12);
    CHECK(std::abs(expectation(e0, kg, e0)) <= 1e-12);
    CHECK(frobenius_norm(kg) <= bound * (1 + 1e-9));
  }
}

TEST_CASE("kernel") {
  SUBCASE("theta = 0") {
    const EigenFrame f = spin_frame(0.0, 0.05, false, 200);
    for (std::size_t k = 0; k < f.size(); ++k) CHECK(frobenius_norm(kernel(f, k)) == 0.0);
  }
  SUBCASE("constant modulus on the spin-1/2 frame") {
    const double theta = 1.1;
    const EigenFrame f = spin_frame(theta, 0.05, false, 1000);
    const ComplexVector e0 = f.vector(0, 0), e1 = f.vector(0, 1);
    for (std::size_t k = 0; k < f.size(); k += 11) {
      const ComplexMatrix kb = kernel(f, k);
      CHECK(std::abs(expectation(e0, kb, e1)) == doctest::Approx(std::sin(theta) / 2).epsilon(1e-8));
      CHECK(std::abs(expectation(e0, kb, e0)) <= 1e-14);
    }
  }
  SUBCASE("dual frame kernel carries no fast oscillation") {
    const double theta = kPi / 4, omega = 0.01;
    const EigenFrame f = spin_frame(theta, omega, true, 20000);
    const ComplexVector e0 = f.vector(0, 0), e1 = f.vector(0, 1);
    const double h = f.grid[1] - f.grid[0];
    Complex prev = expectation(e0, kernel(f, 0), e1);
    double worst = 0.0;
    for (std::size_t k = 1; k < f.size(); ++k) {
      const Complex cur = expectation(e0, kernel(f, k), e1);
      worst = std::max(worst, std::abs(std::arg(cur * std::conj(prev))));
      prev = cur;
    }
    // The S_a kernel would turn by about h / omega per step.
    CHECK(worst <= 1.01 * std::cos(theta) * h);
  }
}

TEST_CASE("projector regularity premise") {
  CHECK(check_projector_regularity(random_smooth_path(3, 2), 1.0).ok);
  const HamiltonianPath cusp(2, 1.0, [](double s, double) {
    const double phi = std::sqrt(std::abs(s - 0.5));
    return pauli::z() * Complex(std::cos(phi)) + pauli::x() * Complex(std::sin(phi));
  });
  const RegularityCheck r = check_projector_regularity(cusp, 1.0, 256);
  CHECK_FALSE(r.ok);
  CHECK(r.second_ratio > 2.0);
}
