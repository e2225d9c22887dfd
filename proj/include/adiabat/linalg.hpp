#pragma once

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace adiabat {

using Complex = std::complex<double>;
using ComplexVector = std::vector<Complex>;

inline constexpr Complex kI{0.0, 1.0};

/// Dense square complex matrix, row-major.
class ComplexMatrix {
 public:
  ComplexMatrix() = default;
  explicit ComplexMatrix(std::size_t dim) : dim_(dim), data_(dim * dim) {}
  ComplexMatrix(std::size_t dim, std::initializer_list<Complex> rows);

  static ComplexMatrix identity(std::size_t dim);
  static ComplexMatrix zero(std::size_t dim) { return ComplexMatrix(dim); }
  static ComplexMatrix diagonal(const std::vector<Complex>& d);
  /// |a><b|
  static ComplexMatrix outer(std::span<const Complex> a, std::span<const Complex> b);

  std::size_t dim() const { return dim_; }

  Complex& operator()(std::size_t r, std::size_t c) { return data_[r * dim_ + c]; }
  const Complex& operator()(std::size_t r, std::size_t c) const { return data_[r * dim_ + c]; }

  ComplexMatrix adjoint() const;
  ComplexVector column(std::size_t c) const;
  Complex trace() const;

  ComplexMatrix& operator+=(const ComplexMatrix& o);
  ComplexMatrix& operator-=(const ComplexMatrix& o);
  ComplexMatrix& operator*=(Complex a);

  const std::vector<Complex>& data() const { return data_; }

 private:
  std::size_t dim_ = 0;
  std::vector<Complex> data_;
};

ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b);
ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b);
ComplexMatrix operator-(ComplexMatrix a);
ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix operator*(Complex s, ComplexMatrix a);
ComplexMatrix operator*(ComplexMatrix a, Complex s);
ComplexVector operator*(const ComplexMatrix& a, std::span<const Complex> v);

/// <a|b>, conjugate-linear in the first argument.
Complex inner(std::span<const Complex> a, std::span<const Complex> b);
double norm(std::span<const Complex> v);
/// <a|M|b>
Complex expectation(std::span<const Complex> a, const ComplexMatrix& m, std::span<const Complex> b);

double frobenius_norm(const ComplexMatrix& m);
/// 2x2 only.
Complex determinant2(const ComplexMatrix& m);

/// ||M - M^dagger||_F
double hermiticity_defect(const ComplexMatrix& m);
/// ||U^dagger U - I||_F
double unitarity_defect(const ComplexMatrix& u);

/// (M + M^dagger) / 2
ComplexMatrix hermitian_part(const ComplexMatrix& m);

namespace pauli {
ComplexMatrix x();
ComplexMatrix y();
ComplexMatrix z();
}  // namespace pauli

struct EigOptions {
  /// Relative hermiticity tolerance, ||M - M^dagger||_F <= tol * ||M||_F.
  double hermiticity_tol = 1e-12;
  int max_sweeps = 64;
};

/// Eigenpairs of a Hermitian matrix; values ascending, vectors are the columns.
struct HermEig {
  std::vector<double> values;
  ComplexMatrix vectors;

  ComplexVector vector(std::size_t n) const { return vectors.column(n); }
};

class NonHermitianError : public std::invalid_argument {
 public:
  explicit NonHermitianError(double defect);
  double defect() const { return defect_; }

 private:
  double defect_;
};

/// Cyclic complex Jacobi.  Phases of the eigenvectors are whatever the
/// rotations produce.
HermEig herm_eig(const ComplexMatrix& m, const EigOptions& options = {});

/// exp(-i alpha H) for Hermitian H.
ComplexMatrix unitary_exp(const ComplexMatrix& h, double alpha, const EigOptions& options = {});

}  // namespace adiabat
