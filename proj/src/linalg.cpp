#include "adiabat/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace adiabat {

ComplexMatrix::ComplexMatrix(std::size_t dim, std::initializer_list<Complex> rows)
    : dim_(dim), data_(rows) {
  if (data_.size() != dim * dim) {
    throw std::invalid_argument("ComplexMatrix: expected dim*dim entries");
  }
}

ComplexMatrix ComplexMatrix::identity(std::size_t dim) {
  ComplexMatrix m(dim);
  for (std::size_t i = 0; i < dim; ++i) m(i, i) = 1.0;
  return m;
}

ComplexMatrix ComplexMatrix::diagonal(const std::vector<Complex>& d) {
  ComplexMatrix m(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
  return m;
}

ComplexMatrix ComplexMatrix::outer(std::span<const Complex> a, std::span<const Complex> b) {
  if (a.size() != b.size()) throw std::invalid_argument("outer: size mismatch");
  ComplexMatrix m(a.size());
  for (std::size_t r = 0; r < a.size(); ++r)
    for (std::size_t c = 0; c < b.size(); ++c) m(r, c) = a[r] * std::conj(b[c]);
  return m;
}

ComplexMatrix ComplexMatrix::adjoint() const {
  ComplexMatrix m(dim_);
  for (std::size_t r = 0; r < dim_; ++r)
    for (std::size_t c = 0; c < dim_; ++c) m(c, r) = std::conj((*this)(r, c));
  return m;
}

ComplexVector ComplexMatrix::column(std::size_t c) const {
  ComplexVector v(dim_);
  for (std::size_t r = 0; r < dim_; ++r) v[r] = (*this)(r, c);
  return v;
}

Complex ComplexMatrix::trace() const {
  Complex t = 0.0;
  for (std::size_t i = 0; i < dim_; ++i) t += (*this)(i, i);
  return t;
}

ComplexMatrix& ComplexMatrix::operator+=(const ComplexMatrix& o) {
  if (o.dim_ != dim_) throw std::invalid_argument("ComplexMatrix: dimension mismatch");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
  return *this;
}

ComplexMatrix& ComplexMatrix::operator-=(const ComplexMatrix& o) {
  if (o.dim_ != dim_) throw std::invalid_argument("ComplexMatrix: dimension mismatch");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
  return *this;
}

ComplexMatrix& ComplexMatrix::operator*=(Complex a) {
  for (auto& x : data_) x *= a;
  return *this;
}

ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) { return a += b; }
ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) { return a -= b; }
ComplexMatrix operator-(ComplexMatrix a) { return a *= -1.0; }
ComplexMatrix operator*(Complex s, ComplexMatrix a) { return a *= s; }
ComplexMatrix operator*(ComplexMatrix a, Complex s) { return a *= s; }

ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
  const std::size_t n = a.dim();
  if (b.dim() != n) throw std::invalid_argument("ComplexMatrix: dimension mismatch");
  ComplexMatrix m(n);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t k = 0; k < n; ++k) {
      const Complex ark = a(r, k);
      if (ark == Complex{}) continue;
      for (std::size_t c = 0; c < n; ++c) m(r, c) += ark * b(k, c);
    }
  return m;
}

ComplexVector operator*(const ComplexMatrix& a, std::span<const Complex> v) {
  const std::size_t n = a.dim();
  if (v.size() != n) throw std::invalid_argument("ComplexMatrix: dimension mismatch");
  ComplexVector out(n);
  for (std::size_t r = 0; r < n; ++r) {
    Complex acc = 0.0;
    for (std::size_t c = 0; c < n; ++c) acc += a(r, c) * v[c];
    out[r] = acc;
  }
  return out;
}

Complex inner(std::span<const Complex> a, std::span<const Complex> b) {
  if (a.size() != b.size()) throw std::invalid_argument("inner: size mismatch");
  Complex acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += std::conj(a[i]) * b[i];
  return acc;
}

double norm(std::span<const Complex> v) { return std::sqrt(std::real(inner(v, v))); }

Complex expectation(std::span<const Complex> a, const ComplexMatrix& m, std::span<const Complex> b) {
  const std::size_t n = m.dim();
  if (a.size() != n || b.size() != n) throw std::invalid_argument("expectation: size mismatch");
  Complex acc = 0.0;
  for (std::size_t r = 0; r < n; ++r) {
    Complex row = 0.0;
    for (std::size_t c = 0; c < n; ++c) row += m(r, c) * b[c];
    acc += std::conj(a[r]) * row;
  }
  return acc;
}

double frobenius_norm(const ComplexMatrix& m) {
  double acc = 0.0;
  for (const auto& x : m.data()) acc += std::norm(x);
  return std::sqrt(acc);
}

Complex determinant2(const ComplexMatrix& m) {
  if (m.dim() != 2) throw std::invalid_argument("determinant2: expected 2x2");
  return m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
}

double hermiticity_defect(const ComplexMatrix& m) { return frobenius_norm(m - m.adjoint()); }

double unitarity_defect(const ComplexMatrix& u) {
  return frobenius_norm(u.adjoint() * u - ComplexMatrix::identity(u.dim()));
}

ComplexMatrix hermitian_part(const ComplexMatrix& m) { return 0.5 * (m + m.adjoint()); }

namespace pauli {
ComplexMatrix x() { return ComplexMatrix(2, {0.0, 1.0, 1.0, 0.0}); }
ComplexMatrix y() { return ComplexMatrix(2, {0.0, -kI, kI, 0.0}); }
ComplexMatrix z() { return ComplexMatrix(2, {1.0, 0.0, 0.0, -1.0}); }
}  // namespace pauli

namespace {

std::string defect_message(double defect) {
  std::ostringstream os;
  os << "matrix is not Hermitian (||M - M^dagger||_F = " << defect << ")";
  return os.str();
}

double off_diagonal_norm(const ComplexMatrix& a) {
  double acc = 0.0;
  for (std::size_t r = 0; r < a.dim(); ++r)
    for (std::size_t c = 0; c < a.dim(); ++c)
      if (r != c) acc += std::norm(a(r, c));
  return std::sqrt(acc);
}

// a <- G^dagger a G and v <- v G for the unitary G that annihilates a(p, q).
void rotate(ComplexMatrix& a, ComplexMatrix& v, std::size_t p, std::size_t q) {
  const Complex apq = a(p, q);
  const double r = std::abs(apq);
  if (r == 0.0) return;
  const Complex phase = apq / r;  // e^{i phi}
  const double app = a(p, p).real();
  const double aqq = a(q, q).real();
  const double zeta = (aqq - app) / (2.0 * r);
  const double t = (zeta >= 0.0 ? 1.0 : -1.0) / (std::abs(zeta) + std::sqrt(zeta * zeta + 1.0));
  const double c = 1.0 / std::sqrt(1.0 + t * t);
  const double s = t * c;
  // G_pp = c, G_pq = s, G_qp = -s e^{-i phi}, G_qq = c e^{-i phi}
  const Complex gpp = c;
  const Complex gpq = s;
  const Complex gqp = -s * std::conj(phase);
  const Complex gqq = c * std::conj(phase);
  const std::size_t n = a.dim();
  for (std::size_t k = 0; k < n; ++k) {
    const Complex akp = a(k, p);
    const Complex akq = a(k, q);
    a(k, p) = akp * gpp + akq * gqp;
    a(k, q) = akp * gpq + akq * gqq;
    const Complex vkp = v(k, p);
    const Complex vkq = v(k, q);
    v(k, p) = vkp * gpp + vkq * gqp;
    v(k, q) = vkp * gpq + vkq * gqq;
  }
  for (std::size_t k = 0; k < n; ++k) {
    const Complex apk = a(p, k);
    const Complex aqk = a(q, k);
    a(p, k) = std::conj(gpp) * apk + std::conj(gqp) * aqk;
    a(q, k) = std::conj(gpq) * apk + std::conj(gqq) * aqk;
  }
  a(p, q) = 0.0;
  a(q, p) = 0.0;
  a(p, p) = a(p, p).real();
  a(q, q) = a(q, q).real();
}

}  // namespace

NonHermitianError::NonHermitianError(double defect)
    : std::invalid_argument(defect_message(defect)), defect_(defect) {}

HermEig herm_eig(const ComplexMatrix& m, const EigOptions& options) {
  const std::size_t n = m.dim();
  if (n == 0) throw std::invalid_argument("herm_eig: empty matrix");
  const double scale = frobenius_norm(m);
  const double defect = hermiticity_defect(m);
  if (defect > options.hermiticity_tol * std::max(scale, 1e-300) && defect > 0.0) {
    throw NonHermitianError(defect);
  }
  ComplexMatrix a = hermitian_part(m);
  ComplexMatrix v = ComplexMatrix::identity(n);

  const double target = 1e-15 * std::max(scale, 1e-300);
  for (int sweep = 0; sweep < options.max_sweeps; ++sweep) {
    if (off_diagonal_norm(a) <= target) break;
    for (std::size_t p = 0; p + 1 < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) rotate(a, v, p, q);
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return a(i, i).real() < a(j, j).real(); });
  HermEig out{std::vector<double>(n), ComplexMatrix(n)};
  for (std::size_t k = 0; k < n; ++k) {
    out.values[k] = a(order[k], order[k]).real();
    for (std::size_t r = 0; r < n; ++r) out.vectors(r, k) = v(r, order[k]);
  }
  return out;
}

ComplexMatrix unitary_exp(const ComplexMatrix& h, double alpha, const EigOptions& options) {
  const std::size_t n = h.dim();
  if (alpha == 0.0) return ComplexMatrix::identity(n);
  const HermEig eig = herm_eig(h, options);
  ComplexMatrix out(n);
  for (std::size_t k = 0; k < n; ++k) {
    const Complex phase = std::exp(Complex(0.0, -alpha * eig.values[k]));
    for (std::size_t r = 0; r < n; ++r) {
      const Complex vr = eig.vectors(r, k) * phase;
      for (std::size_t c = 0; c < n; ++c) out(r, c) += vr * std::conj(eig.vectors(c, k));
    }
  }
  return out;
}

}  // namespace adiabat
