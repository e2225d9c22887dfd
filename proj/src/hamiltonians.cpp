#include "adiabat/hamiltonians.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <sstream>

namespace adiabat {

namespace {

template <typename F>
ComplexMatrix central_difference4(const F& f, double s, double h) {
  ComplexMatrix d = f(s - 2.0 * h);
  d -= 8.0 * f(s - h);
  d += 8.0 * f(s + h);
  d -= f(s + 2.0 * h);
  d *= 1.0 / (12.0 * h);
  return d;
}

void require_same_dim(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    std::ostringstream os;
    os << what << ": dimension mismatch (" << a << " vs " << b << ")";
    throw DimensionMismatch(os.str());
  }
}

}  // namespace

HamiltonianPath::HamiltonianPath(std::size_t dim, double s_span, MatrixFunction eval, MatrixFunction derivative,
                                 bool tau_dependent, std::string label)
    : dim_(dim),
      s_span_(s_span),
      eval_(std::move(eval)),
      derivative_(std::move(derivative)),
      tau_dependent_(tau_dependent),
      label_(std::move(label)) {
  if (dim_ == 0) throw std::invalid_argument("HamiltonianPath: dimension must be positive");
  if (!(s_span_ > 0.0)) throw std::invalid_argument("HamiltonianPath: s_span must be positive");
  if (!eval_) throw std::invalid_argument("HamiltonianPath: missing evaluator");
}

ComplexMatrix HamiltonianPath::derivative(double s, double tau) const {
  if (derivative_) return derivative_(s, tau);
  return central_difference4([&](double x) { return eval_(x, tau); }, s, 1e-4 * s_span_);
}

UnitaryPath::UnitaryPath(std::size_t dim, double s_span, MatrixFunction eval, MatrixFunction derivative,
                         std::string label)
    : dim_(dim),
      s_span_(s_span),
      eval_(std::move(eval)),
      derivative_(std::move(derivative)),
      label_(std::move(label)) {
  if (dim_ == 0) throw std::invalid_argument("UnitaryPath: dimension must be positive");
  if (!(s_span_ > 0.0)) throw std::invalid_argument("UnitaryPath: s_span must be positive");
  if (!eval_) throw std::invalid_argument("UnitaryPath: missing evaluator");
}

UnitaryPath UnitaryPath::identity(std::size_t dim, double s_span) {
  return UnitaryPath(
      dim, s_span, [dim](double, double) { return ComplexMatrix::identity(dim); },
      [dim](double, double) { return ComplexMatrix::zero(dim); }, "identity");
}

ComplexMatrix UnitaryPath::derivative(double s, double tau, double step) const {
  if (derivative_) return derivative_(s, tau);
  const double h = step > 0.0 ? step : 1e-5 * s_span_;
  return central_difference4([&](double x) { return eval_(x, tau); }, s, h);
}

HamiltonianPath dual_of(const HamiltonianPath& h, const UnitaryPath& u) {
  require_same_dim(h.dim(), u.dim(), "dual_of");
  return transform(h, u, -1);
}

HamiltonianPath negate(const HamiltonianPath& h) {
  MatrixFunction eval = [f = h.eval_function()](double s, double tau) { return -f(s, tau); };
  MatrixFunction deriv;
  if (h.has_analytic_derivative()) {
    deriv = [d = h.derivative_function()](double s, double tau) { return -d(s, tau); };
  }
  return HamiltonianPath(h.dim(), h.s_span(), std::move(eval), std::move(deriv), h.tau_dependent(),
                         "-(" + h.label() + ")");
}

HamiltonianPath transform(const HamiltonianPath& h, const UnitaryPath& ux, int sign) {
  require_same_dim(h.dim(), ux.dim(), "transform");
  if (sign != 1 && sign != -1) throw std::invalid_argument("transform: sign must be +1 or -1");
  const double factor = sign;
  MatrixFunction eval = [h, ux, factor](double s, double tau) {
    const ComplexMatrix u = ux(s, tau);
    ComplexMatrix out = u.adjoint() * h(s, tau) * u;
    out *= factor;
    return out;
  };
  MatrixFunction deriv;
  if (h.has_analytic_derivative() && ux.has_analytic_derivative()) {
    // d/ds (U^dagger H U) = U'^dagger H U + U^dagger H' U + U^dagger H U'
    deriv = [h, ux, factor](double s, double tau) {
      const ComplexMatrix u = ux(s, tau);
      const ComplexMatrix du = ux.derivative(s, tau);
      const ComplexMatrix hm = h(s, tau);
      const ComplexMatrix hu = hm * u;
      ComplexMatrix out = du.adjoint() * hu;
      out += u.adjoint() * h.derivative(s, tau) * u;
      out += u.adjoint() * (hm * du);
      out *= factor;
      return out;
    };
  }
  std::string label = (sign < 0 ? "-" : "+") + std::string("U^+(") + h.label() + ")U";
  return HamiltonianPath(h.dim(), h.s_span(), std::move(eval), std::move(deriv), true, std::move(label));
}

HamiltonianPath constant_path(const ComplexMatrix& h, double s_span) {
  const std::size_t n = h.dim();
  return HamiltonianPath(
      n, s_span, [h](double, double) { return h; }, [n](double, double) { return ComplexMatrix::zero(n); },
      false, "constant");
}

HamiltonianPath interpolated_path(std::vector<double> s_values, std::vector<ComplexMatrix> matrices,
                                  std::string label) {
  if (s_values.size() != matrices.size() || s_values.size() < 2) {
    throw std::invalid_argument("interpolated_path: need at least two (s, matrix) samples");
  }
  const std::size_t n = matrices.front().dim();
  for (std::size_t k = 0; k < matrices.size(); ++k) {
    require_same_dim(n, matrices[k].dim(), "interpolated_path");
    if (k > 0 && !(s_values[k] > s_values[k - 1])) {
      throw std::invalid_argument("interpolated_path: s-values must be strictly ascending");
    }
    const double scale = std::max(frobenius_norm(matrices[k]), 1.0);
    if (hermiticity_defect(matrices[k]) > 1e-10 * scale) {
      throw NonHermitianError(hermiticity_defect(matrices[k]));
    }
  }
  if (std::abs(s_values.front()) > 1e-12) {
    throw std::invalid_argument("interpolated_path: s-values must start at 0");
  }
  const double span = s_values.back();

  // Catmull-Rom tangents, one-sided at the ends.
  std::vector<ComplexMatrix> tangents(matrices.size());
  const std::size_t last = matrices.size() - 1;
  for (std::size_t k = 0; k <= last; ++k) {
    const std::size_t lo = k == 0 ? 0 : k - 1;
    const std::size_t hi = k == last ? last : k + 1;
    tangents[k] = (matrices[hi] - matrices[lo]) * Complex(1.0 / (s_values[hi] - s_values[lo]));
  }

  struct Spline {
    std::vector<double> s;
    std::vector<ComplexMatrix> m;
    std::vector<ComplexMatrix> t;

    std::size_t segment(double x) const {
      auto it = std::upper_bound(s.begin(), s.end(), x);
      std::size_t k = it == s.begin() ? 0 : static_cast<std::size_t>(it - s.begin()) - 1;
      return std::min(k, s.size() - 2);
    }
    ComplexMatrix value(double x) const {
      const std::size_t k = segment(x);
      const double h = s[k + 1] - s[k];
      const double u = (x - s[k]) / h;
      const double h00 = 2 * u * u * u - 3 * u * u + 1;
      const double h10 = u * u * u - 2 * u * u + u;
      const double h01 = -2 * u * u * u + 3 * u * u;
      const double h11 = u * u * u - u * u;
      ComplexMatrix out = m[k] * Complex(h00);
      out += t[k] * Complex(h10 * h);
      out += m[k + 1] * Complex(h01);
      out += t[k + 1] * Complex(h11 * h);
      return hermitian_part(out);
    }
    ComplexMatrix slope(double x) const {
      const std::size_t k = segment(x);
      const double h = s[k + 1] - s[k];
      const double u = (x - s[k]) / h;
      const double d00 = (6 * u * u - 6 * u) / h;
      const double d10 = 3 * u * u - 4 * u + 1;
      const double d01 = (-6 * u * u + 6 * u) / h;
      const double d11 = 3 * u * u - 2 * u;
      ComplexMatrix out = m[k] * Complex(d00);
      out += t[k] * Complex(d10);
      out += m[k + 1] * Complex(d01);
      out += t[k + 1] * Complex(d11);
      return hermitian_part(out);
    }
  };
  auto spline = std::make_shared<Spline>(Spline{std::move(s_values), std::move(matrices), std::move(tangents)});
  return HamiltonianPath(
      n, span, [spline](double s, double) { return spline->value(s); },
      [spline](double s, double) { return spline->slope(s); }, false, std::move(label));
}

NonSmoothPath::NonSmoothPath(double s, double residual)
    : std::runtime_error([&] {
        std::ostringstream os;
        os << "unitary path is not smooth enough at s = " << s << " (anti-Hermitian residual " << residual << ")";
        return os.str();
      }()),
      s_(s),
      residual_(residual) {}

GeneratedHamiltonian generator_of(const UnitaryPath& ux, const GeneratorOptions& options) {
  const double span = ux.s_span();
  const double step = options.step > 0.0 ? options.step : 1e-5 * span;
  const bool analytic = options.use_analytic_derivative && ux.has_analytic_derivative();
  auto raw = [ux, step, span, analytic](double s, double tau) {
    const ComplexMatrix du = analytic ? ux.derivative(s, tau)
                                      : central_difference4([&](double x) { return ux(x, tau); }, s, step);
    ComplexMatrix a = du * ux(s, tau).adjoint();
    a *= Complex(0.0, span / tau);  // (i / rate) dU/ds U^dagger
    return a;
  };
  HamiltonianPath path(
      ux.dim(), span, [raw](double s, double tau) { return hermitian_part(raw(s, tau)); }, {}, true,
      "generator(" + ux.label() + ")");
  auto residual = [raw](double s, double tau) { return 0.5 * hermiticity_defect(raw(s, tau)); };
  return GeneratedHamiltonian{std::move(path), std::move(residual)};
}

double check_generator(const GeneratedHamiltonian& g, double tau, const std::vector<double>& grid,
                       double threshold) {
  double worst = 0.0;
  for (double s : grid) {
    const double r = g.antihermitian_residual(s, tau);
    if (r > threshold) throw NonSmoothPath(s, r);
    worst = std::max(worst, r);
  }
  return worst;
}

}  // namespace adiabat
