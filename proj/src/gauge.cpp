#include "adiabat/gauge.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <sstream>

#include "adiabat/quadrature.hpp"

namespace adiabat {

namespace {

struct RawPoint {
  std::vector<double> values;
  ComplexMatrix vectors;
};

RawPoint diagonalize(const HamiltonianPath& h, double s, double tau, const EigOptions& eig) {
  HermEig e = herm_eig(h(s, tau), eig);
  return RawPoint{std::move(e.values), std::move(e.vectors)};
}

Complex column_inner(const ComplexMatrix& a, std::size_t i, const ComplexMatrix& b, std::size_t j) {
  Complex acc = 0.0;
  for (std::size_t r = 0; r < a.dim(); ++r) acc += std::conj(a(r, i)) * b(r, j);
  return acc;
}

/// Unit phase that makes o * phase real non-negative.
Complex unphase(Complex o) {
  const double m = std::abs(o);
  return m > 0.0 ? std::conj(o) / m : Complex(1.0);
}

/// perm[n] = raw column assigned to level n, by greedy largest overlap.
std::vector<std::size_t> match_levels(const ComplexMatrix& previous, const ComplexMatrix& raw, double& worst) {
  const std::size_t d = previous.dim();
  struct Pair {
    double overlap;
    std::size_t n, j;
  };
  std::vector<Pair> pairs;
  pairs.reserve(d * d);
  for (std::size_t n = 0; n < d; ++n) {
    for (std::size_t j = 0; j < d; ++j) pairs.push_back({std::abs(column_inner(previous, n, raw, j)), n, j});
  }
  std::stable_sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) { return a.overlap > b.overlap; });
  std::vector<std::size_t> perm(d, d);
  std::vector<bool> used(d, false);
  std::size_t assigned = 0;
  for (const Pair& p : pairs) {
    if (perm[p.n] != d || used[p.j]) continue;
    perm[p.n] = p.j;
    used[p.j] = true;
    worst = std::min(worst, p.overlap);
    if (++assigned == d) break;
  }
  return perm;
}

void check_gaps(const std::vector<double>& e, const std::vector<std::size_t>& perm, double s0, double s1,
                double floor, double& min_gap) {
  const std::size_t d = perm.size();
  for (std::size_t m = 0; m < d; ++m) {
    for (std::size_t n = m + 1; n < d; ++n) {
      const double gap = std::abs(e[perm[m]] - e[perm[n]]);
      min_gap = std::min(min_gap, gap);
      if (gap < floor) throw CrossingDetected(s0, s1, m, n, gap);
    }
  }
}

EigenFrame assemble(std::shared_ptr<const HamiltonianPath> path, double tau, const Grid& grid,
                    const FrameOptions& options, const std::function<RawPoint(std::size_t)>& at_grid) {
  if (grid.size() < 2) throw std::invalid_argument("eigenframe: need at least two grid points");
  const HamiltonianPath& h = *path;
  const std::size_t d = h.dim();
  const std::size_t count = grid.size();

  EigenFrame f;
  f.grid = grid;
  f.dim = d;
  f.tau = tau;
  f.rate = h.rate(tau);
  f.options = options;
  f.path = path;
  f.values.resize(count * d);
  f.vectors.resize(count);
  f.min_gap = std::numeric_limits<double>::infinity();

  // Level order and phase at the first point.
  {
    RawPoint raw = at_grid(0);
    std::vector<std::size_t> perm(d);
    std::iota(perm.begin(), perm.end(), 0);
    ComplexMatrix v(d);
    if (options.reference) {
      if (options.reference->dim() != d) throw DimensionMismatch("eigenframe: reference has the wrong dimension");
      double worst = 1.0;
      perm = match_levels(*options.reference, raw.vectors, worst);
    }
    for (std::size_t n = 0; n < d; ++n) {
      Complex p;
      if (options.reference) {
        p = unphase(column_inner(*options.reference, n, raw.vectors, perm[n]));
      } else {
        std::size_t big = 0;
        for (std::size_t r = 1; r < d; ++r) {
          if (std::abs(raw.vectors(r, perm[n])) > std::abs(raw.vectors(big, perm[n])) + 1e-14) big = r;
        }
        p = unphase(std::conj(raw.vectors(big, perm[n])));
      }
      for (std::size_t r = 0; r < d; ++r) v(r, n) = raw.vectors(r, perm[n]) * p;
      f.values[n] = raw.values[perm[n]];
    }
    check_gaps(raw.values, perm, grid[0], grid[0], options.gap_floor, f.min_gap);
    f.vectors[0] = std::move(v);
  }

  for (std::size_t k = 0; k + 1 < count; ++k) {
    const double s0 = grid[k], s1 = grid[k + 1];
    const ComplexMatrix& prev = f.vectors[k];
    RawPoint raw = at_grid(k + 1);
    std::vector<std::size_t> perm = match_levels(prev, raw.vectors, f.min_overlap);
    for (std::size_t n = 0; n < d; ++n) {
      const double o = std::abs(column_inner(prev, n, raw.vectors, perm[n]));
      if (o < options.min_overlap) throw DiscontinuousFrame(s0, s1, n, o);
    }
    check_gaps(raw.values, perm, s0, s1, options.gap_floor, f.min_gap);

    RawPoint mid;
    std::vector<std::size_t> mperm;
    if (options.midpoint_correction) {
      mid = diagonalize(h, 0.5 * (s0 + s1), tau, options.eig);
      double worst = 1.0;
      mperm = match_levels(prev, mid.vectors, worst);
      if (worst < options.min_overlap) {
        std::size_t bad = 0;
        for (std::size_t n = 0; n < d; ++n) {
          if (std::abs(column_inner(prev, n, mid.vectors, mperm[n])) <= worst) bad = n;
        }
        throw DiscontinuousFrame(s0, s1, bad, worst);
      }
      check_gaps(mid.values, mperm, s0, s1, options.gap_floor, f.min_gap);
    }

    ComplexMatrix next(d);
    for (std::size_t n = 0; n < d; ++n) {
      const std::size_t j = perm[n];
      const double e_next = raw.values[j];
      f.values[(k + 1) * d + n] = e_next;
      // A level-difference sign change between neighbours is a crossing even
      // when both endpoints are gapped.
      for (std::size_t m = 0; m < n; ++m) {
        const double before = f.values[k * d + n] - f.values[k * d + m];
        const double after = e_next - f.values[(k + 1) * d + m];
        if (before * after < 0.0) throw CrossingDetected(s0, s1, m, n, 0.0);
      }

      Complex p = unphase(column_inner(prev, n, raw.vectors, j));
      if (options.midpoint_correction) {
        // Two half steps through the midpoint, then remove one third of the
        // discrepancy with the single step: the local phase error drops from
        // O(ds^3) to O(ds^4).
        const std::size_t jm = mperm[n];
        const Complex pm = unphase(column_inner(prev, n, mid.vectors, jm));
        Complex om = 0.0;
        for (std::size_t r = 0; r < d; ++r) om += std::conj(mid.vectors(r, jm) * pm) * raw.vectors(r, j);
        const Complex p2 = unphase(om);
        const double delta = std::arg(std::conj(p2) * p);
        p = p2 * std::polar(1.0, -delta / 3.0);
      }
      for (std::size_t r = 0; r < d; ++r) next(r, n) = raw.vectors(r, j) * p;
    }
    f.vectors[k + 1] = std::move(next);
  }

  // Hellmann-Feynman couplings.
  f.couplings.resize(count);
  for (std::size_t k = 0; k < count; ++k) {
    const ComplexMatrix& v = f.vectors[k];
    ComplexMatrix c = v.adjoint() * h.derivative(grid[k], tau) * v;
    for (std::size_t m = 0; m < d; ++m) {
      for (std::size_t n = 0; n < d; ++n) {
        if (m == n) {
          c(m, n) = 0.0;
          continue;
        }
        const double gap = f.values[k * d + n] - f.values[k * d + m];
        if (std::abs(gap) < options.gap_floor) throw CrossingDetected(grid[k], grid[k], m, n, std::abs(gap));
        c(m, n) /= gap;
      }
    }
    f.couplings[k] = std::move(c);
  }

  // Dynamical phases.
  f.phases.resize(count * d);
  std::vector<double> e(count);
  for (std::size_t n = 0; n < d; ++n) {
    for (std::size_t k = 0; k < count; ++k) e[k] = f.values[k * d + n];
    const std::vector<double> integral = cumulative_integral(grid, e);
    for (std::size_t k = 0; k < count; ++k) f.phases[k * d + n] = f.rate * integral[k];
  }
  return f;
}

std::string crossing_message(double s0, double s1, std::size_t m, std::size_t n, double gap) {
  std::ostringstream os;
  os << "eigenvalue crossing between levels " << m << " and " << n << " in s interval [" << s0 << ", " << s1
     << "] (gap " << gap << ")";
  return os.str();
}

std::string discontinuity_message(double s0, double s1, std::size_t level, double overlap) {
  std::ostringstream os;
  os << "discontinuous eigenprojector for level " << level << " in s interval [" << s0 << ", " << s1
     << "] (overlap " << overlap << ")";
  return os.str();
}

}  // namespace

CrossingDetected::CrossingDetected(double s0_, double s1_, std::size_t m_, std::size_t n_, double gap_)
    : std::runtime_error(crossing_message(s0_, s1_, m_, n_, gap_)), s0(s0_), s1(s1_), m(m_), n(n_), gap(gap_) {}

DiscontinuousFrame::DiscontinuousFrame(double s0_, double s1_, std::size_t level_, double overlap_)
    : std::runtime_error(discontinuity_message(s0_, s1_, level_, overlap_)),
      s0(s0_),
      s1(s1_),
      level(level_),
      overlap(overlap_) {}

ComplexMatrix EigenFrame::projector(std::size_t k, std::size_t n) const {
  const ComplexVector v = vector(k, n);
  return ComplexMatrix::outer(v, v);
}

EigenFrame eigenframe(const HamiltonianPath& h, double tau, const Grid& grid, const FrameOptions& options) {
  auto path = std::make_shared<const HamiltonianPath>(h);
  return assemble(path, tau, grid, options,
                  [&](std::size_t k) { return diagonalize(h, grid[k], tau, options.eig); });
}

EigenFrame regauge(const EigenFrame& frame) {
  FrameOptions options = frame.options;
  options.reference = frame.vectors.front();
  return assemble(frame.path, frame.tau, frame.grid, options, [&](std::size_t k) {
    RawPoint p;
    p.values.assign(frame.values.begin() + static_cast<std::ptrdiff_t>(k * frame.dim),
                    frame.values.begin() + static_cast<std::ptrdiff_t>((k + 1) * frame.dim));
    p.vectors = frame.vectors[k];
    return p;
  });
}

EigenFrame refine(const EigenFrame& frame, std::size_t factor) {
  if (factor == 0) throw std::invalid_argument("refine: factor must be positive");
  Grid g;
  g.reserve((frame.size() - 1) * factor + 1);
  for (std::size_t k = 0; k + 1 < frame.size(); ++k) {
    const double h = (frame.grid[k + 1] - frame.grid[k]) / static_cast<double>(factor);
    for (std::size_t j = 0; j < factor; ++j) g.push_back(frame.grid[k] + h * static_cast<double>(j));
  }
  g.push_back(frame.grid.back());
  FrameOptions options = frame.options;
  options.reference = frame.vectors.front();
  return eigenframe(*frame.path, frame.tau, g, options);
}

std::vector<ComplexMatrix> couplings(const EigenFrame& frame, CouplingRoute route) {
  if (route == CouplingRoute::hellmann_feynman) return frame.couplings;
  const std::size_t count = frame.size();
  if (count < 5 || !is_uniform(frame.grid)) {
    throw std::invalid_argument("couplings: finite-difference route needs a uniform grid of at least 5 points");
  }
  const double h = (frame.grid.back() - frame.grid.front()) / static_cast<double>(count - 1);
  const auto& v = frame.vectors;
  std::vector<ComplexMatrix> out(count);
  for (std::size_t k = 0; k < count; ++k) {
    ComplexMatrix dv(frame.dim);
    auto acc = [&](std::size_t j, double w) {
      ComplexMatrix t = v[j];
      t *= Complex(w);
      dv += t;
    };
    if (k >= 2 && k + 2 < count) {
      acc(k - 2, 1.0), acc(k - 1, -8.0), acc(k + 1, 8.0), acc(k + 2, -1.0);
    } else if (k == 0) {
      acc(0, -25.0), acc(1, 48.0), acc(2, -36.0), acc(3, 16.0), acc(4, -3.0);
    } else if (k == 1) {
      acc(0, -3.0), acc(1, -10.0), acc(2, 18.0), acc(3, -6.0), acc(4, 1.0);
    } else if (k + 1 == count) {
      acc(k, 25.0), acc(k - 1, -48.0), acc(k - 2, 36.0), acc(k - 3, -16.0), acc(k - 4, 3.0);
    } else {
      acc(k + 1, 3.0), acc(k, 10.0), acc(k - 1, -18.0), acc(k - 2, 6.0), acc(k - 3, -1.0);
    }
    dv *= Complex(1.0 / (12.0 * h));
    out[k] = v[k].adjoint() * dv;
  }
  return out;
}

ComplexMatrix kato_operator(const EigenFrame& frame, std::size_t k) {
  return frame.vectors[k] * frame.vectors.front().adjoint();
}

ComplexMatrix dynamical_phase(const EigenFrame& frame, std::size_t k) {
  std::vector<Complex> d(frame.dim);
  for (std::size_t n = 0; n < frame.dim; ++n) d[n] = std::polar(1.0, -frame.phase(k, n));
  const ComplexMatrix& v0 = frame.vectors.front();
  return v0 * ComplexMatrix::diagonal(d) * v0.adjoint();
}

ComplexMatrix kato_generator(const EigenFrame& frame, std::size_t k) {
  const ComplexMatrix& v = frame.vectors[k];
  ComplexMatrix g = v * frame.couplings[k] * v.adjoint();
  g *= kI;
  return g;
}

ComplexMatrix kernel(const EigenFrame& frame, std::size_t k) {
  const std::size_t d = frame.dim;
  ComplexMatrix m(d);
  for (std::size_t a = 0; a < d; ++a) {
    for (std::size_t b = 0; b < d; ++b) {
      if (a == b) continue;
      m(a, b) = kI * std::polar(1.0, frame.phase(k, a) - frame.phase(k, b)) * frame.couplings[k](a, b);
    }
  }
  const ComplexMatrix& v0 = frame.vectors.front();
  return v0 * m * v0.adjoint();
}

std::vector<ComplexMatrix> kato_series(const EigenFrame& frame) {
  std::vector<ComplexMatrix> out;
  out.reserve(frame.size());
  for (std::size_t k = 0; k < frame.size(); ++k) out.push_back(kato_operator(frame, k));
  return out;
}

GaugeCheck check_gauge(const EigenFrame& frame) {
  GaugeCheck c;
  const std::size_t d = frame.dim;
  const ComplexMatrix id = ComplexMatrix::identity(d);
  for (std::size_t k = 0; k < frame.size(); ++k) {
    const ComplexMatrix& v = frame.vectors[k];
    std::vector<ComplexMatrix> p(d);
    ComplexMatrix sum(d);
    for (std::size_t n = 0; n < d; ++n) {
      p[n] = frame.projector(k, n);
      sum += p[n];
    }
    c.completeness_defect = std::max(c.completeness_defect, frobenius_norm(sum - id));
    for (std::size_t n = 0; n < d; ++n) {
      for (std::size_t m = 0; m < d; ++m) {
        ComplexMatrix e = p[n] * p[m];
        if (m == n) e -= p[n];
        c.idempotence_defect = std::max(c.idempotence_defect, frobenius_norm(e));
      }
    }
    if (k + 1 < frame.size()) {
      for (std::size_t n = 0; n < d; ++n) {
        c.min_overlap = std::min(c.min_overlap, std::abs(column_inner(v, n, frame.vectors[k + 1], n)));
      }
    }
    if (k >= 2 && k + 2 < frame.size()) {
      const double h = 0.25 * (frame.grid[k + 2] - frame.grid[k - 2]);
      for (std::size_t n = 0; n < d; ++n) {
        auto o = [&](std::size_t j) { return column_inner(v, n, frame.vectors[j], n); };
        const Complex diff = 8.0 * (o(k + 1) - o(k - 1)) - (o(k + 2) - o(k - 2));
        c.transport_residual = std::max(c.transport_residual, std::abs(diff) / (12.0 * h));
      }
    }
  }
  return c;
}

namespace {

/// max_k ||dP_n/ds||_F and ||d2P_n/ds2||_F over levels, second-order central differences.
std::pair<double, double> projector_derivative_norms(const EigenFrame& f) {
  double first = 0.0, second = 0.0;
  for (std::size_t k = 1; k + 1 < f.size(); ++k) {
    const double h = f.grid[k + 1] - f.grid[k];
    for (std::size_t n = 0; n < f.dim; ++n) {
      const ComplexMatrix a = f.projector(k - 1, n), b = f.projector(k, n), c = f.projector(k + 1, n);
      first = std::max(first, frobenius_norm(c - a) / (2.0 * h));
      second = std::max(second, frobenius_norm(c - 2.0 * b + a) / (h * h));
    }
  }
  return {first, second};
}

}  // namespace

RegularityCheck check_projector_regularity(const HamiltonianPath& h, double tau, std::size_t intervals,
                                           const FrameOptions& options) {
  FrameOptions o = options;
  o.midpoint_correction = false;
  const EigenFrame coarse = eigenframe(h, tau, uniform_grid(0.0, h.s_span(), intervals), o);
  const EigenFrame fine = eigenframe(h, tau, uniform_grid(0.0, h.s_span(), 2 * intervals), o);
  const auto [c1, c2] = projector_derivative_norms(coarse);
  const auto [f1, f2] = projector_derivative_norms(fine);
  RegularityCheck r;
  auto ratio = [](double a, double b) { return b > 0.0 ? a / b : (a > 0.0 ? INFINITY : 1.0); };
  r.first_ratio = ratio(f1, c1);
  r.second_ratio = ratio(f2, c2);
  r.ok = r.first_ratio >= 0.5 && r.first_ratio <= 2.0 && r.second_ratio >= 0.5 && r.second_ratio <= 2.0;
  return r;
}

}  // namespace adiabat
