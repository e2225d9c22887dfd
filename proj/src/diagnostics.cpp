#include "adiabat/diagnostics.hpp"

#include <algorithm>
#include <cmath>

#include "adiabat/quadrature.hpp"

namespace adiabat {

namespace {

std::size_t end_index(const Grid& grid, double s_end) {
  if (s_end < 0.0) return grid.size() - 1;
  const double tol = 1e-9 * std::max(1.0, std::abs(grid.back()));
  auto it = std::lower_bound(grid.begin(), grid.end(), s_end - tol);
  if (it == grid.end() || std::abs(*it - s_end) > tol) {
    throw GridMismatch("s_end is not a grid point");
  }
  return static_cast<std::size_t>(it - grid.begin());
}

void require_same_grid(const PropagationResult& u, const EigenFrame& frame) {
  if (u.grid.size() != frame.grid.size()) throw GridMismatch("propagation and frame grids differ in length");
  for (std::size_t k = 0; k < u.grid.size(); ++k) {
    if (std::abs(u.grid[k] - frame.grid[k]) > 1e-12 * std::max(1.0, std::abs(frame.grid[k]))) {
      throw GridMismatch("propagation and frame grids differ");
    }
  }
}

std::vector<Complex> integrand(const EigenFrame& frame, std::size_t m, std::size_t n, std::size_t last) {
  std::vector<Complex> f(last + 1);
  for (std::size_t k = 0; k <= last; ++k) f[k] = resonance_integrand(frame, k, m, n);
  return f;
}

/// Largest phase advance between neighbouring samples, ignoring samples near zero.
double phase_step(const std::vector<Complex>& f) {
  double peak = 0.0;
  for (const Complex& z : f) peak = std::max(peak, std::abs(z));
  const double floor = 1e-3 * peak;
  double worst = 0.0;
  for (std::size_t k = 0; k + 1 < f.size(); ++k) {
    if (std::abs(f[k]) < floor || std::abs(f[k + 1]) < floor) continue;
    worst = std::max(worst, std::abs(std::arg(f[k + 1] * std::conj(f[k]))));
  }
  return worst;
}

}  // namespace

QacValue qac(const EigenFrame& frame) {
  QacValue q;
  const std::size_t d = frame.dim;
  for (std::size_t k = 0; k < frame.size(); ++k) {
    for (std::size_t m = 0; m < d; ++m) {
      for (std::size_t n = 0; n < d; ++n) {
        if (m == n) continue;
        const double gap = std::abs(frame.energy(k, n) - frame.energy(k, m));
        const double v = std::abs(frame.couplings[k](m, n)) / gap;
        if (v > q.scaled) {
          q.scaled = v;
          q.m = m;
          q.n = n;
          q.s = frame.grid[k];
        }
      }
    }
  }
  q.real_time = q.scaled / frame.rate;
  return q;
}

Complex resonance_integrand(const EigenFrame& frame, std::size_t k, std::size_t m, std::size_t n) {
  return std::polar(1.0, frame.phase(k, m) - frame.phase(k, n)) * frame.couplings[k](m, n);
}

ResonanceIntegral resonance_integral(const EigenFrame& frame, std::size_t m, std::size_t n, double s_end,
                                     const ResonanceOptions& options) {
  if (m >= frame.dim || n >= frame.dim) throw std::out_of_range("resonance_integral: level index out of range");
  const std::size_t last = end_index(frame.grid, s_end);
  std::vector<Complex> f = integrand(frame, m, n, last);
  double step = phase_step(f);
  if (step > options.max_phase_step && options.max_refinements > 0) {
    EigenFrame fine = refine(frame, 4);
    ResonanceOptions o = options;
    o.max_refinements -= 1;
    ResonanceIntegral r = resonance_integral(fine, m, n, frame.grid[last], o);
    r.refinements += 1;
    return r;
  }
  ResonanceIntegral r;
  r.grid.assign(frame.grid.begin(), frame.grid.begin() + static_cast<std::ptrdiff_t>(last + 1));
  CumulativeResult c = cumulative_with_check(r.grid, f);
  r.series = std::move(c.values);
  r.richardson_difference = c.richardson_difference;
  r.value = r.series.back();
  for (const Complex& z : r.series) r.max_abs = std::max(r.max_abs, std::abs(z));
  r.max_phase_step = step;
  return r;
}

std::vector<double> F_series(const EigenFrame& frame) {
  std::vector<double> sq(frame.size(), 0.0);
  for (std::size_t m = 0; m < frame.dim; ++m) {
    for (std::size_t n = m + 1; n < frame.dim; ++n) {
      const std::vector<Complex> r = cumulative_integral(frame.grid, integrand(frame, m, n, frame.size() - 1));
      // |F_mn| = |F_nm| = |R_mn|
      for (std::size_t k = 0; k < r.size(); ++k) sq[k] += 2.0 * std::norm(r[k]);
    }
  }
  for (double& v : sq) v = std::sqrt(v);
  return sq;
}

double F_norm(const EigenFrame& frame, double s_end) { return F_series(frame)[end_index(frame.grid, s_end)]; }

double F_sup(const EigenFrame& frame) {
  const std::vector<double> f = F_series(frame);
  return *std::max_element(f.begin(), f.end());
}

double projector_drift_at(const EigenFrame& frame, std::size_t k) {
  double worst = 0.0;
  for (std::size_t n = 0; n < frame.dim; ++n) {
    worst = std::max(worst, frobenius_norm(frame.projector(k, n) - frame.projector(0, n)));
  }
  return worst;
}

double projector_drift(const EigenFrame& frame) {
  double worst = 0.0;
  for (std::size_t k = 0; k < frame.size(); ++k) worst = std::max(worst, projector_drift_at(frame, k));
  return worst;
}

std::vector<double> intertwining_series(const PropagationResult& u, const EigenFrame& frame) {
  require_same_grid(u, frame);
  std::vector<ComplexMatrix> p0(frame.dim);
  for (std::size_t n = 0; n < frame.dim; ++n) p0[n] = frame.projector(0, n);
  std::vector<double> out(frame.size(), 0.0);
  for (std::size_t k = 0; k < frame.size(); ++k) {
    const ComplexMatrix& uk = u.unitaries[k];
    for (std::size_t n = 0; n < frame.dim; ++n) {
      out[k] = std::max(out[k], frobenius_norm(uk * p0[n] - frame.projector(k, n) * uk));
    }
  }
  return out;
}

double intertwining_defect(const PropagationResult& u, const EigenFrame& frame) {
  const std::vector<double> s = intertwining_series(u, frame);
  return *std::max_element(s.begin(), s.end());
}

double kato_intertwining_defect(const EigenFrame& frame) {
  PropagationResult r;
  r.grid = frame.grid;
  r.unitaries = kato_series(frame);
  return intertwining_defect(r, frame);
}

double w_deviation(const PropagationResult& u, const EigenFrame& frame) {
  require_same_grid(u, frame);
  const ComplexMatrix id = ComplexMatrix::identity(frame.dim);
  double worst = 0.0;
  for (std::size_t k = 0; k < frame.size(); ++k) {
    const ComplexMatrix w = dynamical_phase(frame, k).adjoint() * kato_operator(frame, k).adjoint() * u.unitaries[k];
    worst = std::max(worst, frobenius_norm(w - id));
  }
  return worst;
}

SlopeFit scaling_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw std::invalid_argument("scaling_slope: size mismatch");
  if (x.size() < 3) throw InsufficientSamples("scaling_slope: need at least three samples");
  std::vector<double> lx(x.size()), ly(y.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw UndefinedSlope("scaling_slope: non-positive value, slope undefined");
    lx[i] = std::log(x[i]);
    ly[i] = std::log(y[i]);
  }
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) mx += lx[i], my += ly[i];
  mx /= n, my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  if (sxx == 0.0) throw UndefinedSlope("scaling_slope: all x values coincide");
  SlopeFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double rss = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    const double r = ly[i] - (f.intercept + f.slope * lx[i]);
    rss += r * r;
  }
  f.residual = std::sqrt(rss / n);
  return f;
}

std::string to_string(Classification c) {
  switch (c) {
    case Classification::adiabatic_consistent:
      return "adiabatic_consistent";
    case Classification::weak_resonant_inconsistent:
      return "weak_resonant_inconsistent";
    case Classification::strong_oscillatory:
      return "strong_oscillatory";
    case Classification::nonresonant_averaged:
      return "nonresonant_averaged";
    case Classification::unclassified:
      return "unclassified";
  }
  return "unclassified";
}

std::optional<Classification> classification_from_string(const std::string& s) {
  for (Classification c : {Classification::adiabatic_consistent, Classification::weak_resonant_inconsistent,
                           Classification::strong_oscillatory, Classification::nonresonant_averaged,
                           Classification::unclassified}) {
    if (to_string(c) == s) return c;
  }
  return std::nullopt;
}

Classification classify(const ClassifierInputs& in, const Thresholds& t) {
  if (in.qac_max < t.qac) {
    return in.max_resonance < t.resonance ? Classification::adiabatic_consistent
                                          : Classification::weak_resonant_inconsistent;
  }
  if (!in.F_slope) throw InsufficientSamples("classify: an F slope over at least two tau values is required");
  const double slope = *in.F_slope;
  // Secular growth counts with the non-decaying case.
  if (slope >= -t.slope_tol) return Classification::strong_oscillatory;
  if (slope <= t.decay_slope) return Classification::nonresonant_averaged;
  return Classification::unclassified;
}

DiagnosticsReport analyze(const EigenFrame& frame, const PropagationResult* u, const AnalyzeOptions& options,
                          AnalyzeSeries* series) {
  DiagnosticsReport r;
  r.tau = frame.tau;
  const QacValue q = qac(frame);
  r.qac_max = q.real_time;
  r.qac_scaled = q.scaled;
  r.min_gap = frame.min_gap;
  r.grid_points = frame.size();
  if (series) {
    series->grid = frame.grid;
    series->resonance.clear();
    series->pairs.clear();
  }
  for (std::size_t m = 0; m < frame.dim; ++m) {
    for (std::size_t n = m + 1; n < frame.dim; ++n) {
      ResonanceIntegral ri = resonance_integral(frame, m, n, -1.0, options.resonance);
      r.max_resonance = std::max(r.max_resonance, ri.max_abs);
      r.resonance_richardson = std::max(r.resonance_richardson, ri.richardson_difference);
      if (m == 0 && n == 1) r.resonance_end = ri.value;
      if (series && ri.refinements == 0) {
        series->resonance.push_back(std::move(ri.series));
        series->pairs.emplace_back(m, n);
      }
    }
  }
  std::vector<double> f = F_series(frame);
  r.F_norm = f.back();
  r.F_sup = *std::max_element(f.begin(), f.end());
  std::vector<double> drift(frame.size());
  for (std::size_t k = 0; k < frame.size(); ++k) drift[k] = projector_drift_at(frame, k);
  r.projector_drift = *std::max_element(drift.begin(), drift.end());
  if (u) {
    std::vector<double> iw = intertwining_series(*u, frame);
    r.intertwining_defect = *std::max_element(iw.begin(), iw.end());
    r.w_deviation = w_deviation(*u, frame);
    if (series) series->intertwining = std::move(iw);
  }
  if (series) {
    series->F = std::move(f);
    series->drift = std::move(drift);
  }
  return r;
}

}  // namespace adiabat
