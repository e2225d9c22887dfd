#pragma once

#include <optional>
#include <string>
#include <vector>

#include "adiabat/gauge.hpp"
#include "adiabat/propagator.hpp"

namespace adiabat {

struct QacValue {
  /// max over m != n and s of |<E_m|dE_n/dt>| / |E_n - E_m| with t = real time.
  double real_time = 0.0;
  /// Same ratio with the scaled-time derivative.
  double scaled = 0.0;
  std::size_t m = 0, n = 0;
  double s = 0.0;
};

QacValue qac(const EigenFrame& frame);
inline double qac_max(const EigenFrame& frame) { return qac(frame).real_time; }

/// exp(i rate int (E_m - E_n)) <E_m|dE_n/ds> at grid point k.
Complex resonance_integrand(const EigenFrame& frame, std::size_t k, std::size_t m, std::size_t n);

struct ResonanceOptions {
  /// Integrand phase advance per step that triggers a x4 refinement.  The
  /// 4th-order rule's relative error on a pure exponential is about
  /// 0.015 * step^4, so 0.15 keeps it near 1e-5.
  double max_phase_step = 0.15;
  int max_refinements = 2;
};

struct ResonanceIntegral {
  Grid grid;
  /// Cumulative integral on grid.
  std::vector<Complex> series;
  Complex value;
  double max_abs = 0.0;
  double richardson_difference = 0.0;
  double max_phase_step = 0.0;
  int refinements = 0;
};

/// Cumulative resonance integral for the pair (m, n) up to s_end, which must
/// be a grid point (a negative s_end selects the last point).
ResonanceIntegral resonance_integral(const EigenFrame& frame, std::size_t m, std::size_t n, double s_end = -1.0,
                                     const ResonanceOptions& options = {});

/// ||F(s_k)||_F with F(s) = int_0^s Kbar, per grid point.
std::vector<double> F_series(const EigenFrame& frame);
/// ||F(s_end)||_F; a negative s_end selects the last point.
double F_norm(const EigenFrame& frame, double s_end = -1.0);
/// max_s ||F(s)||_F
double F_sup(const EigenFrame& frame);

/// max over n of ||P_n(s_k) - P_n(s_0)||_F
double projector_drift_at(const EigenFrame& frame, std::size_t k);
/// Largest projector_drift_at over the grid.
double projector_drift(const EigenFrame& frame);

/// max over n of ||U(s_k) P_n(0) - P_n(s_k) U(s_k)||_F, per grid point.
std::vector<double> intertwining_series(const PropagationResult& u, const EigenFrame& frame);
double intertwining_defect(const PropagationResult& u, const EigenFrame& frame);
/// Kato operator against its own frame, max over grid of ||U_A P_n(0) - P_n U_A||_F.
double kato_intertwining_defect(const EigenFrame& frame);

/// max over s of ||Phi_A^dagger U_A^dagger U - I||_F
double w_deviation(const PropagationResult& u, const EigenFrame& frame);

class GridMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  /// Root-mean-square residual of the log-log fit.
  double residual = 0.0;
};

class UndefinedSlope : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Least-squares slope of log y against log x.
SlopeFit scaling_slope(const std::vector<double>& x, const std::vector<double>& y);

enum class Classification {
  adiabatic_consistent,
  weak_resonant_inconsistent,
  strong_oscillatory,
  nonresonant_averaged,
  /// Large QAC value with an F slope between the two decision bands.
  unclassified,
};

std::string to_string(Classification c);
std::optional<Classification> classification_from_string(const std::string& s);

struct Thresholds {
  double qac = 0.05;
  double resonance = 0.1;
  double slope_tol = 0.15;
  double decay_slope = -0.5;
};

struct ClassifierInputs {
  double qac_max = 0.0;
  double max_resonance = 0.0;
  /// Slope of F against tau; needed only when qac_max >= threshold.
  std::optional<double> F_slope;
};

class InsufficientSamples : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

Classification classify(const ClassifierInputs& in, const Thresholds& t = {});

struct DiagnosticsReport {
  double tau = 0.0;
  double qac_max = 0.0;
  double qac_scaled = 0.0;
  double max_resonance = 0.0;
  /// Resonance integral of the (0, 1) pair at the end of the grid.
  Complex resonance_end;
  double F_norm = 0.0;
  double F_sup = 0.0;
  double projector_drift = 0.0;
  std::optional<double> intertwining_defect;
  std::optional<double> w_deviation;
  double min_gap = 0.0;
  double resonance_richardson = 0.0;
  std::size_t grid_points = 0;
};

struct AnalyzeOptions {
  ResonanceOptions resonance;
  bool keep_series = false;
};

struct AnalyzeSeries {
  Grid grid;
  std::vector<std::vector<Complex>> resonance;  // per pair (m < n)
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  std::vector<double> F;
  std::vector<double> drift;
  std::vector<double> intertwining;
};

/// Scalar diagnostics of one frame, with the propagation-based ones when u is given.
DiagnosticsReport analyze(const EigenFrame& frame, const PropagationResult* u = nullptr,
                          const AnalyzeOptions& options = {}, AnalyzeSeries* series = nullptr);

}  // namespace adiabat
