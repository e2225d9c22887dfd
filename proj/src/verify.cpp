#include "adiabat/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <numbers>
#include <sstream>

#include "adiabat/diagnostics.hpp"
#include "adiabat/models.hpp"

namespace adiabat {

namespace {

constexpr double kPi = std::numbers::pi;

ComplexMatrix paper_reference(const SpinHalf& m) {
  const auto e = m.parallel_eigvecs(0.0);
  return ComplexMatrix(2, {e[0][0], e[1][0], e[0][1], e[1][1]});
}

FrameOptions spin_options(const SpinHalf& m) {
  FrameOptions o;
  o.reference = paper_reference(m);
  return o;
}

struct SpinSystems {
  SpinHalf model;
  HamiltonianPath a;
  HamiltonianPath b;
  HamiltonianPath c;
};

SpinSystems spin_systems(double theta) {
  SpinHalf m{theta, 1.0};
  HamiltonianPath a = m.hamiltonian();
  HamiltonianPath b = dual_of(a, m.propagator());
  HamiltonianPath c = negate(b);
  return {m, std::move(a), std::move(b), std::move(c)};
}

Check slope_check(const std::string& label, const std::vector<double>& x, const std::vector<double>& y,
                  double expected, double tol) {
  try {
    return {label, std::abs(scaling_slope(x, y).slope - expected), tol};
  } catch (const std::exception&) {
    return {label + " (slope undefined)", INFINITY, tol};
  }
}

/// Passes when value > bound; deviation is the shortfall.
Check above(const std::string& label, double value, double bound) {
  return {label, std::max(0.0, bound - value), 0.0};
}

CriterionResult closed_form_propagator() {
  CriterionResult r{1, "closed-form propagator", {}};
  const SpinHalf m{kPi / 4, 1.0};
  const double omega = 0.1;
  const auto t0 = std::chrono::steady_clock::now();
  const PropagationResult p = propagate_adaptive(m.hamiltonian(), SpinHalf::tau_of_omega(omega), 2 * kPi, 1e-8);
  const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  double worst = 0.0;
  for (std::size_t k = 0; k < p.grid.size(); ++k) {
    worst = std::max(worst, frobenius_norm(p.unitaries[k] - m.propagator_at(p.grid[k], omega)));
  }
  r.checks.push_back({"max ||U_num - U_closed||_F over s in [0, 2pi]", worst, 1e-6});
  r.checks.push_back({"runtime in seconds", elapsed, 5.0});
  return r;
}

CriterionResult coupling_identity() {
  CriterionResult r{2, "parallel-transport coupling identity", {}};
  for (double theta : {kPi / 6, kPi / 4, kPi / 3}) {
    const SpinHalf m{theta, 1.0};
    const Grid g = uniform_grid(0.0, 2 * kPi, 999);
    const EigenFrame f = eigenframe(m.hamiltonian(), SpinHalf::tau_of_omega(0.01), g, spin_options(m));
    double worst = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k) worst = std::max(worst, std::abs(f.couplings[k](0, 1) - m.coupling(g[k])));
    std::ostringstream label;
    label << "max |<E1|dE2/ds> - closed form| at theta = " << theta;
    r.checks.push_back({label.str(), worst, 1e-6});
  }
  return r;
}

CriterionResult inconsistency() {
  CriterionResult r{3, "dual-system inconsistency", {}};
  const SpinSystems sys = spin_systems(kPi / 4);
  std::vector<double> taus, defect_a, defect_b;
  double qac_gap = 0.0;
  for (double omega : {1e-2, 1e-3, 1e-4}) {
    const double tau = SpinHalf::tau_of_omega(omega);
    const Grid g = default_grid(sys.a, tau);
    const FrameOptions o = spin_options(sys.model);
    const EigenFrame fa = eigenframe(sys.a, tau, g, o);
    const EigenFrame fb = eigenframe(sys.b, tau, g, o);
    const double qa = qac_max(fa), qb = qac_max(fb);
    qac_gap = std::max(qac_gap, std::abs(qa - qb) / qa);
    taus.push_back(tau);
    defect_a.push_back(intertwining_defect(propagate(sys.a, tau, g), fa));
    defect_b.push_back(intertwining_defect(propagate(sys.b, tau, g), fb));
  }
  r.checks.push_back({"relative |qac(S_a) - qac(S_b)|", qac_gap, 1e-8});
  r.checks.push_back(above("min intertwining defect of S_b above 0.1",
                           *std::min_element(defect_b.begin(), defect_b.end()), 0.1));
  r.checks.push_back(slope_check("|slope of S_a intertwining defect vs tau + 1|", taus, defect_a, -1.0, 0.15));
  return r;
}

CriterionResult dual_resonance() {
  CriterionResult r{4, "dual-system resonance integral", {}};
  for (double theta : {kPi / 4, 0.0}) {
    const SpinSystems sys = spin_systems(theta);
    const double tau = SpinHalf::tau_of_omega(0.01);
    const Grid g = default_grid(sys.a, tau);
    const EigenFrame fb = eigenframe(sys.b, tau, g, spin_options(sys.model));
    const ResonanceIntegral ri = resonance_integral(fb, 0, 1);
    double worst = 0.0;
    for (std::size_t k = 0; k < ri.grid.size(); ++k) {
      worst = std::max(worst, std::abs(ri.series[k] - sys.model.dual_resonance(ri.grid[k])));
    }
    if (theta > 0.0) {
      r.checks.push_back({"max |R_b(s) - (1/2)(1 - exp(i s cos theta)) tan theta|, theta = pi/4", worst, 1e-6});
    } else {
      r.checks.push_back({"max |R_b(s)| at theta = 0", ri.max_abs, 1e-10});
    }
  }
  return r;
}

CriterionResult negated_dual_resonance() {
  CriterionResult r{5, "negated-dual resonance integral", {}};
  const SpinSystems sys = spin_systems(kPi / 4);
  std::vector<double> omegas, values;
  double worst = 0.0;
  for (double omega : {1e-2, 1e-3, 1e-4}) {
    const double tau = SpinHalf::tau_of_omega(omega);
    const EigenFrame fc = eigenframe(sys.c, tau, default_grid(sys.a, tau), spin_options(sys.model));
    const Complex v = resonance_integral(fc, 0, 1).value;
    omegas.push_back(omega);
    values.push_back(std::abs(v));
    worst = std::max(worst, std::abs(v - sys.model.negated_dual_resonance(2 * kPi, omega)));
  }
  r.checks.push_back(slope_check("|slope of |R_c(2pi)| vs omega - 1|", omegas, values, 1.0, 0.05));
  r.checks.push_back({"max |R_c(2pi) - integral of the stated integrand|", worst, 1e-8});
  return r;
}

CriterionResult projector_drift_check() {
  CriterionResult r{6, "projector drift", {}};
  const SpinSystems sys = spin_systems(kPi / 3);
  std::vector<double> omegas, drift;
  for (double omega : {1e-2, 1e-3, 1e-4}) {
    const double tau = SpinHalf::tau_of_omega(omega);
    const EigenFrame fb = eigenframe(sys.b, tau, default_grid(sys.a, tau), spin_options(sys.model));
    omegas.push_back(omega);
    drift.push_back(projector_drift(fb));
  }
  r.checks.push_back(slope_check("|slope of S_b drift vs omega - 1|", omegas, drift, 1.0, 0.1));
  const double tau = SpinHalf::tau_of_omega(0.01);
  const Grid g = default_grid(sys.a, tau);
  const EigenFrame fa = eigenframe(sys.a, tau, g, spin_options(sys.model));
  const std::size_t mid = (g.size() - 1) / 2;
  r.checks.push_back(
      {"|S_a drift at s = pi - sqrt(2) sin theta|", std::abs(projector_drift_at(fa, mid) - std::sqrt(2.0) * std::sin(kPi / 3)), 1e-6});
  return r;
}

CriterionResult phase_cancellation() {
  CriterionResult r{7, "phase cancellation in the dual frame", {}};
  const SpinSystems sys = spin_systems(kPi / 4);
  const double tau = SpinHalf::tau_of_omega(0.01);
  const Grid g = default_grid(sys.a, tau);
  const EigenFrame fb = eigenframe(sys.b, tau, g, spin_options(sys.model));
  double worst = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k) {
    const Complex c01 = sys.model.coupling(g[k]);
    worst = std::max(worst, std::abs(resonance_integrand(fb, k, 0, 1) - c01));
    worst = std::max(worst, std::abs(resonance_integrand(fb, k, 1, 0) + std::conj(c01)));
  }
  r.checks.push_back({"max |S_b resonance integrand - <E_m^a|dE_n^a/ds>|", worst, 1e-6});
  return r;
}

CriterionResult kernel_structure() {
  CriterionResult r{8, "kernel integral scaling", {}};
  const SpinSystems sys = spin_systems(kPi / 4);
  std::vector<double> taus{1e2, 1e3, 1e4}, fa, fb;
  for (double tau : taus) {
    const Grid g = default_grid(sys.a, tau);
    fa.push_back(F_sup(eigenframe(sys.a, tau, g, spin_options(sys.model))));
    fb.push_back(F_sup(eigenframe(sys.b, tau, g, spin_options(sys.model))));
  }
  r.checks.push_back(slope_check("|slope of F(S_a) vs tau + 1|", taus, fa, -1.0, 0.1));
  r.checks.push_back(slope_check("|slope of F(S_b) vs tau|", taus, fb, 0.0, 0.1));
  return r;
}

CriterionResult kato_intertwining() {
  CriterionResult r{9, "Kato operator intertwining", {}};
  for (std::size_t dim : {2u, 4u}) {
    double worst = 0.0;
    int used = 0;
    for (std::uint64_t seed = 1; used < 5 && seed < 100; ++seed) {
      const HamiltonianPath h = random_smooth_path(dim, 1000 * dim + seed, 0.1);
      if (sampled_min_gap(h, 1.0) < 0.2) continue;
      const EigenFrame f = eigenframe(h, 1.0, uniform_grid(0.0, 1.0, 400));
      worst = std::max(worst, kato_intertwining_defect(f));
      ++used;
    }
    r.checks.push_back({"max ||U_A P_n(0) - P_n U_A||_F, dim " + std::to_string(dim), worst, 1e-8});
  }
  return r;
}

CriterionResult classifier() {
  CriterionResult r{10, "scenario classifier", {}};
  auto spin = [](double theta, bool dual) {
    const SpinSystems sys = spin_systems(theta);
    const double tau = SpinHalf::tau_of_omega(0.01);
    const EigenFrame f = eigenframe(dual ? sys.b : sys.a, tau, default_grid(sys.a, tau), spin_options(sys.model));
    const DiagnosticsReport d = analyze(f);
    return classify({d.qac_max, d.max_resonance, std::nullopt});
  };
  auto driven = [](bool resonant) {
    const HamiltonianPath h = resonant ? resonant_drive() : offresonant_drive();
    std::vector<double> taus{20.0, 40.0, 80.0}, fs;
    DiagnosticsReport last;
    for (double tau : taus) {
      GridPolicy p;
      if (!resonant) p.min_intervals = static_cast<std::size_t>(std::ceil(offresonant_drive_frequency(tau) / 0.05));
      last = analyze(eigenframe(h, tau, default_grid(h, tau, p)));
      fs.push_back(last.F_sup);
    }
    return classify({last.qac_max, last.max_resonance, scaling_slope(taus, fs).slope});
  };
  const std::vector<std::pair<std::string, std::function<Classification()>>> cases{
      {"S_a", [&] { return spin(kPi / 4, false); }},
      {"S_b", [&] { return spin(kPi / 4, true); }},
      {"resonant drive", [&] { return driven(true); }},
      {"off-resonant drive", [&] { return driven(false); }},
      {"S_b at theta = 0", [&] { return spin(0.0, true); }},
  };
  const std::vector<Classification> expected{Classification::adiabatic_consistent,
                                             Classification::weak_resonant_inconsistent,
                                             Classification::strong_oscillatory, Classification::nonresonant_averaged,
                                             Classification::adiabatic_consistent};
  for (std::size_t i = 0; i < cases.size(); ++i) {
    const Classification first = cases[i].second();
    const Classification again = cases[i].second();
    const bool ok = first == expected[i] && again == first;
    r.checks.push_back({cases[i].first + " -> " + to_string(expected[i]) + " (got " + to_string(first) + ")",
                        ok ? 0.0 : 1.0, 0.0});
  }
  return r;
}

CriterionResult property_suite() {
  CriterionResult r{11, "coupling routes and frame invariants", {}};
  double route = 0.0, complete = 0.0, idem = 0.0, transport = 0.0, overlap = 1.0;
  int used = 0;
  for (std::uint64_t seed = 1; used < 50 && seed < 1000; ++seed) {
    const HamiltonianPath h = random_smooth_path(3, seed, 0.1);
    if (sampled_min_gap(h, 1.0) < 0.2) continue;
    const EigenFrame f = eigenframe(h, 1.0, uniform_grid(0.0, 1.0, 2000));
    const auto fd = couplings(f, CouplingRoute::finite_difference);
    for (std::size_t k = 0; k < f.size(); ++k) {
      for (std::size_t m = 0; m < 3; ++m) {
        for (std::size_t n = 0; n < 3; ++n) {
          if (m != n) route = std::max(route, std::abs(f.couplings[k](m, n) - fd[k](m, n)));
        }
      }
    }
    const GaugeCheck g = check_gauge(f);
    complete = std::max(complete, g.completeness_defect);
    idem = std::max(idem, g.idempotence_defect);
    transport = std::max(transport, g.transport_residual);
    overlap = std::min(overlap, g.min_overlap);
    ++used;
  }
  r.checks.push_back({"max |Hellmann-Feynman - finite-difference coupling|", route, 1e-6});
  r.checks.push_back({"max ||sum_n P_n - I||_F", complete, 1e-10});
  r.checks.push_back({"max ||P_n P_m - delta_nm P_n||_F", idem, 1e-10});
  r.checks.push_back({"max |<E_n|dE_n/ds>|", transport, 1e-6});
  r.checks.push_back(above("min neighbour overlap above 0.99", overlap, 0.99));
  r.checks.push_back(above("paths sampled (of 50)", used, 49.5));
  return r;
}

}  // namespace

bool CriterionResult::pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass(); });
}

const Check& CriterionResult::worst() const {
  for (const Check& c : checks) {
    if (!c.pass()) return c;
  }
  auto ratio = [](const Check& c) { return c.tolerance > 0.0 ? c.deviation / c.tolerance : 0.0; };
  return *std::max_element(checks.begin(), checks.end(),
                           [&](const Check& a, const Check& b) { return ratio(a) < ratio(b); });
}

std::vector<CriterionResult> verify_paper(const VerifyOptions& options) {
  const std::vector<std::function<CriterionResult()>> all{
      closed_form_propagator, coupling_identity, inconsistency,      dual_resonance,
      negated_dual_resonance, projector_drift_check, phase_cancellation, kernel_structure,
      kato_intertwining,      classifier,            property_suite,
  };
  std::vector<CriterionResult> out;
  for (std::size_t i = 0; i < all.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!options.only.empty() && std::find(options.only.begin(), options.only.end(), id) == options.only.end()) {
      continue;
    }
    CriterionResult r;
    try {
      r = all[i]();
    } catch (const std::exception& e) {
      r = CriterionResult{id, "criterion " + std::to_string(id), {{std::string("raised: ") + e.what(), INFINITY, 0.0}}};
    }
    if (options.tolerance) {
      for (Check& c : r.checks) c.tolerance = *options.tolerance;
    }
    out.push_back(std::move(r));
  }
  return out;
}

nlohmann::ordered_json verify_json(const std::vector<CriterionResult>& results) {
  nlohmann::ordered_json j = nlohmann::ordered_json::array();
  for (const auto& r : results) {
    nlohmann::ordered_json checks = nlohmann::ordered_json::array();
    for (const auto& c : r.checks) {
      checks.push_back({{"label", c.label},
                        {"deviation", std::isfinite(c.deviation) ? nlohmann::ordered_json(c.deviation) : nullptr},
                        {"tolerance", c.tolerance},
                        {"pass", c.pass()}});
    }
    j.push_back({{"id", r.id}, {"name", r.name}, {"pass", r.pass()}, {"checks", checks}});
  }
  return j;
}

std::string verify_table(const std::vector<CriterionResult>& results) {
  std::ostringstream os;
  os.precision(3);
  for (const auto& r : results) {
    const Check& w = r.worst();
    os << (r.pass() ? "PASS" : "FAIL") << "  [" << r.id << "] " << r.name << "  max deviation " << std::scientific
       << w.deviation << " (tolerance " << w.tolerance << ")" << std::defaultfloat << "  " << w.label << '\n';
  }
  return os.str();
}

}  // namespace adiabat
