#include "adiabat/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <future>
#include <numbers>
#include <sstream>

#include "adiabat/models.hpp"

namespace adiabat {

using nlohmann::ordered_json;

NumericalFailure::NumericalFailure(std::string stage, const std::string& what)
    : std::runtime_error(stage + ": " + what), stage_(std::move(stage)) {}

namespace {

const std::vector<std::pair<ModelKind, std::string>> kModels{{ModelKind::spin_half, "spin_half"},
                                                             {ModelKind::custom_matrix_path, "custom_matrix_path"},
                                                             {ModelKind::resonant_drive, "resonant_drive"},
                                                             {ModelKind::offresonant_drive, "offresonant_drive"}};
const std::vector<std::pair<SystemKind, std::string>> kSystems{
    {SystemKind::a, "a"}, {SystemKind::b, "b"}, {SystemKind::c, "c"}, {SystemKind::x, "x"}};
const std::vector<std::pair<TransformUnitary, std::string>> kUnitaries{{TransformUnitary::exact, "exact_propagator"},
                                                                       {TransformUnitary::propagated, "propagated"},
                                                                       {TransformUnitary::identity, "identity"}};
const std::vector<std::string> kDiagnostics{"qac", "resonance", "F", "drift", "intertwining", "w"};

template <typename E>
E lookup(const std::vector<std::pair<E, std::string>>& table, const std::string& name, const char* field) {
  for (const auto& [e, n] : table) {
    if (n == name) return e;
  }
  throw ConfigError(std::string(field) + ": unknown value '" + name + "'");
}

template <typename E>
std::string name_of(const std::vector<std::pair<E, std::string>>& table, E e) {
  for (const auto& [v, n] : table) {
    if (v == e) return n;
  }
  return "?";
}

double number(const ordered_json& j, const char* field) {
  if (!j.is_number()) throw ConfigError(std::string(field) + ": expected a number");
  return j.get<double>();
}

std::vector<double> number_list(const ordered_json& j, const char* field) {
  std::vector<double> out;
  if (j.is_number()) {
    out.push_back(j.get<double>());
  } else if (j.is_array()) {
    for (const auto& v : j) out.push_back(number(v, field));
  } else {
    throw ConfigError(std::string(field) + ": expected a number or an array of numbers");
  }
  return out;
}

Complex complex_entry(const ordered_json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) {
    return {j[0].get<double>(), j[1].get<double>()};
  }
  throw ConfigError("custom.matrices: entries must be numbers or [re, im] pairs");
}

ordered_json complex_json(Complex z) { return ordered_json::array({z.real(), z.imag()}); }

void check_keys(const ordered_json& j, std::initializer_list<const char*> allowed, const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return it.key() == a; })) {
      throw ConfigError(where + ": unknown key '" + it.key() + "'");
    }
  }
}

}  // namespace

std::string to_string(SystemKind s) { return name_of(kSystems, s); }

ScenarioConfig parse_config(const ordered_json& j) {
  if (!j.is_object()) throw ConfigError("config: expected a JSON object");
  check_keys(j,
             {"schema", "model", "parameters", "custom", "system", "transform", "grid", "diagnostics", "thresholds",
              "output"},
             "config");
  if (!j.contains("schema") || !j["schema"].is_string() || j["schema"].get<std::string>() != kConfigSchema) {
    throw ConfigError(std::string("schema: expected \"") + kConfigSchema + "\"");
  }
  ScenarioConfig c;
  if (j.contains("model")) {
    if (!j["model"].is_string()) throw ConfigError("model: expected a string");
    c.model = lookup(kModels, j["model"].get<std::string>(), "model");
  }
  if (j.contains("parameters")) {
    const auto& p = j["parameters"];
    if (!p.is_object()) throw ConfigError("parameters: expected an object");
    check_keys(p, {"theta", "omega0", "omega", "tau", "delta", "amplitude", "sweep", "coupling", "drive_frequency"},
               "parameters");
    if (p.contains("theta")) c.theta = number(p["theta"], "parameters.theta");
    if (p.contains("omega0")) c.omega0 = number(p["omega0"], "parameters.omega0");
    if (p.contains("omega")) c.omega = number_list(p["omega"], "parameters.omega");
    if (p.contains("tau")) c.tau = number_list(p["tau"], "parameters.tau");
    if (p.contains("delta")) c.delta = number(p["delta"], "parameters.delta");
    if (p.contains("amplitude")) c.amplitude = number(p["amplitude"], "parameters.amplitude");
    if (p.contains("sweep")) c.sweep = number(p["sweep"], "parameters.sweep");
    if (p.contains("coupling")) c.coupling = number(p["coupling"], "parameters.coupling");
    if (p.contains("drive_frequency")) c.drive_frequency = number(p["drive_frequency"], "parameters.drive_frequency");
  }
  if (j.contains("custom")) {
    const auto& cu = j["custom"];
    if (!cu.is_object()) throw ConfigError("custom: expected an object");
    check_keys(cu, {"s", "matrices"}, "custom");
    if (cu.contains("s")) c.custom_s = number_list(cu["s"], "custom.s");
    if (cu.contains("matrices")) {
      if (!cu["matrices"].is_array()) throw ConfigError("custom.matrices: expected an array");
      for (const auto& m : cu["matrices"]) {
        if (!m.is_array() || m.empty()) throw ConfigError("custom.matrices: each matrix must be a non-empty array of rows");
        const std::size_t d = m.size();
        ComplexMatrix mat(d);
        for (std::size_t r = 0; r < d; ++r) {
          if (!m[r].is_array() || m[r].size() != d) throw ConfigError("custom.matrices: matrices must be square");
          for (std::size_t col = 0; col < d; ++col) mat(r, col) = complex_entry(m[r][col]);
        }
        c.custom_matrices.push_back(std::move(mat));
      }
    }
  }
  if (j.contains("system")) {
    if (!j["system"].is_string()) throw ConfigError("system: expected a string");
    c.system = lookup(kSystems, j["system"].get<std::string>(), "system");
  }
  if (j.contains("transform")) {
    const auto& t = j["transform"];
    if (!t.is_object()) throw ConfigError("transform: expected an object");
    check_keys(t, {"sign", "unitary"}, "transform");
    if (t.contains("sign")) {
      if (!t["sign"].is_number_integer()) throw ConfigError("transform.sign: expected +1 or -1");
      c.transform_sign = t["sign"].get<int>();
    }
    if (t.contains("unitary")) {
      if (!t["unitary"].is_string()) throw ConfigError("transform.unitary: expected a string");
      c.transform_unitary = lookup(kUnitaries, t["unitary"].get<std::string>(), "transform.unitary");
    }
  }
  if (j.contains("grid")) {
    const auto& g = j["grid"];
    if (g.is_number_integer()) {
      c.points_per_2pi = g.get<std::size_t>();
    } else if (g.is_object()) {
      check_keys(g, {"points_per_2pi", "max_phase_step", "substeps"}, "grid");
      if (g.contains("points_per_2pi")) {
        if (!g["points_per_2pi"].is_number_integer() || g["points_per_2pi"].get<long long>() <= 0) {
          throw ConfigError("grid.points_per_2pi: expected a positive integer");
        }
        c.points_per_2pi = g["points_per_2pi"].get<std::size_t>();
      }
      if (g.contains("max_phase_step")) c.max_phase_step = number(g["max_phase_step"], "grid.max_phase_step");
      if (g.contains("substeps")) {
        if (!g["substeps"].is_number_integer() || g["substeps"].get<long long>() <= 0) {
          throw ConfigError("grid.substeps: expected a positive integer");
        }
        c.substeps = g["substeps"].get<std::size_t>();
      }
    } else {
      throw ConfigError("grid: expected an integer or an object");
    }
  }
  if (j.contains("diagnostics")) {
    if (!j["diagnostics"].is_array()) throw ConfigError("diagnostics: expected an array of names");
    c.diagnostics.clear();
    for (const auto& d : j["diagnostics"]) {
      if (!d.is_string()) throw ConfigError("diagnostics: expected an array of names");
      const std::string name = d.get<std::string>();
      if (std::find(kDiagnostics.begin(), kDiagnostics.end(), name) == kDiagnostics.end()) {
        throw ConfigError("diagnostics: unknown diagnostic '" + name + "'");
      }
      if (std::find(c.diagnostics.begin(), c.diagnostics.end(), name) == c.diagnostics.end()) {
        c.diagnostics.push_back(name);
      }
    }
    // Canonical order.
    std::vector<std::string> ordered;
    for (const auto& name : kDiagnostics) {
      if (std::find(c.diagnostics.begin(), c.diagnostics.end(), name) != c.diagnostics.end()) ordered.push_back(name);
    }
    c.diagnostics = std::move(ordered);
  }
  if (j.contains("thresholds")) {
    const auto& t = j["thresholds"];
    if (!t.is_object()) throw ConfigError("thresholds: expected an object");
    check_keys(t, {"qac", "resonance", "slope_tol", "decay_slope"}, "thresholds");
    if (t.contains("qac")) c.thresholds.qac = number(t["qac"], "thresholds.qac");
    if (t.contains("resonance")) c.thresholds.resonance = number(t["resonance"], "thresholds.resonance");
    if (t.contains("slope_tol")) c.thresholds.slope_tol = number(t["slope_tol"], "thresholds.slope_tol");
    if (t.contains("decay_slope")) c.thresholds.decay_slope = number(t["decay_slope"], "thresholds.decay_slope");
  }
  if (j.contains("output")) {
    const auto& o = j["output"];
    if (!o.is_object()) throw ConfigError("output: expected an object");
    check_keys(o, {"directory", "format", "series_rows"}, "output");
    if (o.contains("directory")) {
      if (!o["directory"].is_string()) throw ConfigError("output.directory: expected a string");
      c.output_directory = o["directory"].get<std::string>();
    }
    if (o.contains("format")) {
      if (!o["format"].is_string()) throw ConfigError("output.format: expected a string");
      c.output_format = o["format"].get<std::string>();
      if (c.output_format != "json" && c.output_format != "json+csv") {
        throw ConfigError("output.format: expected \"json\" or \"json+csv\"");
      }
    }
    if (o.contains("series_rows")) {
      if (!o["series_rows"].is_number_integer() || o["series_rows"].get<long long>() < 2) {
        throw ConfigError("output.series_rows: expected an integer of at least 2");
      }
      c.series_rows = o["series_rows"].get<std::size_t>();
    }
  }

  // Invariants.
  if (!(c.theta >= 0.0 && c.theta <= std::numbers::pi + 1e-12)) throw ConfigError("parameters.theta: must lie in [0, pi]");
  if (!(c.omega0 > 0.0)) throw ConfigError("parameters.omega0: must be positive");
  if (c.points_per_2pi < 256) throw ConfigError("grid.points_per_2pi: must be at least 256");
  if (!(c.max_phase_step > 0.0)) throw ConfigError("grid.max_phase_step: must be positive");
  if (c.transform_sign != 1 && c.transform_sign != -1) throw ConfigError("transform.sign: expected +1 or -1");
  if (!c.omega.empty() && !c.tau.empty()) throw ConfigError("parameters: give either omega or tau, not both");
  for (double w : c.omega) {
    if (!(w > 0.0)) throw ConfigError("parameters.omega: every value must be positive");
  }
  for (double t : c.tau) {
    if (!(t > 0.0)) throw ConfigError("parameters.tau: every value must be positive");
  }
  if (!c.omega.empty() && c.model != ModelKind::spin_half) {
    throw ConfigError("parameters.omega: only the spin_half model is parametrized by omega; use tau");
  }
  if (c.omega.empty() && c.tau.empty()) throw ConfigError("parameters: need omega or tau values");
  if (c.model == ModelKind::custom_matrix_path) {
    if (c.custom_matrices.size() < 2 || c.custom_s.size() != c.custom_matrices.size()) {
      throw ConfigError("custom: need matching s and matrices arrays with at least two samples");
    }
    for (std::size_t k = 0; k < c.custom_matrices.size(); ++k) {
      if (c.custom_matrices[k].dim() != c.custom_matrices[0].dim()) {
        throw ConfigError("custom.matrices: all matrices must share one dimension");
      }
      const double scale = std::max(1.0, frobenius_norm(c.custom_matrices[k]));
      if (hermiticity_defect(c.custom_matrices[k]) > 1e-10 * scale) {
        throw ConfigError("custom.matrices: matrix " + std::to_string(k) + " is not Hermitian");
      }
      if (k > 0 && !(c.custom_s[k] > c.custom_s[k - 1])) throw ConfigError("custom.s: must be strictly ascending");
    }
    if (c.custom_s.front() != 0.0) throw ConfigError("custom.s: must start at 0");
    if (c.system == SystemKind::x && c.transform_unitary == TransformUnitary::exact) {
      throw ConfigError("transform.unitary: no closed-form propagator exists for custom_matrix_path; use \"propagated\"");
    }
  }
  if ((c.model == ModelKind::resonant_drive || c.model == ModelKind::offresonant_drive) &&
      c.system == SystemKind::x && c.transform_unitary == TransformUnitary::exact) {
    throw ConfigError("transform.unitary: no closed-form propagator exists for this model; use \"propagated\"");
  }
  return c;
}

ScenarioConfig load_config(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot open config file " + file.string());
  ordered_json j;
  try {
    j = ordered_json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  return parse_config(j);
}

ordered_json to_json(const ScenarioConfig& c) {
  ordered_json j;
  j["schema"] = kConfigSchema;
  j["model"] = name_of(kModels, c.model);
  ordered_json p;
  switch (c.model) {
    case ModelKind::spin_half:
      p["theta"] = c.theta;
      p["omega0"] = c.omega0;
      break;
    case ModelKind::resonant_drive:
      p["delta"] = c.delta;
      p["amplitude"] = c.amplitude;
      break;
    case ModelKind::offresonant_drive:
      p["delta"] = c.delta;
      p["sweep"] = c.sweep;
      p["coupling"] = c.coupling;
      p["drive_frequency"] = c.drive_frequency;
      break;
    case ModelKind::custom_matrix_path:
      break;
  }
  if (!c.omega.empty()) p["omega"] = c.omega;
  if (!c.tau.empty()) p["tau"] = c.tau;
  j["parameters"] = p;
  if (c.model == ModelKind::custom_matrix_path) {
    ordered_json m = ordered_json::array();
    for (const auto& mat : c.custom_matrices) {
      ordered_json rows = ordered_json::array();
      for (std::size_t r = 0; r < mat.dim(); ++r) {
        ordered_json row = ordered_json::array();
        for (std::size_t col = 0; col < mat.dim(); ++col) row.push_back(complex_json(mat(r, col)));
        rows.push_back(row);
      }
      m.push_back(rows);
    }
    j["custom"] = {{"s", c.custom_s}, {"matrices", m}};
  }
  j["system"] = to_string(c.system);
  if (c.system == SystemKind::x) {
    j["transform"] = {{"sign", c.transform_sign}, {"unitary", name_of(kUnitaries, c.transform_unitary)}};
  }
  j["grid"] = {{"points_per_2pi", c.points_per_2pi}, {"max_phase_step", c.max_phase_step}, {"substeps", c.substeps}};
  j["diagnostics"] = c.diagnostics;
  j["thresholds"] = {{"qac", c.thresholds.qac},
                     {"resonance", c.thresholds.resonance},
                     {"slope_tol", c.thresholds.slope_tol},
                     {"decay_slope", c.thresholds.decay_slope}};
  j["output"] = {{"directory", c.output_directory}, {"format", c.output_format}, {"series_rows", c.series_rows}};
  return j;
}

namespace {

bool wants(const ScenarioConfig& c, const char* name) {
  return std::find(c.diagnostics.begin(), c.diagnostics.end(), name) != c.diagnostics.end();
}

HamiltonianPath base_path(const ScenarioConfig& c) {
  switch (c.model) {
    case ModelKind::spin_half:
      return SpinHalf{c.theta, c.omega0}.hamiltonian();
    case ModelKind::custom_matrix_path:
      return interpolated_path(c.custom_s, c.custom_matrices, "custom");
    case ModelKind::resonant_drive:
      return resonant_drive(c.delta, c.amplitude);
    case ModelKind::offresonant_drive:
      return offresonant_drive(c.delta, c.sweep, c.coupling, c.drive_frequency);
  }
  throw ConfigError("model: unsupported");
}

std::vector<double> tau_values(const ScenarioConfig& c) {
  if (!c.tau.empty()) return c.tau;
  std::vector<double> t;
  for (double w : c.omega) t.push_back(SpinHalf::tau_of_omega(w));
  return t;
}

template <typename F>
auto stage(const char* name, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const CrossingDetected& e) {
    throw NumericalFailure(name, e.what());
  } catch (const DiscontinuousFrame& e) {
    throw NumericalFailure(name, e.what());
  } catch (const StepCapExceeded& e) {
    throw NumericalFailure(name, e.what());
  } catch (const NonSmoothPath& e) {
    throw NumericalFailure(name, e.what());
  } catch (const NonHermitianError& e) {
    throw NumericalFailure(name, e.what());
  }
}

TauEntry evaluate(const ScenarioConfig& c, double tau, std::optional<double> omega, bool keep_series) {
  const HamiltonianPath base = base_path(c);
  GridPolicy policy;
  policy.points_per_2pi = c.points_per_2pi;
  policy.max_phase_step = c.max_phase_step;
  if (c.model == ModelKind::offresonant_drive) {
    policy.min_intervals = static_cast<std::size_t>(std::ceil(offresonant_drive_frequency(tau, c.drive_frequency) / 0.05));
  }
  const Grid grid = stage("grid", [&] { return default_grid(base, tau, policy); });
  PropagateOptions popts;
  popts.substeps = c.substeps;

  std::optional<UnitaryPath> u;
  auto base_unitary = [&](TransformUnitary kind) -> UnitaryPath {
    if (kind == TransformUnitary::identity) return UnitaryPath::identity(base.dim(), base.s_span());
    if (kind == TransformUnitary::exact && c.model == ModelKind::spin_half) {
      return SpinHalf{c.theta, c.omega0}.propagator();
    }
    const PropagationResult r = stage("propagate", [&] { return propagate(base, tau, grid, popts); });
    return sampled_path(r, base, tau);
  };
  std::optional<HamiltonianPath> system;
  switch (c.system) {
    case SystemKind::a:
      system = base;
      break;
    case SystemKind::b:
      system = dual_of(base, base_unitary(TransformUnitary::exact));
      break;
    case SystemKind::c:
      system = negate(dual_of(base, base_unitary(TransformUnitary::exact)));
      break;
    case SystemKind::x:
      system = transform(base, base_unitary(c.transform_unitary), c.transform_sign);
      break;
  }

  FrameOptions fopts;
  if (c.model == ModelKind::spin_half) {
    const auto e = SpinHalf{c.theta, c.omega0}.parallel_eigvecs(0.0);
    fopts.reference = ComplexMatrix(2, {e[0][0], e[1][0], e[0][1], e[1][1]});
  }
  const EigenFrame frame = stage("eigenframe", [&] { return eigenframe(*system, tau, grid, fopts); });
  std::optional<PropagationResult> prop;
  if (wants(c, "intertwining") || wants(c, "w")) {
    prop = stage("propagate", [&] { return propagate(*system, tau, grid, popts); });
  }
  TauEntry e;
  e.tau = tau;
  e.omega = omega;
  AnalyzeOptions aopts;
  e.report = stage("diagnostics",
                   [&] { return analyze(frame, prop ? &*prop : nullptr, aopts, keep_series ? &e.series : nullptr); });
  return e;
}

/// Log-log slope allowing two samples, for the classifier.
std::optional<double> loose_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() < 2) return std::nullopt;
  if (x.size() >= 3) return scaling_slope(x, y).slope;
  if (!(y[0] > 0.0 && y[1] > 0.0) || x[0] == x[1]) return std::nullopt;
  return std::log(y[1] / y[0]) / std::log(x[1] / x[0]);
}

}  // namespace

RunReport run(const ScenarioConfig& config, const RunOptions& options) {
  RunReport r;
  r.config = config;
  r.threads = std::max(1, options.threads);
  r.seed = options.seed;
  const std::vector<double> taus = tau_values(config);
  r.entries.resize(taus.size());
  // Bounded fan-out; results land by index so ordering never depends on timing.
  for (std::size_t start = 0; start < taus.size(); start += static_cast<std::size_t>(r.threads)) {
    const std::size_t stop = std::min(taus.size(), start + static_cast<std::size_t>(r.threads));
    std::vector<std::future<TauEntry>> jobs;
    for (std::size_t i = start; i < stop; ++i) {
      std::optional<double> omega;
      if (!config.omega.empty()) omega = config.omega[i];
      jobs.push_back(std::async(r.threads > 1 ? std::launch::async : std::launch::deferred, evaluate,
                                std::cref(config), taus[i], omega, options.keep_series));
    }
    for (std::size_t i = start; i < stop; ++i) r.entries[i] = jobs[i - start].get();
  }

  std::vector<double> t, f;
  for (const auto& e : r.entries) {
    t.push_back(e.tau);
    f.push_back(e.report.F_sup);
  }
  try {
    r.F_slope = loose_slope(t, f);
  } catch (const UndefinedSlope&) {
    r.F_slope.reset();
  }
  for (auto& e : r.entries) {
    ClassifierInputs in{e.report.qac_max, e.report.max_resonance, r.F_slope};
    try {
      e.classification = classify(in, config.thresholds);
    } catch (const InsufficientSamples&) {
      e.classification.reset();
    }
  }
  return r;
}

RunReport scan(const ScenarioConfig& config, const RunOptions& options) {
  if (tau_values(config).size() < 3) throw ConfigError("scan: needs at least three tau (or omega) values");
  RunReport r = run(config, options);
  struct Quantity {
    const char* name;
    std::function<std::optional<double>(const DiagnosticsReport&)> get;
  };
  const std::vector<Quantity> quantities{
      {"qac_max", [](const DiagnosticsReport& d) { return std::optional<double>(d.qac_max); }},
      {"max_resonance", [](const DiagnosticsReport& d) { return std::optional<double>(d.max_resonance); }},
      {"F_norm", [](const DiagnosticsReport& d) { return std::optional<double>(d.F_norm); }},
      {"F_sup", [](const DiagnosticsReport& d) { return std::optional<double>(d.F_sup); }},
      {"projector_drift", [](const DiagnosticsReport& d) { return std::optional<double>(d.projector_drift); }},
      {"intertwining_defect", [](const DiagnosticsReport& d) { return d.intertwining_defect; }},
      {"w_deviation", [](const DiagnosticsReport& d) { return d.w_deviation; }},
  };
  for (const auto& q : quantities) {
    std::vector<double> x, y;
    for (const auto& e : r.entries) {
      const auto v = q.get(e.report);
      if (!v) break;
      x.push_back(e.tau);
      y.push_back(*v);
    }
    if (x.size() != r.entries.size()) continue;
    try {
      r.slopes.emplace_back(q.name, scaling_slope(x, y));
    } catch (const UndefinedSlope&) {
      // Reported as absent.
    }
  }
  return r;
}

ordered_json report_json(const RunReport& r) {
  const ScenarioConfig& c = r.config;
  ordered_json j;
  j["schema"] = kReportSchema;
  j["config"] = to_json(c);
  j["provenance"] = {
      {"version", kVersion},
      {"integrator", "midpoint_exponential"},
      {"substeps", c.substeps},
      {"step_cap", PropagateOptions{}.step_cap},
      {"eigensolver", "cyclic_jacobi"},
      {"gauge", "overlap_transport_with_midpoint_correction"},
      {"gap_floor", FrameOptions{}.gap_floor},
      {"min_overlap", FrameOptions{}.min_overlap},
      {"resonance_max_phase_step", ResonanceOptions{}.max_phase_step},
      {"norm", "frobenius"},
      {"threads", r.threads},
      {"seed", r.seed ? ordered_json(*r.seed) : ordered_json(nullptr)},
  };
  ordered_json results = ordered_json::array();
  for (const auto& e : r.entries) {
    const DiagnosticsReport& d = e.report;
    ordered_json x;
    x["tau"] = e.tau;
    if (e.omega) x["omega"] = *e.omega;
    x["grid_points"] = d.grid_points;
    x["min_gap"] = d.min_gap;
    if (wants(c, "qac")) {
      x["qac_max"] = d.qac_max;
      x["qac_scaled"] = d.qac_scaled;
    }
    if (wants(c, "resonance")) {
      x["max_resonance"] = d.max_resonance;
      x["resonance_end"] = {{"re", d.resonance_end.real()}, {"im", d.resonance_end.imag()}};
      x["resonance_richardson"] = d.resonance_richardson;
    }
    if (wants(c, "F")) {
      x["F_norm"] = d.F_norm;
      x["F_sup"] = d.F_sup;
    }
    if (wants(c, "drift")) x["projector_drift"] = d.projector_drift;
    if (wants(c, "intertwining") && d.intertwining_defect) x["intertwining_defect"] = *d.intertwining_defect;
    if (wants(c, "w") && d.w_deviation) x["w_deviation"] = *d.w_deviation;
    x["classification"] = e.classification ? ordered_json(to_string(*e.classification)) : ordered_json(nullptr);
    results.push_back(x);
  }
  j["results"] = results;
  j["F_slope"] = r.F_slope ? ordered_json(*r.F_slope) : ordered_json(nullptr);
  if (!r.slopes.empty()) {
    ordered_json s;
    for (const auto& [name, fit] : r.slopes) {
      s[name] = {{"slope", fit.slope}, {"intercept", fit.intercept}, {"residual", fit.residual}};
    }
    j["scaling"] = s;
  }
  return j;
}

namespace {

void write_csv_row(std::ostream& os, const std::vector<double>& row) {
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (i) os << ',';
    os << row[i];
  }
  os << '\n';
}

}  // namespace

void write_outputs(const RunReport& r, const std::filesystem::path& directory) {
  std::filesystem::create_directories(directory);
  {
    std::ofstream out(directory / "report.json");
    out << report_json(r).dump(2) << '\n';
    if (!out) throw std::runtime_error("failed to write report.json");
  }
  const ScenarioConfig& c = r.config;
  const std::string sys = to_string(c.system);
  if (c.output_format == "json+csv") {
    for (std::size_t i = 0; i < r.entries.size(); ++i) {
      const AnalyzeSeries& s = r.entries[i].series;
      if (s.grid.empty()) continue;
      std::ofstream out(directory / ("series_" + sys + "_tau" + std::to_string(i) + ".csv"));
      out.precision(12);
      out << "s";
      for (const auto& [m, n] : s.pairs) {
        out << ',' << sys << "_resonance_" << m << n << "_re," << sys << "_resonance_" << m << n << "_im";
      }
      out << ',' << sys << "_F_norm," << sys << "_projector_drift";
      if (!s.intertwining.empty()) out << ',' << sys << "_intertwining_defect";
      out << '\n';
      const std::size_t n = s.grid.size();
      const std::size_t stride = std::max<std::size_t>(1, (n + c.series_rows - 1) / c.series_rows);
      for (std::size_t k = 0; k < n; k += stride) {
        std::vector<double> row{s.grid[k]};
        for (const auto& series : s.resonance) {
          row.push_back(series[k].real());
          row.push_back(series[k].imag());
        }
        row.push_back(s.F[k]);
        row.push_back(s.drift[k]);
        if (!s.intertwining.empty()) row.push_back(s.intertwining[k]);
        write_csv_row(out, row);
      }
      if (!out) throw std::runtime_error("failed to write series CSV");
    }
  }
  if (!r.slopes.empty()) {
    std::ofstream out(directory / "scan.csv");
    out.precision(12);
    out << "tau,qac_max,max_resonance,F_norm,F_sup,projector_drift,intertwining_defect,w_deviation\n";
    for (const auto& e : r.entries) {
      const DiagnosticsReport& d = e.report;
      write_csv_row(out, {e.tau, d.qac_max, d.max_resonance, d.F_norm, d.F_sup, d.projector_drift,
                          d.intertwining_defect.value_or(NAN), d.w_deviation.value_or(NAN)});
    }
    if (!out) throw std::runtime_error("failed to write scan.csv");
  }
}

}  // namespace adiabat
