#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "adiabat/diagnostics.hpp"

namespace adiabat {

inline constexpr const char* kConfigSchema = "adiabat.scenario/1";
inline constexpr const char* kReportSchema = "adiabat.report/1";
inline constexpr const char* kVersion = "0.1.0";

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A numerical failure, tagged with the stage that raised it.
class NumericalFailure : public std::runtime_error {
 public:
  NumericalFailure(std::string stage, const std::string& what);
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

enum class ModelKind { spin_half, custom_matrix_path, resonant_drive, offresonant_drive };
enum class SystemKind { a, b, c, x };
enum class TransformUnitary { exact, propagated, identity };

struct ScenarioConfig {
  ModelKind model = ModelKind::spin_half;
  double theta = 0.7853981633974483;
  double omega0 = 1.0;
  /// Exactly one of omega / tau lists is used; for spin_half, tau = 2 pi / omega.
  std::vector<double> omega;
  std::vector<double> tau;

  /// custom_matrix_path samples.
  std::vector<double> custom_s;
  std::vector<ComplexMatrix> custom_matrices;

  /// Toy drive parameters.
  double delta = 1.0;
  double amplitude = 0.5;
  double sweep = 0.5;
  double coupling = 0.5;
  double drive_frequency = 1.0;

  SystemKind system = SystemKind::a;
  int transform_sign = -1;
  TransformUnitary transform_unitary = TransformUnitary::exact;

  std::size_t points_per_2pi = 2048;
  double max_phase_step = 0.1;
  std::size_t substeps = 1;

  std::vector<std::string> diagnostics{"qac", "resonance", "F", "drift", "intertwining", "w"};
  Thresholds thresholds;

  std::string output_directory = "out";
  std::string output_format = "json+csv";
  /// At most this many rows per series CSV (the grid is strided).
  std::size_t series_rows = 4096;
};

/// Parse and validate; throws ConfigError with a message naming the field.
ScenarioConfig parse_config(const nlohmann::ordered_json& j);
ScenarioConfig load_config(const std::filesystem::path& file);
nlohmann::ordered_json to_json(const ScenarioConfig& c);

std::string to_string(SystemKind s);

struct TauEntry {
  double tau = 0.0;
  std::optional<double> omega;
  DiagnosticsReport report;
  std::optional<Classification> classification;
  AnalyzeSeries series;
};

struct RunReport {
  ScenarioConfig config;
  std::vector<TauEntry> entries;
  /// Fitted log-log slopes against tau, by quantity name.
  std::vector<std::pair<std::string, SlopeFit>> slopes;
  std::optional<double> F_slope;
  int threads = 1;
  std::optional<long long> seed;
};

struct RunOptions {
  int threads = 1;
  std::optional<long long> seed;
  bool keep_series = true;
};

/// Propagation, frame and diagnostics for every tau of the config.
RunReport run(const ScenarioConfig& config, const RunOptions& options = {});
/// run plus log-log slopes; needs at least three tau values.
RunReport scan(const ScenarioConfig& config, const RunOptions& options = {});

/// Scalars and provenance, fixed key order, no wall-clock data.
nlohmann::ordered_json report_json(const RunReport& r);

/// Writes report.json and series_*.csv (and scan.csv when slopes exist).
void write_outputs(const RunReport& r, const std::filesystem::path& directory);

}  // namespace adiabat
