#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace adiabat {

/// One measured quantity against its bound: passes when deviation <= tolerance.
struct Check {
  std::string label;
  double deviation = 0.0;
  double tolerance = 0.0;
  bool pass() const { return deviation <= tolerance; }
};

struct CriterionResult {
  int id = 0;
  std::string name;
  std::vector<Check> checks;

  bool pass() const;
  /// The check with the smallest margin, or the first failing one.
  const Check& worst() const;
};

struct VerifyOptions {
  /// Replaces every tolerance when set.
  std::optional<double> tolerance;
  /// Run only these criteria (1-based); empty means all.
  std::vector<int> only;
};

/// Reproduces the spin-1/2 identities and the dual-system inconsistency with
/// the library's closed forms as references.
std::vector<CriterionResult> verify_paper(const VerifyOptions& options = {});

nlohmann::ordered_json verify_json(const std::vector<CriterionResult>& results);
std::string verify_table(const std::vector<CriterionResult>& results);

}  // namespace adiabat
