#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <numbers>

#include "adiabat/scenario.hpp"

using namespace adiabat;
using nlohmann::ordered_json;

namespace {

ordered_json spin(const std::string& system, const std::vector<double>& omega, double theta = std::numbers::pi / 4) {
  ordered_json j;
  j["schema"] = "adiabat.scenario/1";
  j["model"] = "spin_half";
  j["parameters"] = {{"theta", theta}, {"omega0", 1.0}, {"omega", omega}};
  j["system"] = system;
  j["grid"] = 1024;
  return j;
}

std::string error_of(const ordered_json& j) {
  try {
    parse_config(j);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

std::filesystem::path scratch(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("adiabat_test_" + name);
  std::filesystem::remove_all(p);
  return p;
}

}  // namespace

TEST_CASE("minimal config picks up defaults") {
  const ScenarioConfig c = parse_config(spin("a", {0.1}));
  CHECK(c.model == ModelKind::spin_half);
  CHECK(c.system == SystemKind::a);
  CHECK(c.points_per_2pi == 1024);
  CHECK(c.omega == std::vector<double>{0.1});
  CHECK(c.thresholds.qac == 0.05);
  CHECK(c.diagnostics.size() == 6);
  CHECK(c.output_format == "json+csv");
}

TEST_CASE("scalar omega is accepted") {
  ordered_json j = spin("a", {});
  j["parameters"]["omega"] = 0.2;
  CHECK(parse_config(j).omega == std::vector<double>{0.2});
}

TEST_CASE("validation errors name the field") {
  struct Case {
    std::function<void(ordered_json&)> edit;
    std::string field;
  };
  const std::vector<Case> cases{
      {[](ordered_json& j) { j["schema"] = "other/2"; }, "schema"},
      {[](ordered_json& j) { j["model"] = "spin_one"; }, "model"},
      {[](ordered_json& j) { j["parameters"]["theta"] = 4.0; }, "parameters.theta"},
      {[](ordered_json& j) { j["parameters"]["theta"] = "wide"; }, "parameters.theta"},
      {[](ordered_json& j) { j["parameters"]["omega"] = {0.1, -0.2}; }, "parameters.omega"},
      {[](ordered_json& j) { j["parameters"]["tau"] = {1.0}; }, "parameters"},
      {[](ordered_json& j) { j["parameters"].erase("omega"); }, "parameters"},
      {[](ordered_json& j) { j["parameters"]["colour"] = 1; }, "parameters"},
      {[](ordered_json& j) { j["extra"] = true; }, "config"},
      {[](ordered_json& j) { j["system"] = "d"; }, "system"},
      {[](ordered_json& j) { j["grid"] = 100; }, "grid.points_per_2pi"},
      {[](ordered_json& j) { j["grid"] = "fine"; }, "grid"},
      {[](ordered_json& j) { j["grid"] = {{"points_per_2pi", 2048}, {"substeps", 0}}; }, "grid.substeps"},
      {[](ordered_json& j) { j["diagnostics"] = {"qac", "entropy"}; }, "diagnostics"},
      {[](ordered_json& j) { j["output"] = {{"format", "xml"}}; }, "output.format"},
      {[](ordered_json& j) {
         j["system"] = "x";
         j["transform"] = {{"sign", 2}};
       },
       "transform.sign"},
  };
  for (const Case& c : cases) {
    ordered_json j = spin("a", {0.1});
    c.edit(j);
    const std::string msg = error_of(j);
    CAPTURE(j.dump());
    CAPTURE(msg);
    CHECK(msg.rfind(c.field, 0) == 0);
  }
  CHECK(error_of(ordered_json::array()) != "");
}

TEST_CASE("custom paths are validated") {
  ordered_json j;
  j["schema"] = "adiabat.scenario/1";
  j["model"] = "custom_matrix_path";
  j["parameters"] = {{"tau", {5.0}}};
  j["custom"] = {{"s", {0.0, 1.0}}, {"matrices", {{{1, 0}, {0, -1}}, {{0, 1}, {1, 0}}}}};
  j["system"] = "a";
  CHECK(error_of(j) == "");

  ordered_json bad = j;
  bad["custom"]["matrices"][1] = {{0, 1}, {0, 0}};
  CHECK(error_of(bad).find("not Hermitian") != std::string::npos);
  bad = j;
  bad["custom"]["s"] = {0.0, 0.0};
  CHECK(error_of(bad).rfind("custom.s", 0) == 0);
  bad = j;
  bad["custom"]["matrices"][1] = {{0, 1, 0}, {1, 0, 0}, {0, 0, 1}};
  CHECK(error_of(bad).rfind("custom.matrices", 0) == 0);
  bad = j;
  bad["system"] = "x";
  CHECK(error_of(bad).rfind("transform.unitary", 0) == 0);
  bad = j;
  bad["parameters"] = {{"omega", {0.1}}};
  CHECK(error_of(bad).rfind("parameters.omega", 0) == 0);

  // Complex entries as [re, im].
  ordered_json cx = j;
  cx["custom"]["matrices"][1] = {{0, {0, -1}}, {{0, 1}, 0}};
  const ScenarioConfig c = parse_config(cx);
  CHECK(c.custom_matrices[1](0, 1) == Complex(0, -1));
}

TEST_CASE("normalized config round-trips") {
  ordered_json j = spin("x", {0.1, 0.05}, 1.0);
  j["transform"] = {{"sign", 1}, {"unitary", "propagated"}};
  j["thresholds"] = {{"qac", 0.02}};
  j["grid"] = {{"points_per_2pi", 512}, {"substeps", 2}};
  const ScenarioConfig c = parse_config(j);
  const ordered_json once = to_json(c);
  const ordered_json twice = to_json(parse_config(once));
  CHECK(once == twice);
  CHECK(once["thresholds"]["qac"] == 0.02);
  CHECK(once["transform"]["unitary"] == "propagated");
  CHECK(once["grid"]["substeps"] == 2);
}

TEST_CASE("load_config reports unreadable and malformed files") {
  CHECK_THROWS_AS(load_config("/nonexistent/config.json"), ConfigError);
  const auto dir = scratch("malformed");
  std::filesystem::create_directories(dir);
  std::ofstream(dir / "bad.json") << "{\"schema\": ";
  CHECK_THROWS_AS(load_config(dir / "bad.json"), ConfigError);
}

TEST_CASE("run classifies the three spin-1/2 systems") {
  SUBCASE("a: adiabatic") {
    const RunReport r = run(parse_config(spin("a", {0.1, 0.05})));
    for (const auto& e : r.entries) CHECK(e.classification == Classification::adiabatic_consistent);
  }
  SUBCASE("b: weak resonance") {
    const RunReport r = run(parse_config(spin("b", {0.02, 0.01})));
    for (const auto& e : r.entries) {
      CHECK(e.report.qac_max < 0.05);
      CHECK(e.report.max_resonance > 0.5);
      CHECK(e.classification == Classification::weak_resonant_inconsistent);
    }
  }
  SUBCASE("b at theta = 0: adiabatic") {
    const RunReport r = run(parse_config(spin("b", {0.02}, 0.0)));
    CHECK(r.entries[0].report.max_resonance == 0.0);
    CHECK(r.entries[0].classification == Classification::adiabatic_consistent);
  }
  SUBCASE("c: resonance closes") {
    const RunReport r = run(parse_config(spin("c", {0.02, 0.01})));
    for (const auto& e : r.entries) CHECK(e.classification == Classification::adiabatic_consistent);
  }
}

TEST_CASE("resonant drive is strong and oscillatory") {
  ordered_json j;
  j["schema"] = "adiabat.scenario/1";
  j["model"] = "resonant_drive";
  j["parameters"] = {{"delta", 1.0}, {"amplitude", 0.5}, {"tau", {20.0, 40.0, 80.0}}};
  j["system"] = "a";
  j["diagnostics"] = {"qac", "resonance", "F"};
  const RunReport r = scan(parse_config(j), {.threads = 3});
  REQUIRE(r.F_slope.has_value());
  CHECK(std::abs(*r.F_slope) <= 0.15);
  for (const auto& e : r.entries) CHECK(e.classification == Classification::strong_oscillatory);
}

TEST_CASE("report output is deterministic across thread counts") {
  const ScenarioConfig c = parse_config(spin("a", {0.2, 0.1, 0.05}));
  const RunReport one = scan(c, {.threads = 1, .seed = 7});
  const RunReport three = scan(c, {.threads = 3, .seed = 7});
  ordered_json a = report_json(one), b = report_json(three);
  CHECK(a["provenance"]["threads"] == 1);
  a["provenance"].erase("threads");
  b["provenance"].erase("threads");
  CHECK(a.dump() == b.dump());
  CHECK(a["schema"] == "adiabat.report/1");
  CHECK(a["scaling"]["qac_max"]["slope"].get<double>() == doctest::Approx(-1.0).epsilon(1e-6));
  CHECK(a["results"].size() == 3);
  CHECK(a["results"][0].contains("w_deviation"));
}

TEST_CASE("diagnostics selection limits the report") {
  ordered_json j = spin("a", {0.1});
  j["diagnostics"] = {"qac"};
  const ordered_json rep = report_json(run(parse_config(j)));
  CHECK(rep["results"][0].contains("qac_max"));
  CHECK_FALSE(rep["results"][0].contains("F_norm"));
  CHECK_FALSE(rep["results"][0].contains("w_deviation"));
}

TEST_CASE("outputs land on disk") {
  const auto dir = scratch("outputs");
  write_outputs(scan(parse_config(spin("b", {0.1, 0.05, 0.02}))), dir);
  CHECK(std::filesystem::exists(dir / "report.json"));
  CHECK(std::filesystem::exists(dir / "scan.csv"));
  std::ifstream csv(dir / "series_b_tau0.csv");
  std::string header;
  std::getline(csv, header);
  CHECK(header == "s,b_resonance_01_re,b_resonance_01_im,b_F_norm,b_projector_drift,b_intertwining_defect");
  std::size_t rows = 0;
  for (std::string line; std::getline(csv, line);) ++rows;
  CHECK(rows >= 2);
  CHECK(rows <= 4096);
}

TEST_CASE("scan needs three tau values") {
  CHECK_THROWS_AS(scan(parse_config(spin("a", {0.1, 0.05}))), ConfigError);
}

TEST_CASE("a crossing surfaces as a numerical failure") {
  ordered_json j;
  j["schema"] = "adiabat.scenario/1";
  j["model"] = "custom_matrix_path";
  j["parameters"] = {{"tau", {5.0}}};
  j["custom"] = {{"s", {0.0, 0.5, 1.0}}, {"matrices", {{{1, 0}, {0, -1}}, {{0, 0}, {0, 0}}, {{-1, 0}, {0, 1}}}}};
  j["system"] = "a";
  j["grid"] = 512;
  try {
    run(parse_config(j));
    FAIL("expected NumericalFailure");
  } catch (const NumericalFailure& e) {
    CHECK(e.stage() == "eigenframe");
  }
}
