// Scenario runner: run / scan a JSON config, or reproduce the spin-1/2 identities.

#include <iostream>

#include <CLI11.hpp>

#include "adiabat/scenario.hpp"
#include "adiabat/verify.hpp"

namespace {

enum ExitCode { kOk = 0, kVerifyFailed = 1, kConfigError = 2, kNumericalFailure = 3 };

struct Common {
  std::string config;
  std::string out;
  std::size_t grid = 0;
  long long seed = 0;
  int threads = 1;
};

int execute(const Common& o, CLI::App* sub, bool scanning) {
  adiabat::ScenarioConfig config = adiabat::load_config(o.config);
  if (o.grid) {
    if (o.grid < 256) throw adiabat::ConfigError("--grid: must be at least 256");
    config.points_per_2pi = o.grid;
  }
  if (!o.out.empty()) config.output_directory = o.out;
  adiabat::RunOptions ro;
  ro.threads = o.threads;
  if (sub->count("--seed")) ro.seed = o.seed;
  const adiabat::RunReport report = scanning ? adiabat::scan(config, ro) : adiabat::run(config, ro);
  adiabat::write_outputs(report, config.output_directory);
  for (const auto& e : report.entries) {
    std::cout << "tau=" << e.tau << "  qac_max=" << e.report.qac_max << "  max_resonance=" << e.report.max_resonance
              << "  F_sup=" << e.report.F_sup << "  class="
              << (e.classification ? adiabat::to_string(*e.classification) : "n/a") << '\n';
  }
  for (const auto& [name, fit] : report.slopes) std::cout << "slope " << name << " = " << fit.slope << '\n';
  std::cout << "wrote " << config.output_directory << "/report.json\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adiabatic-theorem diagnostics for time-dependent Hamiltonians"};
  app.require_subcommand(1);

  Common run_opts, scan_opts;
  auto add_common = [](CLI::App* sub, Common& o) {
    sub->add_option("config", o.config, "Scenario config (JSON)")->required();
    sub->add_option("--out", o.out, "Output directory (overrides the config)");
    sub->add_option("--grid", o.grid, "Points per 2 pi of s (overrides the config)");
    sub->add_option("--seed", o.seed, "Reserved; recorded in the report");
    sub->add_option("--threads", o.threads, "Concurrent tau evaluations")->check(CLI::PositiveNumber);
  };
  CLI::App* run_cmd = app.add_subcommand("run", "Evaluate every tau of a scenario");
  add_common(run_cmd, run_opts);
  CLI::App* scan_cmd = app.add_subcommand("scan", "Evaluate a tau sweep and fit log-log slopes");
  add_common(scan_cmd, scan_opts);

  bool as_json = false;
  double tolerance = 0.0;
  std::vector<int> only;
  CLI::App* verify_cmd = app.add_subcommand("verify-paper", "Reproduce the spin-1/2 identities and report pass/fail");
  verify_cmd->add_flag("--json", as_json, "Machine-readable output");
  verify_cmd->add_option("--tol", tolerance, "Replace every tolerance with this value");
  verify_cmd->add_option("--only", only, "Run only these criteria (1-11)")->check(CLI::Range(1, 11));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (*run_cmd) return execute(run_opts, run_cmd, false);
    if (*scan_cmd) return execute(scan_opts, scan_cmd, true);
    if (*verify_cmd) {
      adiabat::VerifyOptions vo;
      if (verify_cmd->count("--tol")) vo.tolerance = tolerance;
      vo.only = only;
      const auto results = adiabat::verify_paper(vo);
      if (as_json) {
        std::cout << adiabat::verify_json(results).dump(2) << '\n';
      } else {
        std::cout << adiabat::verify_table(results);
      }
      for (const auto& r : results) {
        if (!r.pass()) return kVerifyFailed;
      }
      return kOk;
    }
  } catch (const adiabat::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const adiabat::NumericalFailure& e) {
    std::cerr << "numerical failure in " << e.stage() << ": " << e.what() << '\n';
    return kNumericalFailure;
  } catch (const adiabat::DimensionMismatch& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  }
  return kOk;
}
