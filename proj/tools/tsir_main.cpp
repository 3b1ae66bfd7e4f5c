// tsir: solve, classify, sweep and check SIR scenarios on time scales.

#include <filesystem>
#include <iostream>

#include "CLI11.hpp"
#include "tsir/errors.hpp"
#include "tsir/scenario.hpp"

namespace {

int report_error(const tsir::Error& e) {
  std::cerr << "error (" << tsir::to_string(e.code()) << "): " << e.what() << "\n";
  return tsir::exit_code(e.code());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"SIR epidemic dynamics on hybrid time scales"};
  app.set_help_flag("--help", "Print this help message and exit");
  app.require_subcommand(1);

  std::string scenario_path;
  std::string method;
  std::string out_dir;
  double h = 0;
  double horizon = 0;
  std::string param;
  std::string values;

  auto* solve = app.add_subcommand("solve", "Solve a scenario and write CSV series");
  solve->add_option("scenario", scenario_path, "Scenario file")->required();
  solve->add_option("--method", method, "closed | recursion | both")
      ->check(CLI::IsMember({"closed", "recursion", "both"}));
  solve->add_option("--out", out_dir, "Output directory (default $TSIR_OUT_DIR or .)");
  solve->add_option("--h", h, "Grid step on continuous segments");

  auto* classify = app.add_subcommand("classify", "Classify the long-term limit");
  classify->add_option("scenario", scenario_path, "Scenario file")->required();
  classify->add_option("--horizon", horizon, "Working horizon (must lie in the time scale)");
  classify->add_option("--h", h, "Grid step on continuous segments");

  auto* sweep = app.add_subcommand("sweep", "Run a scenario once per parameter value");
  sweep->add_option("scenario", scenario_path, "Scenario file")->required();
  sweep->add_option("--param", param, "b, c, x0, y0, z0 or h")->required();
  sweep->add_option("--values", values, "v1,v2,... (use ';' when values contain commas)")->required();
  sweep->add_option("--out", out_dir, "Output directory (default $TSIR_OUT_DIR or .)");

  auto* check = app.add_subcommand("check", "Regressivity and hypothesis report");
  check->add_option("scenario", scenario_path, "Scenario file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    const auto sf = tsir::load_scenario(scenario_path);
    tsir::RunFlags flags;
    flags.out_dir = out_dir;
    if (h > 0) flags.h = h;

    if (solve->parsed()) {
      if (!method.empty()) flags.method = tsir::parse_method_selection(method);
      const auto report = tsir::run(sf, flags);
      tsir::print_summary(std::cout, sf, report);
    } else if (classify->parsed()) {
      const auto sc = sf.scenario();
      const double hz = classify->count("--horizon") ? horizon : sf.horizon;
      const auto limit = tsir::classify_limit(sc, hz, flags.h.value_or(sf.h));
      std::cout << "scenario: " << sf.name << "\n"
                << "outcome: " << tsir::to_string(limit.outcome) << "\n"
                << "certificate: " << tsir::to_string(limit.certificate) << "\n"
                << "criterion: " << tsir::to_string(limit.criterion) << "\n"
                << "state at horizon " << limit.horizon << ": (" << limit.horizon_state.x << ", "
                << limit.horizon_state.y << ", " << limit.horizon_state.z << ")\n";
      if (limit.alpha_estimate) std::cout << "alpha estimate: " << *limit.alpha_estimate << "\n";
      if (limit.alpha_lower_bound) std::cout << "alpha lower bound: " << *limit.alpha_lower_bound << "\n";
    } else if (sweep->parsed()) {
      const auto result = tsir::sweep(sf, param, tsir::split_values(values), flags);
      for (std::size_t i = 0; i < result.values.size(); ++i) {
        const auto& r = result.reports[i];
        std::cout << param << " = " << result.values[i] << ": "
                  << tsir::to_string(r.limit ? r.limit->outcome : tsir::LimitOutcome::Undetermined);
        if (r.max_oracle_deviation) std::cout << ", oracle deviation " << *r.max_oracle_deviation;
        std::cout << "\n";
      }
      if (!result.summary_path.empty()) std::cout << "wrote " << result.summary_path.string() << "\n";
    } else if (check->parsed()) {
      tsir::print_check(std::cout, sf, tsir::check(sf));
    }
  } catch (const tsir::Error& e) {
    return report_error(e);
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error (io): " << e.what() << "\n";
    return 3;
  }
  return 0;
}
