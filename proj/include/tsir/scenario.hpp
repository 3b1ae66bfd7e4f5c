#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tsir/limits.hpp"
#include "tsir/sir.hpp"

namespace tsir {

enum class MethodSelection { Closed, Recursion, Both };

const char* to_string(MethodSelection m);
MethodSelection parse_method_selection(std::string_view text);

/// Flat `key = value` scenario description.
///
///   name      = ex19_discrete
///   timescale = 0..24
///   b         = const:0.4
///   c         = const:0.2
///   x0 = 0.8, y0 = 0.2, z0 = 0       (one key per line)
///   t0, t_end, h, horizon, method
///
/// `#` starts a comment. t0 / t_end default to min / max of the time scale,
/// h to 1e-3, horizon to t_end and method to closed.
struct ScenarioFile {
  std::string name = "scenario";
  TimeScale timescale = TimeScale::canonicalize({Segment::point(0)});
  CoefficientFunction b;
  CoefficientFunction c;
  SirState init;
  Time t0 = 0;
  Time t_end = 0;
  Duration h = kDefaultStep;
  Time horizon = 0;
  MethodSelection method = MethodSelection::Closed;

  SirScenario scenario() const { return SirScenario(timescale, b, c, init, t0); }
  friend bool operator==(const ScenarioFile&, const ScenarioFile&) = default;
};

/// Parses and validates scenario text. Syntax errors raise ParseError with
/// line/column, invalid values raise SemanticError naming the field.
ScenarioFile parse_scenario(std::string_view text, const std::filesystem::path& base_dir = {});
ScenarioFile load_scenario(const std::filesystem::path& path);
std::string format_scenario(const ScenarioFile& sf);

/// CSV columns: t,sigma_t,mu_t,x,y,z,method. Written to a temp file and renamed.
void write_series_csv(const SolutionSeries& series, const std::filesystem::path& path);
std::string series_csv(const SolutionSeries& series);

struct RunFlags {
  std::optional<MethodSelection> method;
  std::filesystem::path out_dir;
  std::optional<Duration> h;
  std::optional<Time> horizon;
  bool classify = true;
  /// Output file stem; defaults to the scenario name.
  std::string stem;
};

struct RunReport {
  std::vector<std::filesystem::path> series_paths;
  SirState final_state;
  Time t_end = 0;
  std::optional<LimitClassification> limit;
  /// Why classification was skipped, when it was.
  std::string limit_error;
  MonotonicityReport monotonicity;
  RegressivityReport regressivity;
  double max_conservation_error = 0;
  /// Max componentwise deviation |closed - recursion| / N, when both ran.
  std::optional<double> max_oracle_deviation;
};

/// Default output directory: $TSIR_OUT_DIR, else the current directory.
std::filesystem::path default_out_dir();

RunReport run(const ScenarioFile& sf, const RunFlags& flags);
void print_summary(std::ostream& os, const ScenarioFile& sf, const RunReport& report);

/// Regressivity and hypothesis report without solving to CSV.
struct CheckReport {
  RegressivityReport gap;
  MonotonicityReport monotonicity;
  bool rates_nonnegative = true;
  bool constant_rates = false;
};
CheckReport check(const ScenarioFile& sf);
void print_check(std::ostream& os, const ScenarioFile& sf, const CheckReport& report);

/// Parameters accepted by sweep: b, c, x0, y0, z0, h.
ScenarioFile with_parameter(const ScenarioFile& sf, std::string_view param, std::string_view value);

struct SweepResult {
  std::vector<std::string> values;
  std::vector<RunReport> reports;
  std::filesystem::path summary_path;
};

/// One run per value (executed concurrently); writes `<stem>_sweep_<param>.csv`.
SweepResult sweep(const ScenarioFile& sf, std::string_view param, const std::vector<std::string>& values,
                  const RunFlags& flags);
/// Splits a `--values` list on ';' when present, else on ','.
std::vector<std::string> split_values(std::string_view list);

}  // namespace tsir
