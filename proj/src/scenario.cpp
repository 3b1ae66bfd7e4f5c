#include "tsir/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <future>
#include <map>
#include <ostream>
#include <sstream>

#include "tsir/errors.hpp"
#include "tsir/number_format.hpp"

namespace tsir {

const char* to_string(MethodSelection m) {
  switch (m) {
    case MethodSelection::Closed: return "closed";
    case MethodSelection::Recursion: return "recursion";
    case MethodSelection::Both: return "both";
  }
  return "?";
}

MethodSelection parse_method_selection(std::string_view text) {
  if (text == "closed") return MethodSelection::Closed;
  if (text == "recursion") return MethodSelection::Recursion;
  if (text == "both") return MethodSelection::Both;
  throw SemanticError("method", "expected closed, recursion or both, got '" + std::string(text) + "'");
}

namespace {

constexpr const char* kKeys[] = {"name", "timescale", "b",  "c",       "x0",    "y0",
                                 "z0",   "t0",        "t_end", "h", "horizon", "method"};

struct Entry {
  std::string value;
  int line = 0;
  int column = 0;  // 1-based column of the value
};

std::size_t skip_space(std::string_view s, std::size_t i) {
  while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
  return i;
}

std::string_view rstrip(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

double number_field(const std::map<std::string, Entry>& entries, const char* key, double fallback) {
  auto it = entries.find(key);
  if (it == entries.end()) return fallback;
  double v = 0;
  if (!parse_number(it->second.value, v))
    throw ParseError(it->second.line, it->second.column, std::string(key) + " expects a number");
  if (!std::isfinite(v)) throw SemanticError(key, "must be finite");
  return v;
}

const Entry& required(const std::map<std::string, Entry>& entries, const char* key) {
  auto it = entries.find(key);
  if (it == entries.end()) throw SemanticError(key, "is required");
  return it->second;
}

template <class F>
auto with_position(const Entry& e, F&& f) {
  try {
    return f();
  } catch (const ParseError& pe) {
    throw ParseError(e.line, e.column + pe.column() - 1, pe.message());
  }
}

Time in_domain(const TimeScale& ts, const char* field, double t) {
  if (!ts.contains(t)) throw SemanticError(field, format_shortest(t) + " is not in the time scale");
  return ts.snap(t);
}

}  // namespace

ScenarioFile parse_scenario(std::string_view text, const std::filesystem::path& base_dir) {
  std::map<std::string, Entry> entries;
  int lineno = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = rstrip(line);
    const std::size_t key_start = skip_space(line, 0);
    if (key_start == line.size()) continue;

    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ParseError(lineno, static_cast<int>(key_start + 1), "expected 'key = value'");
    const std::string key(rstrip(line.substr(key_start, eq - key_start)));
    if (std::find(std::begin(kKeys), std::end(kKeys), key) == std::end(kKeys))
      throw ParseError(lineno, static_cast<int>(key_start + 1), "unknown key '" + key + "'");
    if (entries.count(key)) throw ParseError(lineno, static_cast<int>(key_start + 1), "duplicate key '" + key + "'");
    const std::size_t value_start = skip_space(line, eq + 1);
    if (value_start == line.size()) throw ParseError(lineno, static_cast<int>(eq + 2), "missing value for '" + key + "'");
    entries[key] = Entry{std::string(line.substr(value_start)), lineno, static_cast<int>(value_start + 1)};
  }

  ScenarioFile sf;
  if (auto it = entries.find("name"); it != entries.end()) {
    const auto& v = it->second.value;
    const bool ok = std::all_of(v.begin(), v.end(), [](char ch) {
      return std::isalnum(static_cast<unsigned char>(ch)) || ch == '_' || ch == '-' || ch == '.';
    });
    if (!ok) throw SemanticError("name", "may only contain letters, digits, '_', '-' and '.'");
    sf.name = v;
  }

  const Entry& ts_entry = required(entries, "timescale");
  try {
    sf.timescale = with_position(ts_entry, [&] { return parse_timescale(ts_entry.value); });
  } catch (const ParseError&) {
    throw;
  } catch (const Error& e) {
    throw SemanticError("timescale", e.what());
  }

  const Entry& b_entry = required(entries, "b");
  const Entry& c_entry = required(entries, "c");
  sf.b = with_position(b_entry, [&] { return parse_coefficient(b_entry.value, base_dir); });
  sf.c = with_position(c_entry, [&] { return parse_coefficient(c_entry.value, base_dir); });

  required(entries, "x0");
  required(entries, "y0");
  sf.init.x = number_field(entries, "x0", 0);
  sf.init.y = number_field(entries, "y0", 0);
  sf.init.z = number_field(entries, "z0", 0);
  if (!(sf.init.x > 0)) throw SemanticError("x0", "must be > 0");
  if (!(sf.init.y > 0)) throw SemanticError("y0", "must be > 0");
  if (!(sf.init.z >= 0)) throw SemanticError("z0", "must be >= 0");

  sf.t0 = in_domain(sf.timescale, "t0", number_field(entries, "t0", sf.timescale.min()));
  sf.t_end = in_domain(sf.timescale, "t_end", number_field(entries, "t_end", sf.timescale.max()));
  if (sf.t_end < sf.t0) throw SemanticError("t_end", "must be >= t0");
  sf.h = number_field(entries, "h", kDefaultStep);
  if (!(sf.h > 0)) throw SemanticError("h", "must be > 0");
  sf.horizon = in_domain(sf.timescale, "horizon", number_field(entries, "horizon", sf.t_end));
  if (sf.horizon < sf.t0) throw SemanticError("horizon", "must be >= t0");
  if (auto it = entries.find("method"); it != entries.end()) sf.method = parse_method_selection(it->second.value);
  return sf;
}

ScenarioFile load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::Io, "cannot open scenario " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str(), path.parent_path());
}

std::string format_scenario(const ScenarioFile& sf) {
  std::ostringstream os;
  os << "name = " << sf.name << "\n"
     << "timescale = " << format_timescale(sf.timescale) << "\n"
     << "b = " << sf.b.literal() << "\n"
     << "c = " << sf.c.literal() << "\n"
     << "x0 = " << format_shortest(sf.init.x) << "\n"
     << "y0 = " << format_shortest(sf.init.y) << "\n"
     << "z0 = " << format_shortest(sf.init.z) << "\n"
     << "t0 = " << format_shortest(sf.t0) << "\n"
     << "t_end = " << format_shortest(sf.t_end) << "\n"
     << "h = " << format_shortest(sf.h) << "\n"
     << "horizon = " << format_shortest(sf.horizon) << "\n"
     << "method = " << to_string(sf.method) << "\n";
  return os.str();
}

std::string series_csv(const SolutionSeries& series) {
  std::string out = "t,sigma_t,mu_t,x,y,z,method\n";
  const char* method = to_string(series.method);
  for (const auto& s : series.samples) {
    out += format_csv(s.point.t) + ',' + format_csv(s.point.sigma_t) + ',' + format_csv(s.point.mu_t) + ',' +
           format_csv(s.state.x) + ',' + format_csv(s.state.y) + ',' + format_csv(s.state.z) + ',' + method + '\n';
  }
  return out;
}

namespace {

void write_atomically(const std::filesystem::path& path, const std::string& content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(Errc::Io, "cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) {
      std::error_code ec;
      std::filesystem::remove(tmp, ec);
      throw Error(Errc::Io, "write failed for " + tmp.string());
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw Error(Errc::Io, "cannot rename onto " + path.string());
  }
}

void ensure_dir(const std::filesystem::path& dir) {
  if (dir.empty()) return;
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(Errc::Io, "cannot create output directory " + dir.string());
}

std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) out += ch == '"' ? std::string("\"\"") : std::string(1, ch);
  return out + "\"";
}

std::string opt_csv(const std::optional<double>& v) { return v ? format_csv(*v) : std::string(); }

}  // namespace

void write_series_csv(const SolutionSeries& series, const std::filesystem::path& path) {
  write_atomically(path, series_csv(series));
}

std::filesystem::path default_out_dir() {
  if (const char* env = std::getenv("TSIR_OUT_DIR"); env && *env) return env;
  return ".";
}

RunReport run(const ScenarioFile& sf, const RunFlags& flags) {
  const MethodSelection method = flags.method.value_or(sf.method);
  const Duration h = flags.h.value_or(sf.h);
  const Time horizon = flags.horizon.value_or(sf.horizon);
  const auto out_dir = flags.out_dir.empty() ? default_out_dir() : flags.out_dir;
  const std::string stem = flags.stem.empty() ? sf.name : flags.stem;
  if (!(h > 0)) throw SemanticError("h", "must be > 0");

  const SirScenario sc = sf.scenario();
  sc.validate_rates(sf.t_end, h);

  RunReport report;
  report.t_end = sf.t_end;
  report.regressivity = check_regressive(sc.rate_gap_fn(), sc.timescale(), sc.t0(), sf.t_end, h);
  if (!report.regressivity.regressive)
    throw Error(Errc::Nonregressive,
                "c - b is not regressive at t=" + format_shortest(report.regressivity.witness_t.value_or(sc.t0())),
                report.regressivity.witness_t);

  std::vector<SolutionSeries> runs;
  if (method != MethodSelection::Recursion) runs.push_back(solve(sc, sf.t_end, h, Method::ClosedForm));
  if (method != MethodSelection::Closed) runs.push_back(solve(sc, sf.t_end, h, Method::Recursion));

  ensure_dir(out_dir);
  for (const auto& s : runs) {
    auto path = out_dir / (stem + "_" + to_string(s.method) + ".csv");
    write_series_csv(s, path);
    report.series_paths.push_back(path);
    report.max_conservation_error = std::max(report.max_conservation_error, s.max_conservation_error);
  }
  report.final_state = runs.front().final_state();

  if (runs.size() == 2) {
    double dev = 0;
    const double n = sc.population();
    for (std::size_t k = 0; k < runs[0].samples.size(); ++k) {
      const auto& a = runs[0].samples[k].state;
      const auto& b = runs[1].samples[k].state;
      dev = std::max({dev, std::abs(a.x - b.x) / n, std::abs(a.y - b.y) / n, std::abs(a.z - b.z) / n});
    }
    report.max_oracle_deviation = dev;
  }

  report.monotonicity = monotonicity_report(sc, sf.t_end, h);
  if (flags.classify) {
    try {
      report.limit = classify_limit(sc, horizon, h);
    } catch (const Error& e) {
      if (e.code() != Errc::Nonregressive) throw;
      report.limit_error = e.what();
    }
  }
  return report;
}

namespace {

std::string state_text(const SirState& s) {
  return "(" + format_shortest(s.x) + ", " + format_shortest(s.y) + ", " + format_shortest(s.z) + ")";
}

void print_limit(std::ostream& os, const LimitClassification& l) {
  os << "limit (horizon " << format_shortest(l.horizon) << "): " << to_string(l.outcome) << "\n"
     << "  certificate: " << to_string(l.certificate) << "\n"
     << "  criterion: " << to_string(l.criterion) << "\n"
     << "  state at horizon: " << state_text(l.horizon_state) << "\n";
  if (l.alpha_estimate) os << "  alpha estimate: " << format_shortest(*l.alpha_estimate) << "\n";
  if (l.alpha_lower_bound)
    os << "  alpha lower bound x0 e^(-kappa M): " << format_shortest(*l.alpha_lower_bound)
       << " (M = " << format_shortest(l.transmission_bound_m.value_or(0)) << ")\n";
}

void print_monotonicity(std::ostream& os, const MonotonicityReport& m) {
  os << "monotonicity: c >= b everywhere = " << (m.removal_dominates_everywhere ? "true" : "false")
     << ", x0/(x0+y0) b <= c <= b everywhere = " << (m.bracketed_everywhere ? "true" : "false") << "\n"
     << "  y decreasing predicted = " << (m.decrease_predicted ? "true" : "false")
     << ", observed max increase = " << format_shortest(m.max_increase) << "\n"
     << "  initial growth predicted = " << (m.initial_growth_predicted ? "true" : "false")
     << (m.initial_boundary ? " (boundary case)" : "")
     << ", observed = " << (m.initial_growth_verified ? "true" : "false") << "\n";
}

}  // namespace

void print_summary(std::ostream& os, const ScenarioFile& sf, const RunReport& r) {
  os << "scenario: " << sf.name << "\n"
     << "time scale: " << format_timescale(sf.timescale) << "\n"
     << "b = " << sf.b.literal() << ", c = " << sf.c.literal() << "\n"
     << "regressive = " << (r.regressivity.regressive ? "true" : "false")
     << ", positively regressive = " << (r.regressivity.positively_regressive ? "true" : "false") << "\n";
  for (const auto& p : r.series_paths) os << "wrote " << p.string() << "\n";
  os << "state at t=" << format_shortest(r.t_end) << ": " << state_text(r.final_state) << "\n"
     << "max conservation error (relative): " << format_shortest(r.max_conservation_error) << "\n";
  if (r.max_oracle_deviation)
    os << "max closed-form vs recursion deviation (relative to N): " << format_shortest(*r.max_oracle_deviation)
       << "\n";
  print_monotonicity(os, r.monotonicity);
  if (r.limit) print_limit(os, *r.limit);
  if (!r.limit_error.empty()) os << "limit: not classified (" << r.limit_error << ")\n";
}

CheckReport check(const ScenarioFile& sf) {
  const SirScenario sc = sf.scenario();
  CheckReport r;
  r.constant_rates = sc.has_constant_rates();
  try {
    sc.validate_rates(sf.t_end, sf.h);
  } catch (const Error& e) {
    if (e.code() != Errc::InvalidArgument) throw;
    r.rates_nonnegative = false;
  }
  r.gap = check_regressive(sc.rate_gap_fn(), sc.timescale(), sc.t0(), sf.t_end, sf.h);
  if (r.gap.regressive) r.monotonicity = monotonicity_report(sc, sf.t_end, sf.h);
  return r;
}

void print_check(std::ostream& os, const ScenarioFile& sf, const CheckReport& r) {
  os << "scenario: " << sf.name << "\n"
     << "rates nonnegative = " << (r.rates_nonnegative ? "true" : "false") << "\n"
     << "constant rates = " << (r.constant_rates ? "true" : "false") << "\n"
     << "regressive = " << (r.gap.regressive ? "true" : "false") << "\n"
     << "positively regressive = " << (r.gap.positively_regressive ? "true" : "false") << "\n"
     << "min |1 + mu (c - b)| = " << format_shortest(r.gap.min_abs_1_plus_mu_p) << "\n"
     << "min 1 + mu (c - b) = " << format_shortest(r.gap.min_1_plus_mu_p) << "\n";
  if (r.gap.witness_t) os << "witness t = " << format_shortest(*r.gap.witness_t) << "\n";
  if (r.gap.regressive) print_monotonicity(os, r.monotonicity);
}

ScenarioFile with_parameter(const ScenarioFile& sf, std::string_view param, std::string_view value) {
  ScenarioFile out = sf;
  const std::string v(value);
  auto number = [&] {
    double d = 0;
    if (!parse_number(v, d)) throw SemanticError(std::string(param), "expects a number, got '" + v + "'");
    return d;
  };
  auto coefficient = [&] {
    double d = 0;
    return parse_number(v, d) ? CoefficientFunction::constant(d) : parse_coefficient(v);
  };
  if (param == "b") {
    out.b = coefficient();
  } else if (param == "c") {
    out.c = coefficient();
  } else if (param == "x0") {
    out.init.x = number();
    if (!(out.init.x > 0)) throw SemanticError("x0", "must be > 0");
  } else if (param == "y0") {
    out.init.y = number();
    if (!(out.init.y > 0)) throw SemanticError("y0", "must be > 0");
  } else if (param == "z0") {
    out.init.z = number();
    if (!(out.init.z >= 0)) throw SemanticError("z0", "must be >= 0");
  } else if (param == "h") {
    out.h = number();
    if (!(out.h > 0)) throw SemanticError("h", "must be > 0");
  } else {
    throw SemanticError("param", "cannot sweep '" + std::string(param) + "' (use b, c, x0, y0, z0 or h)");
  }
  return out;
}

std::vector<std::string> split_values(std::string_view list) {
  std::vector<std::string> out;
  const char sep = list.find(';') != std::string_view::npos ? ';' : ',';
  std::size_t pos = 0;
  while (pos < list.size()) {
    auto end = list.find(sep, pos);
    if (end == std::string_view::npos) end = list.size();
    auto item = list.substr(pos, end - pos);
    const std::size_t s = skip_space(item, 0);
    item = rstrip(item.substr(s));
    if (!item.empty()) out.emplace_back(item);
    pos = end + 1;
  }
  return out;
}

SweepResult sweep(const ScenarioFile& sf, std::string_view param, const std::vector<std::string>& values,
                  const RunFlags& flags) {
  SweepResult result;
  result.values = values;
  if (values.empty()) return result;

  const std::string stem = flags.stem.empty() ? sf.name : flags.stem;
  std::vector<ScenarioFile> variants;
  for (const auto& v : values) variants.push_back(with_parameter(sf, param, v));

  std::vector<std::future<RunReport>> jobs;
  for (std::size_t i = 0; i < variants.size(); ++i) {
    RunFlags f = flags;
    f.stem = stem + "_" + std::string(param) + "_" + std::to_string(i);
    jobs.push_back(std::async(std::launch::async, [&variants, i, f] { return run(variants[i], f); }));
  }
  for (auto& j : jobs) result.reports.push_back(j.get());

  std::string csv =
      "value,t_end,x,y,z,outcome,certificate,alpha_estimate,alpha_lower_bound,max_oracle_deviation,"
      "max_conservation_error\n";
  for (std::size_t i = 0; i < values.size(); ++i) {
    const auto& r = result.reports[i];
    const LimitOutcome outcome = r.limit ? r.limit->outcome : LimitOutcome::Undetermined;
    const Certificate cert = r.limit ? r.limit->certificate : Certificate::None;
    csv += csv_quote(values[i]) + ',' + format_csv(r.t_end) + ',' + format_csv(r.final_state.x) + ',' +
           format_csv(r.final_state.y) + ',' + format_csv(r.final_state.z) + ',' + csv_quote(to_string(outcome)) +
           ',' + csv_quote(to_string(cert)) + ',' + opt_csv(r.limit ? r.limit->alpha_estimate : std::nullopt) + ',' +
           opt_csv(r.limit ? r.limit->alpha_lower_bound : std::nullopt) + ',' + opt_csv(r.max_oracle_deviation) +
           ',' + format_csv(r.max_conservation_error) + '\n';
  }
  const auto out_dir = flags.out_dir.empty() ? default_out_dir() : flags.out_dir;
  ensure_dir(out_dir);
  result.summary_path = out_dir / (stem + "_sweep_" + std::string(param) + ".csv");
  write_atomically(result.summary_path, csv);
  return result;
}

}  // namespace tsir
