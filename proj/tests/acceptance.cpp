// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "generators.hpp"
#include "tsir/calculus.hpp"
#include "tsir/errors.hpp"
#include "tsir/limits.hpp"
#include "tsir/number_format.hpp"
#include "tsir/sir.hpp"

using namespace tsir;
namespace fs = std::filesystem;
using C = CoefficientFunction;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

double max_rel(const SirState& a, const SirState& b) {
  // z starts at 0 in several scenarios; measure it relative to max(1, |z|).
  return std::max({rel(a.x, b.x), rel(a.y, b.y), std::abs(a.z - b.z) / std::max(1.0, std::abs(b.z))});
}

double max_abs(const SirState& a, const SirState& b) {
  return std::max({std::abs(a.x - b.x), std::abs(a.y - b.y), std::abs(a.z - b.z)});
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

// Implicit one-step update across a gap of length m, written out by hand.
SirState oracle_jump(const SirState& s, double m, double b, double c) {
  const double frac = s.x / (s.x + s.y);
  const double y = s.y / (1.0 + m * (c - b * frac));
  return {s.x - m * b * frac * y, y, s.z + m * c * y};
}

Outcome criterion1() {
  const auto start = Clock::now();
  const auto ts = testgen::integer_range(0, 25);
  const SirScenario sc(ts, C::constant(0.4), C::constant(0.2), {0.8, 0.2, 0}, 0);
  const auto rec = solve(sc, 24, kDefaultStep, Method::Recursion);
  SirState oracle = sc.init();
  double worst = 0;
  for (long t = 0; t <= 24; ++t) {
    const auto a = closed_form_timescale(sc, t);
    const auto b = closed_form_discrete(sc, t);
    const auto& c = rec.samples[t].state;
    worst = std::max({worst, max_rel(a, b), max_rel(a, c), max_rel(b, c), max_rel(a, oracle)});
    oracle = oracle_jump(oracle, 1.0, 0.4, 0.2);
  }
  const double secs = seconds_since(start);
  return {worst < 1e-10 && secs < 1.0,
          "discrete closed forms vs recursion, max rel dev " + fmt(worst) + " (< 1e-10), " + fmt(secs) + " s (< 1 s)"};
}

SirScenario criterion2_scenario() {
  return SirScenario(TimeScale::canonicalize({Segment::interval(0, 30)}), C::constant(0.4), C::constant(0.2),
                     {0.8, 0.2, 0}, 0);
}

std::vector<SirState> at_integers(const SolutionSeries& s) {
  std::vector<SirState> out;
  for (const auto& smp : s.samples)
    if (std::abs(smp.point.t - std::round(smp.point.t)) < 1e-9) out.push_back(smp.state);
  return out;
}

Outcome criterion2() {
  const auto start = Clock::now();
  const auto sc = criterion2_scenario();
  const auto pts = at_integers(solve(sc, 30, 1e-3, Method::ClosedForm));
  double worst = 0;
  for (std::size_t t = 0; t < pts.size(); ++t)
    worst = std::max(worst, max_rel(pts[t], closed_form_constant_continuous(0.4, 0.2, sc.init(), 0, t)));
  const double secs = seconds_since(start);
  return {pts.size() == 31 && worst < 1e-6 && secs < 5.0,
          "T=[0,30] time-scale closed form vs analytic, " + std::to_string(pts.size()) + " checkpoints, max rel dev " +
              fmt(worst) + " (< 1e-6), " + fmt(secs) + " s (< 5 s)"};
}

Outcome criterion3() {
  const SirScenario sc(TimeScale::canonicalize({Segment::interval(0, 10)}), coeff::Reciprocal{1, 1},
                       coeff::Reciprocal{2, 1}, {0.4, 1.2, 0}, 0);
  const double kappa = 3;
  double worst = 0;
  for (double t : {0.0, 0.5, 1.0, 2.0, 5.0, 10.0}) {
    const double x = 0.4 * (kappa + 1 + t) / ((kappa + 1) * (t + 1));
    const double y = 1.2 * (kappa + 1 + t) / ((kappa + 1) * (t + 1) * (t + 1));
    const auto s = closed_form_continuous(sc, t);
    worst = std::max({worst, rel(s.x, x), rel(s.y, y)});
  }
  const double x1 = closed_form_continuous(sc, 1).x;
  return {worst < 1e-6 && std::abs(x1 - 0.25) < 1e-6,
          "reciprocal-rate example, max rel dev " + fmt(worst) + " (< 1e-6), x(1) = " + format_shortest(x1)};
}

Outcome criterion4() {
  const auto ts = parse_timescale("[0,12], 13..24");
  const SirScenario sc(ts, C::constant(0.4), C::constant(0.2), {0.8, 0.2, 0}, 0);
  const auto cf = solve(sc, 24, kDefaultStep, Method::ClosedForm);
  const auto rc = solve(sc, 24, kDefaultStep, Method::Recursion);
  double dev = 0, cons = 0;
  for (std::size_t k = 0; k < cf.samples.size(); ++k) {
    if (cf.samples[k].point.kind != PointKind::RightDense)
      dev = std::max(dev, max_abs(cf.samples[k].state, rc.samples[k].state));
    cons = std::max({cons, std::abs(cf.samples[k].state.total() - 1), std::abs(rc.samples[k].state.total() - 1)});
  }
  return {dev < 1e-6 && cons < 1e-9,
          "hybrid scale, closed vs recursion at scattered points " + fmt(dev) + " (< 1e-6), conservation " +
              fmt(cons) + " (< 1e-9)"};
}

Outcome criterion5() {
  const auto start = Clock::now();
  testgen::Rng rng(2024);
  const double h = 0.01;
  const double tol = 1e-9;
  double worst = 0;
  int violations = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const auto ts = testgen::random_mixed_scale(rng);
    const auto nodes = grid(ts, ts.min(), ts.max(), h);
    const bool tabulated = trial % 2 == 1;
    const double kp = testgen::uniform(rng, 0.0, 0.6);
    const double kq = testgen::uniform(rng, -0.4, 0.4);
    const auto pt = testgen::random_table(rng, nodes, 0.0, 0.6);
    const auto qt = testgen::random_table(rng, nodes, -0.4, 0.4);
    const ScalarFn p = [&](Time t) { return tabulated ? pt(t) : kp; };
    const ScalarFn q = [&](Time t) { return tabulated ? qt(t) : kq; };
    const ScalarFn pq = [&](Time t) { return circle_plus(p(t), q(t), mu(ts, t)); };
    const ScalarFn mp = [&](Time t) { return circle_minus(0.0, p(t), mu(ts, t)); };
    const double t0 = ts.min();
    auto note = [&](double err) {
      worst = std::max(worst, err);
      if (!(err <= tol)) ++violations;
    };
    for (int s = 0; s < 6; ++s) {
      const double a = nodes[testgen::uniform_int(rng, 0, nodes.size() - 1)].t;
      const double b = nodes[testgen::uniform_int(rng, 0, nodes.size() - 1)].t;
      const double c = nodes[testgen::uniform_int(rng, 0, nodes.size() - 1)].t;
      note(rel(ts_exp(p, ts, a, b, h) * ts_exp(p, ts, b, c, h), ts_exp(p, ts, a, c, h)));
      const double ep = ts_exp(p, ts, a, t0, h);
      const double eq = ts_exp(q, ts, a, t0, h);
      note(rel(ts_exp(pq, ts, a, t0, h), ep * eq));
      note(rel(ts_exp(mp, ts, a, t0, h) * ep, 1.0));
      if (!(ep > 0) || !(eq > 0)) ++violations;
      const double integral = delta_integral(ts, p, t0, a, h);
      note(std::max(0.0, (1 + integral - ep) / ep));
      note(std::max(0.0, (ep - std::exp(integral)) / ep));
    }
  }
  const double secs = seconds_since(start);
  return {violations == 0 && secs < 10.0,
          "exponential identities on 50 mixed scales, worst rel err " + fmt(worst) + " (<= 1e-9), " +
              std::to_string(violations) + " violations, " + fmt(secs) + " s (< 10 s)"};
}

Outcome criterion6() {
  const auto ts = testgen::integer_range(0, 501);
  const SirState init{0.8, 0.1, 0.1};
  const SirScenario fast(ts, C::constant(0.2), C::constant(0.1), init, 0);
  const SirScenario slow(ts, C::constant(0.2), C::constant(0.3), init, 0);
  const auto a = classify_limit(fast, 500);
  const auto b = classify_limit(slow, 500);
  const auto& sa = a.horizon_state;
  const auto& sb = b.horizon_state;
  const bool ok_a = sa.x < 1e-3 && sa.y < 1e-3 && std::abs(sa.z - 1) < 1e-3 && a.outcome == LimitOutcome::AllRemoved &&
                    a.certificate == Certificate::ConstantCoefficients;

  const auto series = solve(slow, 500);
  double drift = 0;
  for (std::size_t k = series.samples.size() - 101; k < series.samples.size(); ++k)
    drift = std::max(drift, std::abs(series.samples[k].state.x - sb.x));
  const double bound = 0.8 * std::exp(-0.125 * 2);
  const bool ok_b = sb.y < 1e-6 && sb.x >= 0.8 * std::exp(-0.25) && sb.x <= 1 && drift < 1e-9 &&
                    b.outcome == LimitOutcome::PartialSusceptible && b.alpha_lower_bound &&
                    std::abs(*b.alpha_lower_bound - bound) < 1e-15;
  return {ok_a && ok_b, "c=0.1: state (" + fmt(sa.x) + ", " + fmt(sa.y) + ", " + fmt(sa.z) + ") " +
                            to_string(a.certificate) + "; c=0.3: x=" + format_shortest(sb.x) + " y=" + fmt(sb.y) +
                            " drift " + fmt(drift) + " bound " + format_shortest(b.alpha_lower_bound.value_or(NAN))};
}

Outcome criterion7() {
  testgen::Rng rng(77);
  int failures = 0;
  double worst = 0;
  for (int trial = 0; trial < 40; ++trial) {
    const bool removal = trial < 20;
    const auto ts = testgen::random_mixed_scale(rng);
    const double x0 = testgen::uniform(rng, 0.1, 1.0);
    const double y0 = testgen::uniform(rng, 0.05, 1.0);
    const double frac = x0 / (x0 + y0);
    const bool varying = trial % 2 == 1;
    const double base = testgen::uniform(rng, 0.05, 0.6);
    const double amp = varying ? testgen::uniform(rng, 0.0, base) : 0.0;
    const double freq = testgen::uniform(rng, 0.3, 2.0);
    C b = varying ? C(coeff::Sinusoid{base, amp, freq}) : C::constant(base);
    C c;
    if (removal) {
      const double extra = testgen::uniform(rng, 0.0, 0.4);
      c = varying ? C(coeff::Sinusoid{base + extra, amp, freq}) : C::constant(base + extra);
    } else {
      const double lambda = testgen::uniform(rng, frac, 1.0);
      c = varying ? C(coeff::Sinusoid{lambda * base, lambda * amp, freq}) : C::constant(lambda * base);
    }
    const SirScenario sc(ts, b, c, {x0, y0, testgen::uniform(rng, 0.0, 0.5)}, ts.min());
    const auto rep = monotonicity_report(sc, ts.max(), 0.01, 1e-12);
    worst = std::max(worst, rep.max_increase);
    if (!rep.decrease_verified || !rep.decrease_predicted) ++failures;
  }
  const SirScenario ex19(testgen::integer_range(0, 25), C::constant(0.4), C::constant(0.2), {0.8, 0.2, 0}, 0);
  const auto rep = monotonicity_report(ex19, 24);
  const double y1 = closed_form_timescale(ex19, 1).y;
  const bool growth = rep.initial_growth_predicted && rep.initial_growth_verified && y1 >= 0.2;
  return {failures == 0 && growth, "40 randomized scenarios, " + std::to_string(failures) +
                                       " with y increasing (worst step " + fmt(worst) + ", tol 1e-12); y(1) = " +
                                       format_shortest(y1) + " >= y(0) = 0.2"};
}

Outcome criterion8() {
  const auto sc = criterion2_scenario();
  const auto ref = at_integers(solve(sc, 30, 1e-3, Method::ClosedForm));
  auto error_at = [&](double h) {
    const auto rec = at_integers(solve(sc, 30, h, Method::Recursion));
    double e = 0;
    for (std::size_t k = 0; k < ref.size(); ++k) e = std::max(e, max_abs(rec[k], ref[k]));
    return e;
  };
  const double coarse = error_at(0.2);
  const double fine = error_at(0.1);
  const double ratio = coarse / fine;
  return {ratio >= 8, "recursion error h=0.2: " + fmt(coarse) + ", h=0.1: " + fmt(fine) + ", ratio " + fmt(ratio) +
                          " (>= 8)"};
}

std::string run_capture(const std::string& cmd, int& status) {
  std::string out;
  FILE* pipe = ::popen(cmd.c_str(), "r");
  if (!pipe) {
    status = -1;
    return out;
  }
  std::array<char, 4096> buf{};
  while (std::fgets(buf.data(), static_cast<int>(buf.size()), pipe)) out += buf.data();
  status = ::pclose(pipe);
  return out;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome criterion9() {
  const fs::path scenarios = TSIR_SCENARIO_DIR;
  const std::string cli = TSIR_CLI;
  const fs::path root = fs::temp_directory_path() / ("tsir_acceptance_" + std::to_string(::getpid()));
  const std::array<fs::path, 2> dirs{root / "a", root / "b"};
  int runs = 0, failures = 0, compared = 0, mismatched = 0;
  for (const auto& entry : fs::directory_iterator(scenarios)) {
    if (entry.path().extension() != ".scn") continue;
    for (const auto& d : dirs) {
      int status = 0;
      run_capture("'" + cli + "' solve '" + entry.path().string() + "' --out '" + d.string() + "' 2>&1", status);
      ++runs;
      if (status != 0) ++failures;
    }
  }
  for (const auto& entry : fs::directory_iterator(dirs[0])) {
    ++compared;
    const auto other = dirs[1] / entry.path().filename();
    if (!fs::exists(other) || slurp(entry.path()) != slurp(other)) ++mismatched;
  }
  int status = 0;
  const auto check = run_capture("'" + cli + "' check '" + (scenarios / "sinusoidal_discrete.scn").string() + "'", status);
  const bool regressive = status == 0 && check.find("regressive = true") != std::string::npos;
  std::error_code ec;
  fs::remove_all(root, ec);
  return {failures == 0 && compared > 0 && mismatched == 0 && regressive,
          std::to_string(runs) + " CLI runs (" + std::to_string(failures) + " failed), " + std::to_string(compared) +
              " CSVs compared, " + std::to_string(mismatched) + " differ; check: regressive = " +
              (regressive ? "true" : "false")};
}

}  // namespace

int main() {
  const std::vector<std::function<Outcome()>> criteria{criterion1, criterion2, criterion3, criterion4, criterion5,
                                                       criterion6, criterion7, criterion8, criterion9};
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i]();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::cout << (o.pass ? "[PASS]" : "[FAIL]") << " criterion " << i + 1 << ": " << o.detail << std::endl;
  }
  std::cout << (criteria.size() - failed) << "/" << criteria.size() << " criteria passed" << std::endl;
  return failed == 0 ? 0 : 1;
}
