#include "tsir/limits.hpp"

#include <algorithm>
#include <cmath>

#include "tsir/errors.hpp"
#include "tsir/number_format.hpp"

namespace tsir {

bool EquilibriumPlane::contains(const SirState& s, double tol) const { return distance(s) <= tol; }

double EquilibriumPlane::distance(const SirState& s) const {
  const double alpha = std::clamp(s.x, 0.0, population);
  return std::max({std::abs(s.x - alpha), std::abs(s.y), std::abs(s.z - (population - alpha))});
}

EquilibriumPlane equilibria(double population) {
  if (!(population > 0)) throw Error(Errc::InvalidArgument, "population must be positive");
  return EquilibriumPlane{population};
}

const char* to_string(LimitOutcome o) {
  switch (o) {
    case LimitOutcome::AllRemoved: return "disease-free, all removed (0, 0, N)";
    case LimitOutcome::PartialSusceptible: return "disease-free, residual susceptibles (alpha, 0, N - alpha)";
    case LimitOutcome::Undetermined: return "undetermined";
  }
  return "?";
}

const char* to_string(Certificate c) {
  switch (c) {
    case Certificate::ConstantCoefficients: return "analytic, constant coefficients";
    case Certificate::NumericOnly: return "numeric only";
    case Certificate::None: return "none";
  }
  return "?";
}

const char* to_string(Criterion c) {
  switch (c) {
    case Criterion::None: return "none";
    case Criterion::BoundedDrift: return "bounded drift of int(c-b), divergent int b/(1+mu(c-b))";
    case Criterion::DominatedTransmission: return "b <= M (c-b), divergent int(c-b)";
  }
  return "?";
}

namespace {

/// Running delta integral of f at every point of `pts`.
std::vector<double> running_integral(const ScalarFn& f, const std::vector<Sample>& pts) {
  std::vector<double> out(pts.size(), 0.0);
  for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
    const GridPoint& gp = pts[k].point;
    const double inc = gp.kind == PointKind::RightScattered ? f(gp.t) * gp.mu_t : dense_simpson(f, gp.t, pts[k + 1].point.t);
    out[k + 1] = out[k] + inc;
  }
  return out;
}

struct TailWindow {
  std::size_t first = 0;
  Time start = 0;
};

TailWindow tail_window(const std::vector<Sample>& pts, double fraction) {
  const Time t0 = pts.front().point.t;
  const Time t1 = pts.back().point.t;
  const Time start = t1 - fraction * (t1 - t0);
  std::size_t k = 0;
  while (k + 1 < pts.size() && pts[k].point.t < start) ++k;
  return {k, pts[k].point.t};
}

bool bounded_above(const std::vector<double>& running, const TailWindow& w, const DivergenceThresholds& th) {
  double increase = 0;
  for (std::size_t k = w.first; k + 1 < running.size(); ++k) increase += std::max(0.0, running[k + 1] - running[k]);
  return increase < th.max_tail_increase;
}

bool divergent(const std::vector<double>& running, const std::vector<Sample>& pts, const TailWindow& w,
               const DivergenceThresholds& th) {
  const double span = pts.back().point.t - w.start;
  if (!(span > 0)) return false;
  const double slope = (running.back() - running[w.first]) / span;
  return running.back() > th.divergent_total && slope > th.min_tail_slope;
}

}  // namespace

LimitClassification classify_limit(const SirScenario& sc, Time horizon, Duration h,
                                   const DivergenceThresholds& thresholds) {
  const auto& ts = sc.timescale();
  if (ts.snap(horizon) < sc.t0()) throw Error(Errc::InvalidArgument, "horizon must not precede t0");
  const auto gap = sc.rate_gap_fn();
  const auto reg = check_regressive(gap, ts, sc.t0(), horizon, h);
  if (!reg.positively_regressive)
    throw Error(Errc::Nonregressive,
                "c - b is not positively regressive at t=" + format_shortest(reg.witness_t.value_or(sc.t0())),
                reg.witness_t);

  const auto series = solve(sc, horizon, h, Method::ClosedForm);
  LimitClassification out;
  out.horizon = series.samples.back().point.t;
  out.horizon_state = series.final_state();
  const double x0 = sc.init().x;
  const double kappa = sc.kappa();

  auto partial = [&](double m, Certificate cert) {
    out.outcome = LimitOutcome::PartialSusceptible;
    out.certificate = cert;
    out.criterion = Criterion::DominatedTransmission;
    out.transmission_bound_m = m;
    out.alpha_lower_bound = x0 * std::exp(-kappa * m);
    out.alpha_estimate = out.horizon_state.x;
  };

  if (sc.has_constant_rates()) {
    const double b = *sc.b().constant_value();
    const double c = *sc.c().constant_value();
    if (b < c) {
      partial(b / (c - b), Certificate::ConstantCoefficients);
    } else if (b > 0) {
      out.outcome = LimitOutcome::AllRemoved;
      out.certificate = Certificate::ConstantCoefficients;
      out.criterion = Criterion::BoundedDrift;
    }
    return out;
  }

  const auto& pts = series.samples;
  const auto window = tail_window(pts, thresholds.tail_fraction);
  const auto int_gap = running_integral(gap, pts);
  const auto int_transmission = running_integral(
      [&](Time t) {
        const double m = mu(ts, t);
        return sc.b()(t) / (1.0 + m * gap(t));
      },
      pts);

  if (bounded_above(int_gap, window, thresholds) && divergent(int_transmission, pts, window, thresholds)) {
    out.outcome = LimitOutcome::AllRemoved;
    out.certificate = Certificate::NumericOnly;
    out.criterion = Criterion::BoundedDrift;
    return out;
  }

  bool dominated = true;
  double m = 0;
  for (const auto& s : pts) {
    const double b = sc.b()(s.point.t);
    const double g = gap(s.point.t);
    if (b > 0 && !(g > 0)) {
      dominated = false;
      break;
    }
    if (g > 0) m = std::max(m, b / g);
  }
  if (dominated && divergent(int_gap, pts, window, thresholds)) partial(m, Certificate::NumericOnly);
  return out;
}

MonotonicityReport monotonicity_report(const SirScenario& sc, Time t_end, Duration h, double tol) {
  const auto series = solve(sc, t_end, h, Method::ClosedForm);
  const auto& init = sc.init();
  const double frac = init.x / (init.x + init.y);

  MonotonicityReport r;
  r.removal_dominates_everywhere = true;
  r.bracketed_everywhere = true;
  for (const auto& s : series.samples) {
    const double b = sc.b()(s.point.t);
    const double c = sc.c()(s.point.t);
    MonotonicityPoint p{s.point, c >= b, frac * b <= c && c <= b};
    r.removal_dominates_everywhere = r.removal_dominates_everywhere && p.removal_dominates;
    r.bracketed_everywhere = r.bracketed_everywhere && p.bracketed;
    r.points.push_back(p);
  }
  r.decrease_predicted = r.removal_dominates_everywhere || r.bracketed_everywhere;

  const double slope0 = frac * sc.b()(sc.t0()) - sc.c()(sc.t0());
  r.initial_growth_predicted = slope0 >= 0;
  r.initial_boundary = std::abs(slope0) <= 1e-12;

  const auto& smp = series.samples;
  for (std::size_t k = 0; k + 1 < smp.size(); ++k) {
    r.max_increase = std::max(r.max_increase, smp[k + 1].state.y - smp[k].state.y);
    if (r.removal_dominates_everywhere) {
      const auto ratio = [](const SirState& s) { return s.x / (s.x + s.y); };
      r.max_ratio_drop = std::max(r.max_ratio_drop, ratio(smp[k].state) - ratio(smp[k + 1].state));
    }
  }
  r.decrease_verified = r.max_increase <= tol;
  r.initial_growth_verified = smp.size() < 2 || smp[1].state.y >= smp[0].state.y - tol;
  return r;
}

}  // namespace tsir
