#pragma once

#include <vector>

#include "tsir/calculus.hpp"
#include "tsir/coefficient.hpp"
#include "tsir/timescale.hpp"

namespace tsir {

/// Susceptible x, infected y, removed z.
struct SirState {
  double x = 0;
  double y = 0;
  double z = 0;

  double total() const { return x + y + z; }
  friend bool operator==(const SirState&, const SirState&) = default;
};

/// A validated initial value problem: x0 > 0, y0 > 0, z0 >= 0, t0 in ts.
class SirScenario {
public:
  SirScenario(TimeScale ts, CoefficientFunction b, CoefficientFunction c, SirState init, Time t0);

  const TimeScale& timescale() const { return ts_; }
  const CoefficientFunction& b() const { return b_; }
  const CoefficientFunction& c() const { return c_; }
  const SirState& init() const { return init_; }
  Time t0() const { return t0_; }

  /// y0 / x0
  double kappa() const { return init_.y / init_.x; }
  /// x0 + y0 + z0
  double population() const { return init_.total(); }
  /// (c - b)(t)
  double rate_gap(Time t) const { return c_(t) - b_(t); }
  ScalarFn rate_gap_fn() const;

  bool has_constant_rates() const { return b_.constant_value() && c_.constant_value(); }

  /// Checks b, c >= 0 on the working grid; throws InvalidArgument with a witness.
  void validate_rates(Time t_end, Duration h) const;

private:
  TimeScale ts_;
  CoefficientFunction b_;
  CoefficientFunction c_;
  SirState init_;
  Time t0_;
};

enum class Method { ClosedForm, Recursion };
const char* to_string(Method m);

struct Sample {
  GridPoint point;
  SirState state;
};

struct SolutionSeries {
  std::vector<Sample> samples;
  Method method = Method::ClosedForm;
  SirScenario scenario;
  /// max |x + y + z - N| / N over the samples
  double max_conservation_error = 0;

  const SirState& final_state() const { return samples.back().state; }
};

/// g(t) = b(t) kappa / (kappa (1 + mu(t) (c-b)(t)) + e_{c-b}(sigma(t), t0))
double g_function(const SirScenario& sc, Time t, Duration h = kDefaultStep);

/// Closed form on an arbitrary time scale: x = e_{(-)g} x0,
/// y = e_{(-)(g (+) (c-b))} y0, z = N - x - y.
SirState closed_form_timescale(const SirScenario& sc, Time t, Duration h = kDefaultStep);

/// Closed-form states at every point of `points` (a grid starting at t0).
std::vector<SirState> closed_form_series(const SirScenario& sc, const std::vector<GridPoint>& points);

/// Integral representation for a single real interval with time-varying rates.
SirState closed_form_continuous(const SirScenario& sc, Time t, Duration h = kDefaultStep);

/// Analytic solution on the reals for constant b, c.
SirState closed_form_constant_continuous(double b, double c, const SirState& init, Time t0, Time t);

/// Product formulas on an integer time scale.
SirState closed_form_discrete(const SirScenario& sc, long t);

/// One step of the dynamic system from gp.t: the exact implicit update at a
/// right-scattered point, or one classical RK4 step of length `substep` at a
/// right-dense point. A maximal point is returned unchanged.
SirState step_recursion(const SirScenario& sc, const SirState& state, const GridPoint& gp, Duration substep);

/// States over grid(ts, t0, t_end, h) by the chosen method.
SolutionSeries solve(const SirScenario& sc, Time t_end, Duration h = kDefaultStep, Method method = Method::ClosedForm);

}  // namespace tsir
