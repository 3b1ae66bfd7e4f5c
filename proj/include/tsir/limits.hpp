#pragma once

#include <optional>
#include <vector>

#include "tsir/sir.hpp"

namespace tsir {

/// The rest states {(alpha, 0, N - alpha) : alpha in [0, N]}.
struct EquilibriumPlane {
  double population = 0;

  SirState at(double alpha) const { return {alpha, 0.0, population - alpha}; }
  bool contains(const SirState& s, double tol = 1e-9) const;
  /// Max-norm distance to the nearest member.
  double distance(const SirState& s) const;
};

EquilibriumPlane equilibria(double population);

enum class LimitOutcome { AllRemoved, PartialSusceptible, Undetermined };

enum class Certificate {
  /// Closed-form limit argument for constant b, c (b >= c or b < c).
  ConstantCoefficients,
  /// Hypotheses checked only on the finite horizon.
  NumericOnly,
  None,
};

/// Which sufficient condition was tested.
enum class Criterion {
  None,
  /// int (c-b) bounded above and int b/(1 + mu (c-b)) divergent => (0, 0, N)
  BoundedDrift,
  /// b <= M (c-b) and int (c-b) divergent => (alpha, 0, N - alpha)
  DominatedTransmission,
};

const char* to_string(LimitOutcome o);
const char* to_string(Certificate c);
const char* to_string(Criterion c);

struct LimitClassification {
  LimitOutcome outcome = LimitOutcome::Undetermined;
  Certificate certificate = Certificate::None;
  Criterion criterion = Criterion::None;
  std::optional<double> alpha_estimate;
  /// x0 e^{-kappa M} when the dominated-transmission bound applies.
  std::optional<double> alpha_lower_bound;
  std::optional<double> transmission_bound_m;
  Time horizon = 0;
  SirState horizon_state;
};

/// Finite-horizon proxies for improper delta integrals.
struct DivergenceThresholds {
  double divergent_total = 50.0;
  double min_tail_slope = 1e-6;
  double max_tail_increase = 1e-6;
  /// Fraction of [t0, horizon] treated as the tail window.
  double tail_fraction = 0.1;
};

LimitClassification classify_limit(const SirScenario& sc, Time horizon, Duration h = kDefaultStep,
                                   const DivergenceThresholds& thresholds = {});

struct MonotonicityPoint {
  GridPoint point;
  bool removal_dominates = false;  // c(t) >= b(t)
  bool bracketed = false;          // x0/(x0+y0) b(t) <= c(t) <= b(t)
};

struct MonotonicityReport {
  std::vector<MonotonicityPoint> points;
  bool removal_dominates_everywhere = false;
  bool bracketed_everywhere = false;
  /// x0/(x0+y0) b(t0) >= c(t0): y grows (weakly) out of t0.
  bool initial_growth_predicted = false;
  /// Equality holds in the initial-growth test (within 1e-12).
  bool initial_boundary = false;
  bool decrease_predicted = false;
  /// y(next) <= y(t) + tol at every grid step of the closed-form series.
  bool decrease_verified = false;
  /// y(next grid point) >= y(t0) - tol.
  bool initial_growth_verified = false;
  double max_increase = 0;
  /// Worst violation of x/(x+y) nondecreasing when c >= b everywhere (0 if none).
  double max_ratio_drop = 0;
};

MonotonicityReport monotonicity_report(const SirScenario& sc, Time t_end, Duration h = kDefaultStep,
                                       double tol = 1e-12);

}  // namespace tsir
