#pragma once

#include <optional>

#include "tsir/timescale.hpp"

namespace tsir {

/// |1 + mu p| at or below this is treated as zero.
inline constexpr double kRegressivityFloor = 1e-10;

struct RegressivityReport {
  bool regressive = true;
  bool positively_regressive = true;
  double min_abs_1_plus_mu_p = 1;
  double min_1_plus_mu_p = 1;
  /// First grid point violating regressivity, else the first violating positivity.
  std::optional<Time> witness_t;
};

RegressivityReport check_regressive(const ScalarFn& p, const TimeScale& ts, Time t0, Time t1,
                                    Duration h = kDefaultStep);

/// p (+) q = p + q + mu p q
inline double circle_plus(double p, double q, Duration mu) { return p + q + mu * p * q; }

/// p (-) q = (p - q) / (1 + mu q); throws Nonregressive when 1 + mu q vanishes.
double circle_minus(double p, double q, Duration mu);

/// Positive-or-negative magnitude carried as mantissa * 2^exponent, so long
/// products of growth factors cannot overflow before the final read-out.
class ScaledProduct {
public:
  ScaledProduct() = default;

  void multiply(double factor);
  /// Multiplies by exp(s) without forming exp(s) directly.
  void multiply_exp(double s);
  ScaledProduct reciprocal() const;

  /// Exact value; throws Overflow when it is not representable.
  double value() const;
  /// Value saturating to +-inf on overflow.
  double approx() const;
  /// Natural log of |value|.
  double log_abs() const;

private:
  void normalize();
  double mantissa_ = 0.5;
  long exponent_ = 1;
};

/// Time-scale exponential e_p(t, t0): product of (1 + mu p) over right-scattered
/// points times exp of the Simpson integral of p over continuous panels.
/// For t < t0 returns 1 / e_p(t0, t).
double ts_exp(const ScalarFn& p, const TimeScale& ts, Time t, Time t0, Duration h = kDefaultStep);

/// Same as ts_exp but returned unscaled as a ScaledProduct.
ScaledProduct ts_exp_scaled(const ScalarFn& p, const TimeScale& ts, Time t, Time t0, Duration h = kDefaultStep);

/// e_p(sigma(t), t0) = e_p(t, t0) (1 + mu(t) p(t)).
double ts_exp_sigma(const ScalarFn& p, const TimeScale& ts, Time t, Time t0, Duration h = kDefaultStep);

}  // namespace tsir
