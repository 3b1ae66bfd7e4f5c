#include "tsir/calculus.hpp"

#include <climits>
#include <cmath>
#include <numbers>

#include "tsir/errors.hpp"
#include "tsir/number_format.hpp"

namespace tsir {

RegressivityReport check_regressive(const ScalarFn& p, const TimeScale& ts, Time t0, Time t1, Duration h) {
  RegressivityReport report;
  std::optional<Time> first_nonpositive;
  for (const auto& gp : grid(ts, t0, t1, h)) {
    const double v = 1.0 + gp.mu_t * p(gp.t);
    if (!std::isfinite(v)) throw Error(Errc::InvalidArgument, "rate is not finite at t=" + format_shortest(gp.t), gp.t);
    report.min_abs_1_plus_mu_p = std::min(report.min_abs_1_plus_mu_p, std::abs(v));
    report.min_1_plus_mu_p = std::min(report.min_1_plus_mu_p, v);
    if (std::abs(v) <= kRegressivityFloor && !report.witness_t) report.witness_t = gp.t;
    if (v <= kRegressivityFloor && !first_nonpositive) first_nonpositive = gp.t;
  }
  report.regressive = report.min_abs_1_plus_mu_p > kRegressivityFloor;
  report.positively_regressive = report.min_1_plus_mu_p > kRegressivityFloor;
  if (!report.witness_t) report.witness_t = first_nonpositive;
  return report;
}

double circle_minus(double p, double q, Duration mu) {
  const double d = 1.0 + mu * q;
  if (std::abs(d) <= kRegressivityFloor) throw Error(Errc::Nonregressive, "circle_minus: 1 + mu q vanishes");
  return (p - q) / d;
}

void ScaledProduct::normalize() {
  int e = 0;
  mantissa_ = std::frexp(mantissa_, &e);
  if (mantissa_ == 0) {
    exponent_ = 0;
    return;
  }
  exponent_ += e;
}

void ScaledProduct::multiply(double factor) {
  mantissa_ *= factor;
  normalize();
}

void ScaledProduct::multiply_exp(double s) {
  if (std::isnan(s)) throw Error(Errc::InvalidArgument, "exponent is NaN");
  if (s == -INFINITY) {
    mantissa_ = 0;
    exponent_ = 0;
    return;
  }
  if (s == INFINITY) throw Error(Errc::Overflow, "exponential overflow");
  const double k = std::floor(s / std::numbers::ln2);
  const double r = s - k * std::numbers::ln2;
  mantissa_ *= std::exp(r);
  exponent_ += static_cast<long>(k);
  normalize();
}

ScaledProduct ScaledProduct::reciprocal() const {
  if (mantissa_ == 0) throw Error(Errc::Overflow, "reciprocal of a vanished exponential");
  ScaledProduct r;
  r.mantissa_ = 1.0 / mantissa_;
  r.exponent_ = -exponent_;
  r.normalize();
  return r;
}

double ScaledProduct::approx() const {
  if (exponent_ > 1100) return mantissa_ > 0 ? INFINITY : -INFINITY;
  if (exponent_ < -1200) return 0.0 * mantissa_;
  return std::ldexp(mantissa_, static_cast<int>(exponent_));
}

double ScaledProduct::value() const {
  const double v = approx();
  if (!std::isfinite(v)) throw Error(Errc::Overflow, "time-scale exponential overflows double range");
  return v;
}

double ScaledProduct::log_abs() const {
  return std::log(std::abs(mantissa_)) + static_cast<double>(exponent_) * std::numbers::ln2;
}

ScaledProduct ts_exp_scaled(const ScalarFn& p, const TimeScale& ts, Time t, Time t0, Duration h) {
  if (ts.snap(t) < ts.snap(t0)) return ts_exp_scaled(p, ts, t0, t, h).reciprocal();

  ScaledProduct prod;
  const auto g = grid(ts, t0, t, h);
  for (std::size_t k = 0; k + 1 < g.size(); ++k) {
    if (g[k].kind == PointKind::RightScattered) {
      const double f = 1.0 + g[k].mu_t * p(g[k].t);
      if (!(std::abs(f) > kRegressivityFloor))
        throw Error(Errc::Nonregressive, "rate is not regressive at t=" + format_shortest(g[k].t), g[k].t);
      prod.multiply(f);
    } else {
      prod.multiply_exp(dense_simpson(p, g[k].t, g[k + 1].t));
    }
  }
  return prod;
}

double ts_exp(const ScalarFn& p, const TimeScale& ts, Time t, Time t0, Duration h) {
  return ts_exp_scaled(p, ts, t, t0, h).value();
}

double ts_exp_sigma(const ScalarFn& p, const TimeScale& ts, Time t, Time t0, Duration h) {
  auto prod = ts_exp_scaled(p, ts, t, t0, h);
  const auto gp = grid_point(ts, t);
  if (gp.mu_t > 0) {
    const double f = 1.0 + gp.mu_t * p(gp.t);
    if (!(std::abs(f) > kRegressivityFloor))
      throw Error(Errc::Nonregressive, "rate is not regressive at t=" + format_shortest(gp.t), gp.t);
    prod.multiply(f);
  }
  return prod.value();
}

}  // namespace tsir
