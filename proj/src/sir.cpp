#include "tsir/sir.hpp"

#include <array>
#include <cmath>

#include "tsir/errors.hpp"
#include "tsir/number_format.hpp"

namespace tsir {

namespace {

constexpr double kTiny = 1e-300;
constexpr double kConservationLimit = 1e-9;

std::string at(Time t) { return " at t=" + format_shortest(t); }

void require_regressive(double one_plus, Time t, const char* what) {
  if (!(std::abs(one_plus) > kRegressivityFloor))
    throw Error(Errc::Nonregressive, std::string(what) + " is not regressive" + at(t), t);
}

}  // namespace

SirScenario::SirScenario(TimeScale ts, CoefficientFunction b, CoefficientFunction c, SirState init, Time t0)
    : ts_(std::move(ts)), b_(std::move(b)), c_(std::move(c)), init_(init), t0_(0) {
  if (!(init.x > 0) || !(init.y > 0) || !(init.z >= 0) || !std::isfinite(init.total()))
    throw Error(Errc::InvalidInitial, "initial state needs x0 > 0, y0 > 0, z0 >= 0");
  t0_ = ts_.snap(t0);
}

ScalarFn SirScenario::rate_gap_fn() const {
  return [b = b_, c = c_](Time t) { return c(t) - b(t); };
}

void SirScenario::validate_rates(Time t_end, Duration h) const {
  for (const auto& gp : grid(ts_, t0_, t_end, h)) {
    const double bv = b_(gp.t);
    const double cv = c_(gp.t);
    if (!(bv >= 0) || !std::isfinite(bv))
      throw Error(Errc::InvalidArgument, "transmission rate b must be finite and >= 0" + at(gp.t), gp.t);
    if (!(cv >= 0) || !std::isfinite(cv))
      throw Error(Errc::InvalidArgument, "removal rate c must be finite and >= 0" + at(gp.t), gp.t);
  }
}

const char* to_string(Method m) { return m == Method::ClosedForm ? "closed" : "recursion"; }

double g_function(const SirScenario& sc, Time t, Duration h) {
  const auto q = sc.rate_gap_fn();
  const auto gp = grid_point(sc.timescale(), t);
  if (gp.t < sc.t0()) throw Error(Errc::InvalidArgument, "g is evaluated for t >= t0");
  const double one_plus = 1.0 + gp.mu_t * q(gp.t);
  require_regressive(one_plus, gp.t, "c - b");
  auto e_sigma = ts_exp_scaled(q, sc.timescale(), gp.t, sc.t0(), h);
  e_sigma.multiply(one_plus);
  const double kappa = sc.kappa();
  return sc.b()(gp.t) * kappa / (kappa * one_plus + e_sigma.approx());
}

std::vector<SirState> closed_form_series(const SirScenario& sc, const std::vector<GridPoint>& points) {
  if (points.empty() || points.front().t != sc.t0())
    throw Error(Errc::InvalidArgument, "closed-form series must start at t0");
  const auto& b = sc.b();
  const auto q = sc.rate_gap_fn();
  const double kappa = sc.kappa();
  const double n = sc.population();
  const SirState& init = sc.init();

  // e_{c-b}(t, t0), e_{(-)g}(t, t0) and e_{(-)(g (+) (c-b))}(t, t0)
  ScaledProduct e_gap, e_x, e_y;
  std::vector<SirState> out;
  out.reserve(points.size());
  out.push_back(init);

  auto g_dense = [&](Time s, const ScaledProduct& e) { return b(s) * kappa / (kappa + e.approx()); };

  for (std::size_t k = 0; k + 1 < points.size(); ++k) {
    const GridPoint& gp = points[k];
    if (gp.kind == PointKind::RightScattered) {
      const double m = gp.mu_t;
      const double qv = q(gp.t);
      const double one_plus_q = 1.0 + m * qv;
      require_regressive(one_plus_q, gp.t, "c - b");
      ScaledProduct e_gap_sigma = e_gap;
      e_gap_sigma.multiply(one_plus_q);

      const double g = b(gp.t) * kappa / (kappa * one_plus_q + e_gap_sigma.approx());
      require_regressive(1.0 + m * g, gp.t, "g");
      const double g_plus_q = circle_plus(g, qv, m);
      require_regressive(1.0 + m * g_plus_q, gp.t, "g (+) (c - b)");

      e_x.multiply(1.0 + m * circle_minus(0.0, g, m));
      e_y.multiply(1.0 + m * circle_minus(0.0, g_plus_q, m));
      e_gap = e_gap_sigma;
    } else {
      const Time a = gp.t;
      const Time e = points[k + 1].t;
      const Time mid = 0.5 * (a + e);
      const double q_left = simpson(q, a, mid);
      const double q_right = simpson(q, mid, e);
      ScaledProduct e_mid = e_gap;
      e_mid.multiply_exp(q_left);
      ScaledProduct e_end = e_mid;
      e_end.multiply_exp(q_right);

      const double int_g = (e - a) / 6.0 * (g_dense(a, e_gap) + 4.0 * g_dense(mid, e_mid) + g_dense(e, e_end));
      e_x.multiply_exp(-int_g);
      e_y.multiply_exp(-(int_g + q_left + q_right));
      e_gap = e_end;
    }
    SirState s;
    s.x = init.x * e_x.value();
    s.y = init.y * e_y.value();
    s.z = n - s.x - s.y;
    out.push_back(s);
  }
  return out;
}

SirState closed_form_timescale(const SirScenario& sc, Time t, Duration h) {
  if (sc.timescale().snap(t) < sc.t0()) throw Error(Errc::InvalidArgument, "closed form is evaluated for t >= t0");
  return closed_form_series(sc, grid(sc.timescale(), sc.t0(), t, h)).back();
}

SirState closed_form_continuous(const SirScenario& sc, Time t, Duration h) {
  if (!sc.timescale().is_single_interval())
    throw Error(Errc::WrongDomain, "integral representation needs a single real interval");
  if (sc.timescale().snap(t) < sc.t0()) throw Error(Errc::InvalidArgument, "closed form is evaluated for t >= t0");
  const auto& b = sc.b();
  const auto& c = sc.c();
  const auto q = sc.rate_gap_fn();
  const double kappa = sc.kappa();
  const SirState& init = sc.init();

  // running int_{t0}^{s} (c-b), int b / (kappa + e^{int(c-b)}), int [b / (1 + kappa e^{int(b-c)}) - c]
  double gap = 0, int_x = 0, int_y = 0;
  auto fx = [&](Time s, double i) { return b(s) / (kappa + std::exp(i)); };
  auto fy = [&](Time s, double i) { return b(s) / (1.0 + kappa * std::exp(-i)) - c(s); };

  const auto pts = grid(sc.timescale(), sc.t0(), t, h);
  for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
    const Time a = pts[k].t;
    const Time e = pts[k + 1].t;
    const Time mid = 0.5 * (a + e);
    const double gap_mid = gap + simpson(q, a, mid);
    const double gap_end = gap_mid + simpson(q, mid, e);
    int_x += (e - a) / 6.0 * (fx(a, gap) + 4.0 * fx(mid, gap_mid) + fx(e, gap_end));
    int_y += (e - a) / 6.0 * (fy(a, gap) + 4.0 * fy(mid, gap_mid) + fy(e, gap_end));
    gap = gap_end;
  }
  const double decay = std::exp(-kappa * int_x);
  SirState s;
  s.x = init.x * decay;
  s.y = init.y * std::exp(int_y);
  s.z = sc.population() - (init.y * std::exp(-gap) + init.x) * decay;
  return s;
}

SirState closed_form_constant_continuous(double b, double c, const SirState& init, Time t0, Time t) {
  if (!(init.x > 0) || !(init.y > 0) || !(init.z >= 0))
    throw Error(Errc::InvalidInitial, "initial state needs x0 > 0, y0 > 0, z0 >= 0");
  if (!(b >= 0) || !(c >= 0)) throw Error(Errc::InvalidArgument, "rates must be >= 0");
  const double kappa = init.y / init.x;
  const double n = init.total();
  const double tau = t - t0;
  SirState s;
  if (b == c) {
    const double f = std::exp(-b * kappa * tau / (1.0 + kappa));
    s.x = init.x * f;
    s.y = init.y * f;
    s.z = n - (init.x + init.y) * f;
    return s;
  }
  const double r = b / (b - c);
  const double delta = (b - c) * tau;
  // log((1 + kappa e^delta) / (1 + kappa))
  const double log_ratio = delta < 30.0 ? std::log1p(kappa * std::expm1(delta) / (1.0 + kappa))
                                        : delta + std::log(kappa) + std::log1p(std::exp(-delta) / kappa) -
                                              std::log1p(kappa);
  const double log_x = std::log(init.x) - r * log_ratio;
  s.x = std::exp(log_x);
  s.y = std::exp(log_x + std::log(kappa) + delta);
  s.z = n - s.x - s.y;
  return s;
}

SirState closed_form_discrete(const SirScenario& sc, long t) {
  const auto& ts = sc.timescale();
  if (!ts.is_integer_range()) throw Error(Errc::WrongDomain, "product formulas need an integer time scale");
  const auto t_snapped = ts.snap(static_cast<double>(t));
  const auto t0 = static_cast<long>(sc.t0());
  if (t_snapped < sc.t0()) throw Error(Errc::InvalidArgument, "closed form is evaluated for t >= t0");

  const double kappa = sc.kappa();
  const SirState& init = sc.init();
  double prod_gap = 1.0;  // prod_{i=t0}^{i} (1 + (c-b)(i))
  double prod_g = 1.0;    // prod (1 + g(i))
  for (long i = t0; i < t; ++i) {
    const auto ti = static_cast<double>(i);
    const double one_plus_q = 1.0 + sc.rate_gap(ti);
    if (!(std::abs(one_plus_q) > kRegressivityFloor))
      throw Error(Errc::Nonregressive, "1 + (c - b)(i) vanishes at index " + std::to_string(i), ti);
    prod_gap *= one_plus_q;
    const double g = sc.b()(ti) * kappa / (prod_gap + kappa * one_plus_q);
    if (!(std::abs(1.0 + g) > kRegressivityFloor))
      throw Error(Errc::Nonregressive, "1 + g(i) vanishes at index " + std::to_string(i), ti);
    prod_g *= 1.0 + g;
  }
  if (!std::isfinite(prod_gap) || !std::isfinite(prod_g) || prod_gap == 0 || prod_g == 0)
    throw Error(Errc::Overflow, "product formula left double range");
  SirState s;
  s.x = init.x / prod_g;
  s.y = init.y / (prod_gap * prod_g);
  s.z = sc.population() - (init.x + init.y / prod_gap) / prod_g;
  return s;
}

namespace {

using Vec3 = std::array<double, 3>;

Vec3 sir_rhs(const SirScenario& sc, Time t, const Vec3& s) {
  const double sum = s[0] + s[1];
  if (!(sum >= kTiny)) throw Error(Errc::DegenerateState, "x + y vanished" + at(t), t);
  const double infection = sc.b()(t) * s[0] * s[1] / sum;
  const double removal = sc.c()(t) * s[1];
  return {-infection, infection - removal, removal};
}

Vec3 axpy(const Vec3& s, double a, const Vec3& k) { return {s[0] + a * k[0], s[1] + a * k[1], s[2] + a * k[2]}; }

}  // namespace

SirState step_recursion(const SirScenario& sc, const SirState& state, const GridPoint& gp, Duration substep) {
  const double sum = state.x + state.y;
  if (!(sum >= kTiny)) throw Error(Errc::DegenerateState, "x + y vanished" + at(gp.t), gp.t);

  SirState next;
  if (gp.kind == PointKind::Max) return state;
  if (gp.kind == PointKind::RightScattered) {
    const double m = gp.mu_t;
    const double b = sc.b()(gp.t);
    const double c = sc.c()(gp.t);
    const double phi = b * state.x / sum;
    const double denom = 1.0 + m * (c - phi);
    require_regressive(denom, gp.t, "c - b x/(x+y)");
    next.y = state.y / denom;
    next.x = state.x - m * b * state.x * next.y / sum;
    next.z = state.z + m * c * next.y;
  } else {
    if (!(substep > 0)) throw Error(Errc::InvalidArgument, "dense step needs a positive substep");
    const auto& seg = sc.timescale().segments()[sc.timescale().locate(gp.t)];
    if (gp.t + substep > seg.hi + kMembershipTolerance * std::max(1.0, std::abs(seg.hi)))
      throw Error(Errc::NotInDomain, "dense step leaves the interval" + at(gp.t), gp.t);
    const Vec3 s{state.x, state.y, state.z};
    const double hh = substep;
    const Vec3 k1 = sir_rhs(sc, gp.t, s);
    const Vec3 k2 = sir_rhs(sc, gp.t + 0.5 * hh, axpy(s, 0.5 * hh, k1));
    const Vec3 k3 = sir_rhs(sc, gp.t + 0.5 * hh, axpy(s, 0.5 * hh, k2));
    const Vec3 k4 = sir_rhs(sc, gp.t + hh, axpy(s, hh, k3));
    for (int i = 0; i < 3; ++i) {
      const double inc = hh / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
      (i == 0 ? next.x : i == 1 ? next.y : next.z) = s[i] + inc;
    }
  }
  // y = 0 is an equilibrium; flush denormal churn.
  if (std::abs(next.y) < kTiny) next.y = 0;
  return next;
}

SolutionSeries solve(const SirScenario& sc, Time t_end, Duration h, Method method) {
  if (sc.timescale().snap(t_end) < sc.t0()) throw Error(Errc::InvalidArgument, "solve needs t_end >= t0");
  const auto points = grid(sc.timescale(), sc.t0(), t_end, h);

  std::vector<SirState> states;
  if (method == Method::ClosedForm) {
    states = closed_form_series(sc, points);
  } else {
    states.reserve(points.size());
    states.push_back(sc.init());
    for (std::size_t k = 0; k + 1 < points.size(); ++k)
      states.push_back(step_recursion(sc, states.back(), points[k], points[k + 1].t - points[k].t));
  }

  SolutionSeries series{{}, method, sc, 0.0};
  series.samples.reserve(points.size());
  const double n = sc.population();
  for (std::size_t k = 0; k < points.size(); ++k) {
    const double err = std::abs(states[k].total() - n) / n;
    if (!(err <= kConservationLimit))
      throw Error(Errc::ConservationViolated, "x + y + z drifted from N" + at(points[k].t), points[k].t);
    series.max_conservation_error = std::max(series.max_conservation_error, err);
    series.samples.push_back({points[k], states[k]});
  }
  return series;
}

}  // namespace tsir
