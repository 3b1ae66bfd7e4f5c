#include <cmath>

#include "doctest.h"
#include "generators.hpp"
#include "tsir/errors.hpp"
#include "tsir/limits.hpp"

using namespace tsir;

namespace {

using C = CoefficientFunction;

SirScenario on_integers(long n, C b, C c, SirState init) {
  return SirScenario(testgen::integer_range(0, n + 1), std::move(b), std::move(c), init, 0);
}

}  // namespace

TEST_SUITE("limits") {
  TEST_CASE("equilibrium plane membership") {
    const auto plane = equilibria(1.0);
    CHECK(plane.contains({0.3, 0, 0.7}));
    CHECK_FALSE(plane.contains({0.3, 0.01, 0.69}));
    CHECK(plane.distance({0.3, 0.01, 0.69}) == doctest::Approx(0.01));
    CHECK(plane.at(0.25) == SirState{0.25, 0, 0.75});
    CHECK_THROWS_AS(equilibria(0), Error);
  }

  TEST_CASE("constant rates with b > c remove everyone") {
    const auto sc = on_integers(500, C::constant(0.2), C::constant(0.1), {0.8, 0.1, 0.1});
    const auto r = classify_limit(sc, 500);
    CHECK(r.outcome == LimitOutcome::AllRemoved);
    CHECK(r.certificate == Certificate::ConstantCoefficients);
    CHECK_FALSE(r.alpha_estimate);
    CHECK(r.horizon == 500);
    CHECK(r.horizon_state.x < 1e-3);
    CHECK(r.horizon_state.y < 1e-3);
    CHECK(std::abs(r.horizon_state.z - 1) < 1e-3);
    CHECK(equilibria(1.0).distance(r.horizon_state) < 1e-3);
  }

  TEST_CASE("constant rates with b < c leave residual susceptibles") {
    const auto sc = on_integers(500, C::constant(0.2), C::constant(0.3), {0.8, 0.1, 0.1});
    const auto r = classify_limit(sc, 500);
    CHECK(r.outcome == LimitOutcome::PartialSusceptible);
    CHECK(r.certificate == Certificate::ConstantCoefficients);
    CHECK(r.criterion == Criterion::DominatedTransmission);
    REQUIRE(r.transmission_bound_m);
    CHECK(*r.transmission_bound_m == doctest::Approx(2));
    REQUIRE(r.alpha_lower_bound);
    CHECK(*r.alpha_lower_bound == doctest::Approx(0.8 * std::exp(-0.125 * 2)).epsilon(1e-14));
    REQUIRE(r.alpha_estimate);
    CHECK(*r.alpha_estimate >= *r.alpha_lower_bound);
    CHECK(*r.alpha_estimate <= 1);
    CHECK(r.horizon_state.y < 1e-6);
    CHECK(equilibria(1.0).distance(r.horizon_state) < 1e-3);
  }

  TEST_CASE("equal constant rates") {
    const auto sc = on_integers(200, C::constant(0.25), C::constant(0.25), {0.5, 0.5, 0});
    const auto r = classify_limit(sc, 200);
    CHECK(r.outcome == LimitOutcome::AllRemoved);
    CHECK(r.certificate == Certificate::ConstantCoefficients);

    const auto idle = on_integers(20, C::constant(0), C::constant(0), {0.5, 0.5, 0});
    const auto u = classify_limit(idle, 20);
    CHECK(u.outcome == LimitOutcome::Undetermined);
    CHECK(u.certificate == Certificate::None);
  }

  TEST_CASE("time-varying rates are labelled numeric only") {
    const C wave = coeff::Sinusoid{0.3, 0.1, 1.0};
    const auto same = on_integers(500, wave, wave, {0.8, 0.1, 0.1});
    const auto r1 = classify_limit(same, 500);
    CHECK(r1.outcome == LimitOutcome::AllRemoved);
    CHECK(r1.certificate == Certificate::NumericOnly);
    CHECK(r1.criterion == Criterion::BoundedDrift);

    const auto dominated = on_integers(500, C::constant(0.1), wave, {0.8, 0.1, 0.1});
    const auto r2 = classify_limit(dominated, 500);
    CHECK(r2.outcome == LimitOutcome::PartialSusceptible);
    CHECK(r2.certificate == Certificate::NumericOnly);
    REQUIRE(r2.transmission_bound_m);
    CHECK(*r2.transmission_bound_m == doctest::Approx(1).epsilon(1e-3));
    REQUIRE(r2.alpha_lower_bound);
    REQUIRE(r2.alpha_estimate);
    CHECK(*r2.alpha_lower_bound <= *r2.alpha_estimate);

    // c = 0.6 / (t + 1) falls below b = 0.2: the running integral of c - b
    // heads to -inf (bounded above) while b / (1 + c - b) sums to infinity.
    const auto fading = on_integers(300, C::constant(0.2), coeff::Reciprocal{0.6, 1.0}, {0.8, 0.1, 0.1});
    const auto r3 = classify_limit(fading, 300);
    CHECK(r3.outcome == LimitOutcome::AllRemoved);
    CHECK(r3.criterion == Criterion::BoundedDrift);
    CHECK(r3.certificate == Certificate::NumericOnly);
    // y only decays like a power of t here, so check direction rather than distance.
    CHECK(r3.horizon_state.x < 1e-3);
    CHECK(r3.horizon_state.y < classify_limit(fading, 150).horizon_state.y);
  }

  TEST_CASE("classification requires a positively regressive rate gap") {
    const auto sc = on_integers(50, C::constant(2.0), C::constant(0.5), {0.8, 0.1, 0.1});
    try {
      classify_limit(sc, 50);
      FAIL("expected Nonregressive");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::Nonregressive);
      CHECK(e.witness());
    }
  }

  TEST_CASE("monotonicity report examples") {
    const auto removal = on_integers(60, C::constant(0.2), C::constant(0.3), {0.8, 0.1, 0.1});
    const auto r1 = monotonicity_report(removal, 60);
    CHECK(r1.removal_dominates_everywhere);
    CHECK(r1.decrease_predicted);
    CHECK(r1.decrease_verified);
    CHECK(r1.max_ratio_drop <= 1e-12);

    const auto ex19 = on_integers(24, C::constant(0.4), C::constant(0.2), {0.8, 0.2, 0});
    const auto r2 = monotonicity_report(ex19, 24);
    CHECK(r2.initial_growth_predicted);
    CHECK(r2.initial_growth_verified);
    CHECK_FALSE(r2.decrease_predicted);
    CHECK(r2.max_increase == doctest::Approx(0.2 / 0.88 - 0.2).epsilon(1e-12));

    const auto equal = on_integers(40, C::constant(0.3), C::constant(0.3), {0.6, 0.3, 0.1});
    const auto r3 = monotonicity_report(equal, 40);
    CHECK(r3.removal_dominates_everywhere);
    CHECK(r3.bracketed_everywhere);
    CHECK(r3.decrease_verified);
  }

  TEST_CASE("property: y never increases in either decreasing regime") {
    testgen::Rng rng(41);
    for (int trial = 0; trial < 30; ++trial) {
      const auto ts = testgen::random_mixed_scale(rng);
      const double x0 = testgen::uniform(rng, 0.1, 1.0);
      const double y0 = testgen::uniform(rng, 0.05, 1.0);
      const double b = testgen::uniform(rng, 0.0, 0.6);
      double c = 0;
      if (trial % 2 == 0) {
        c = testgen::uniform(rng, b, 0.8);
      } else {
        c = testgen::uniform(rng, x0 / (x0 + y0) * b, b);
      }
      const SirScenario sc(ts, C::constant(b), C::constant(c), {x0, y0, 0.1}, ts.min());
      const auto rep = monotonicity_report(sc, ts.max(), 0.01);
      CHECK(rep.decrease_predicted);
      CHECK(rep.decrease_verified);
      if (trial % 2 == 0) CHECK(rep.max_ratio_drop <= 1e-12);
    }
  }
}
