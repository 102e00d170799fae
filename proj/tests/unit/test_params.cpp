#include "cbod/errors.hpp"
#include "cbod/params.hpp"
#include "generators.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace cbod;

TEST_CASE("ramp endpoints and analytic derivatives") {
  const RampSchedule s{50.0, 25.0, 1.0};
  CHECK(ramp_eval(s, 0.0).value == doctest::Approx(50.0));
  CHECK(ramp_eval(s, 1.0).value == doctest::Approx(75.0));
  for (const double t : {0.0, 1.0}) {
    CHECK(std::abs(ramp_eval(s, t).rate) < 1e-12);
    CHECK(std::abs(ramp_eval(s, t).accel) < 1e-9);
  }
  // Midpoint: K = k0 + k1/2, rate = 2 k1 / Tf.
  CHECK(ramp_eval(s, 0.5).value == doctest::Approx(62.5));
  CHECK(ramp_eval(s, 0.5).rate == doctest::Approx(50.0));
}

TEST_CASE("ramp derivatives match finite differences") {
  for (int trial = 0; trial < 50; ++trial) {
    const RampSchedule s{gen::uniform(1.0, 100.0), gen::uniform(-40.0, 40.0), gen::log_uniform(0.05, 3.0)};
    const double t = gen::uniform(0.1, 0.9) * s.Tf;
    const double h = 1e-4 * s.Tf;
    const auto v = [&](double x) { return ramp_eval(s, x); };
    const double rate = (v(t + h).value - v(t - h).value) / (2 * h);
    const double accel = (v(t + h).rate - v(t - h).rate) / (2 * h);
    CHECK(v(t).rate == doctest::Approx(rate).epsilon(1e-6));
    CHECK(v(t).accel == doctest::Approx(accel).epsilon(1e-6).scale(std::abs(s.k1) / (s.Tf * s.Tf)));
  }
}

TEST_CASE("ramp is monotone for positive k1") {
  const RampSchedule s{10.0, 5.0, 2.0};
  double prev = -1.0;
  for (int i = 0; i <= 200; ++i) {
    const double v = ramp_eval(s, 2.0 * i / 200).value;
    CHECK(v >= prev);
    prev = v;
  }
}

TEST_CASE("ramp rejects times outside the protocol") {
  const RampSchedule s{1.0, 1.0, 1.0};
  CHECK_THROWS_AS(ramp_eval(s, -0.1), DomainError);
  CHECK_THROWS_AS(ramp_eval(s, 1.1), DomainError);
  CHECK_THROWS_AS(ramp_eval({1.0, 1.0, 0.0}, 0.0), DomainError);
}

TEST_CASE("spring profiles") {
  const SpringProfile fixed = 3.0;
  CHECK_FALSE(fixed.is_ramped());
  CHECK(fixed.at(0.7).value == 3.0);
  CHECK(fixed.at(0.7).rate == 0.0);
  const SpringProfile r = RampSchedule{1.0, 2.0, 1.0};
  REQUIRE(r.is_ramped());
  CHECK(r.ramp()->k1 == 2.0);
  CHECK(r.at(1.0).value == doctest::Approx(3.0));
}

TEST_CASE("validate reports the first violation") {
  OscillatorParams p;
  CHECK_FALSE(validate(p, 1.0, 65).has_value());

  p.kI = 120.0; // kappaS kappaF = 1e4 < kI^2
  const auto v = validate(p, 1.0, 65);
  REQUIRE(v.has_value());
  CHECK(v->time == 0.0);

  // A ramp that crosses the edge part way through.
  p.kI = RampSchedule{50.0, 60.0, 1.0};
  const auto late = validate(p, 1.0, 257);
  REQUIRE(late.has_value());
  CHECK(late->time > 0.3);
  CHECK(late->time < 1.0);

  OscillatorParams bad;
  bad.mS = -1.0;
  CHECK(validate(bad, 1.0, 3).has_value());
  CHECK_THROWS_AS(validate(OscillatorParams{}, 1.0, 1), DomainError);
}

TEST_CASE("unit system") {
  CHECK_NOTHROW(UnitSystem{2.0}.check());
  CHECK_THROWS_AS(UnitSystem{0.0}.check(), DomainError);
  CHECK_THROWS_AS(UnitSystem{-1.0}.check(), DomainError);
}
