#include <cmath>

#include "doctest.h"
#include "ppt/expr.hpp"

using namespace ppt;

TEST_CASE("density expressions") {
  CHECK(parse_density_expr("const:2")(0.7) == 2.0);
  CHECK(parse_density_expr("poly:0,1")(0.7) == 0.7);
  CHECK(parse_density_expr("poly:1,0,3")(2.0) == 13.0);
  CHECK(parse_density_expr("exp:2,-1")(1.0) == doctest::Approx(2.0 * std::exp(-1.0)));
  const Expression step = parse_density_expr("step:0.5,0,2");
  CHECK(step(0.25) == 0.0);
  CHECK(step(0.75) == 2.0);
  CHECK(parse_density_expr("const:+1.5e0")(0.0) == 1.5);
}

TEST_CASE("step density has total mass 1 on the unit interval") {
  const IntensityMeasure sigma = make_intensity(parse_density_expr("step:0.5,0,2"), Window(0.0, 1.0));
  CHECK(sigma.total_mass() == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(sigma.density_sup() == 2.0);
}

TEST_CASE("envelope from the expression") {
  CHECK(parse_density_expr("exp:1,2").sup_over(0.0, 1.0) == doctest::Approx(std::exp(2.0)));
  CHECK(parse_density_expr("poly:0,0,1").sup_over(-1.0, 2.0) >= 4.0);
  CHECK_THROWS_AS(make_intensity(parse_density_expr("poly:-1,1"), Window(0.0, 2.0)), Error);
}

TEST_CASE("parse errors carry a position") {
  CHECK_THROWS_WITH_AS(parse_density_expr("const"), doctest::Contains("position 5"), Error);
  CHECK_THROWS_WITH_AS(parse_density_expr("const:2,3"), doctest::Contains("const takes 1"), Error);
  CHECK_THROWS_WITH_AS(parse_density_expr("const:2x"), doctest::Contains("position 7"), Error);
  CHECK_THROWS_WITH_AS(parse_density_expr("sin:1"), doctest::Contains("unknown function"), Error);
  CHECK_THROWS_AS(parse_density_expr("poly:"), Error);
  CHECK_THROWS_AS(parse_density_expr("exp:1,,2"), Error);
}

TEST_CASE("potentials act on the distance") {
  const PairPotential phi = parse_density_expr("poly:0,1").as_potential();
  const double d[2] = {3.0, 4.0};
  CHECK(phi.phi(d) == doctest::Approx(5.0));
  CHECK_FALSE(phi.include_diagonal);
}

TEST_CASE("time-change grammar") {
  const TimeChangeSpec r = parse_time_change("rational:2", 10.0);
  CHECK(r.u(1.0) == doctest::Approx(1.0));
  const TimeChangeSpec d = parse_time_change("damped:1,0.5", 10.0);
  CHECK(d.u(2.0) == doctest::Approx(2.0 * std::exp(-1.0)));
  CHECK(d.horizon() == 10.0);
  CHECK_THROWS_AS(parse_time_change("linear:1", 10.0), Error);
  CHECK_THROWS_AS(parse_time_change("damped:1", 10.0), Error);
}
