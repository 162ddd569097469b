#include <cmath>

#include "doctest.h"
#include "ppt/io.hpp"
#include "ppt/simulate.hpp"

using namespace ppt;

TEST_CASE("numbers with non-finite values") {
  CHECK(number_to_json(1.5) == Json(1.5));
  CHECK(number_to_json(HUGE_VAL) == Json("inf"));
  CHECK(number_to_json(-HUGE_VAL) == Json("-inf"));
  CHECK(number_to_json(std::nan("")) == Json("nan"));
  CHECK(std::isinf(number_from_json(Json("inf"))));
  CHECK(number_from_json(Json(2)) == 2.0);
  CHECK_THROWS_AS(number_from_json(Json("two")), Error);
}

TEST_CASE("configurations round-trip bit for bit") {
  const IntensityMeasure sigma = IntensityMeasure::constant(20.0, Window::unit(2));
  const Configuration omega = sample_poisson(sigma, SeedSpec{3, 0});
  REQUIRE(omega.size() > 0);
  const Json hex = configuration_to_json(omega, true);
  const Configuration back = configuration_from_json(Json::parse(hex.dump()), 2);
  CHECK(back.flat() == omega.flat());

  const Json plain = configuration_to_json(omega);
  CHECK(configuration_from_json(Json::parse(plain.dump())).flat() == omega.flat());
}

TEST_CASE("configuration parsing errors") {
  CHECK(configuration_from_json(Json::array(), 3).dim() == 3);
  CHECK_THROWS_AS(configuration_from_json(Json::parse("[[0.1],[0.2,0.3]]")), Error);
  CHECK_THROWS_AS(configuration_from_json(Json::parse("[[\"x\"]]")), Error);
  CHECK_THROWS_AS(configuration_from_json(Json::parse("{}")), Error);
  CHECK_THROWS_AS(configuration_from_json(Json::parse("[[0.1]]"), 2), Error);
}

TEST_CASE("plan serialization is sparse") {
  const std::vector<double> w{0.5, 0.5};
  const TransportPlan plan = emd(w, w, CostMatrix(2, 2, {0.0, 1.0, 1.0, 0.0}));
  const Json j = plan_to_json(plan);
  CHECK(j["entries"].size() == 2);
  CHECK(j["cost"] == Json(0.0));
}
