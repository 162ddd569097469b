#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "ppt/metrics.hpp"

using namespace ppt;

namespace {
Configuration line(std::initializer_list<double> xs) {
  Configuration c(1);
  for (double x : xs) c.add(Point{x});
  return c;
}
}  // namespace

TEST_CASE("extended reals") {
  const ExtendedReal inf = ExtendedReal::infinity();
  CHECK((inf + 1.0).is_infinite());
  CHECK((0.0 * inf) == ExtendedReal(0.0));
  CHECK(ExtendedReal(1.0) < inf);
  CHECK_THROWS_AS(inf - inf, Error);
  CHECK_THROWS_AS(ExtendedReal(1.0) - ExtendedReal(2.0), Error);
  CHECK_THROWS_AS(ExtendedReal(-1.0), Error);
  CHECK_THROWS_AS(inf.finite_value(), Error);
  CHECK(std::isinf(inf.value()));
}

TEST_CASE("rho0") {
  CHECK(rho0(line({0.5}), line({0.5})) == 0);
  CHECK(rho0(line({0.1, 0.2}), line({0.2})) == 1);
  CHECK(rho0(line({0.3, 0.3}), line({0.3})) == 1);
}

TEST_CASE("rho1") {
  CHECK(rho1(line({0.2, 0.7}), line({0.7, 0.2})) == 0);
  CHECK(rho1(line({}), line({0.2})) == 1);
  CHECK(rho1(line({0.0}), line({1.0})) == 2);
  CHECK(rho1(line({0.0, 0.5}), line({0.5, 1.0, 2.0})) == 3);
}

TEST_CASE("rho2") {
  CHECK(rho2(line({0.4, 0.1}), line({0.1, 0.4})) == ExtendedReal(0.0));
  CHECK(rho2(line({0.0}), line({0.0, 1.0})).is_infinite());
  CHECK(rho2(line({0.0, 1.0}), line({0.2, 1.1})).value() == doctest::Approx(std::sqrt(0.05)).epsilon(1e-14));
  CHECK(rho2(line({}), line({})) == ExtendedReal(0.0));
}

TEST_CASE("rho2 matches brute force on random pairs") {
  Rng rng = make_rng(SeedSpec{2024, 0});
  std::uniform_real_distribution<double> u(-1.0, 2.0);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t dim = 1 + trial % 2;
    const std::size_t n = 1 + trial % 6;
    Configuration a(dim), b(dim);
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<double> x(dim), y(dim);
      for (auto& v : x) v = u(rng);
      for (auto& v : y) v = u(rng);
      a.add(x);
      b.add(y);
    }
    CHECK(rho2(a, b).value() == doctest::Approx(oracle::brute_force_rho2(a, b)).epsilon(1e-12));
  }
}

TEST_CASE("normalized distances") {
  CHECK(rho1_normalized(line({0.0}), line({1.0})) == 2.0);
  for (int n = 2; n <= 10; ++n) {
    CHECK(rho1_normalized(line({0.0, double(n)}), line({1.0, double(n)})) == 1.0);
  }
  CHECK(rho1_normalized(line({0.3, 0.6}), line({0.6, 0.3})) == 0.0);
  CHECK_THROWS_AS(rho1_normalized(line({}), line({0.1})), Error);

  CHECK(rho2_normalized(line({0.0}), line({1.0})) == doctest::Approx(1.0));
  CHECK(rho2_normalized(line({0.0}), line({0.0, 1.0})) == doctest::Approx(1.0));
  CHECK(rho2_normalized(line({}), line({})) == 0.0);
}

TEST_CASE("marked Wasserstein distance") {
  const Configuration a{Point{1.0, 0.0}};
  const Configuration b{Point{2.0, 0.0}};
  CHECK(rho2_marked(a, a) == ExtendedReal(0.0));
  CHECK(rho2_marked(a, b).value() == doctest::Approx(1.0));
  CHECK(rho2_marked(a, Configuration(2)).is_infinite());
  CHECK_THROWS_AS(rho2_marked(line({1.0}), line({2.0})), Error);
}

TEST_CASE("metric dispatch") {
  CHECK(metric_from_string("rho1") == Metric::rho1);
  CHECK(to_string(Metric::rho2) == "rho2");
  CHECK_THROWS_AS(metric_from_string("rho9"), Error);
  CHECK(distance(Metric::rho1, line({0.0}), line({1.0})) == ExtendedReal(2.0));
  CHECK(distance(Metric::rho0, line({0.0}), line({1.0})) == ExtendedReal(1.0));
}
