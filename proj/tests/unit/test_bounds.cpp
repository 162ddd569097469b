#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "ppt/bounds.hpp"
#include "ppt/simulate.hpp"

using namespace ppt;

namespace {
const IntensityMeasure unit = IntensityMeasure::lebesgue(Window(0.0, 1.0));
Density constant(double c) {
  return [c](std::span<const double>) { return c; };
}
}  // namespace

TEST_CASE("Poisson total-variation bound") {
  CHECK(bound_tv_poisson(constant(1.0), unit).value == doctest::Approx(0.0).scale(1.0));
  CHECK(bound_tv_poisson(constant(2.0), unit).value == doctest::Approx(1.0).epsilon(1e-12));
  const IntensityMeasure wide = IntensityMeasure::lebesgue(Window(0.0, 2.0));
  // analytic: integral of |x - 1| over [0, 2]
  const BoundResult r = bound_tv_poisson([](std::span<const double> x) { return x[0]; }, wide);
  CHECK(r.value == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(r.method == BoundMethod::quadrature);
  CHECK(r.inputs_digest.size() == 16);
  CHECK_THROWS_AS(bound_tv_poisson(constant(-1.0), unit), Error);
}

TEST_CASE("Cox bound") {
  const IntensityMeasure two = IntensityMeasure::constant(2.0, Window(0.0, 1.0));
  CHECK(bound_tv_cox(two, Mixer::degenerate(1.0), 1000, SeedSpec{1, 0}).value == 0.0);
  const BoundResult r = bound_tv_cox(two, Mixer::two_point(0.5, 1.5), 100000, SeedSpec{1, 0});
  // E|Xi - 1| = 0.5 for the equiprobable two-point mixer
  CHECK(std::abs(r.value - 1.0) <= 3.0 * r.std_error + 1e-12);
  const IntensityMeasure none = IntensityMeasure::constant(0.0, Window(0.0, 1.0));
  CHECK(bound_tv_cox(none, Mixer::gamma(2.0, 0.5), 1000, SeedSpec{1, 0}).value == 0.0);
}

TEST_CASE("Gibbs bound") {
  CHECK(bound_tv_gibbs(PairPotential::constant(0.0), unit).value == 0.0);
  const IntensityMeasure three = IntensityMeasure::constant(3.0, Window(0.0, 1.0));
  CHECK(bound_tv_gibbs(PairPotential::constant(0.05), three).value == doctest::Approx(2 * 0.05 * 9).epsilon(1e-10));
  // with the self-interaction term phi(0) sigma(Λ) added
  CHECK(bound_tv_gibbs(PairPotential::constant(0.05, true), three).value ==
        doctest::Approx(0.9 + 0.15).epsilon(1e-10));
}

TEST_CASE("Gibbs bound with a Gaussian potential agrees with Monte Carlo integration") {
  const PairPotential gauss{[](std::span<const double> d) { return std::exp(-d[0] * d[0]); }, false};
  const double quad = bound_tv_gibbs(gauss, unit).value;
  Rng rng = make_rng(SeedSpec{77, 0});
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const std::size_t n = 10'000'000;
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = u(rng) - u(rng);
    acc += std::exp(-d * d);
  }
  const double mc = 2.0 * acc / static_cast<double>(n);
  CHECK(quad == doctest::Approx(mc).epsilon(1e-4));
  // frozen high-precision value of 2 ∫∫ exp(-(x-y)^2) over the unit square
  CHECK(quad == doctest::Approx(1.7230554135925927).epsilon(1e-9));
}

TEST_CASE("half-line Wasserstein bound") {
  CHECK(bound_w2_halfline(TimeChangeSpec::rational(0.0, 100.0)).value == 0.0);
  const BoundResult r = bound_w2_halfline(TimeChangeSpec::rational(1.0, 1000.0));
  CHECK(r.value == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-6));
  REQUIRE(r.truncation_estimate.has_value());
  CHECK(*r.truncation_estimate < 1e-6);
  const BoundResult scaled = bound_w2_halfline(TimeChangeSpec::rational(0.5, 1000.0));
  CHECK(scaled.value == doctest::Approx(0.5 * r.value).epsilon(1e-9));
}

TEST_CASE("time-change bound") {
  CHECK(bound_w2_timechange(TimeChangeSpec::rational(0.0, 100.0)).value == 0.0);
  const TimeChangeSpec tc = TimeChangeSpec::rational(1.0, 1000.0);
  const BoundResult single = bound_w2_timechange(tc);
  CHECK(single.value == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-6));
  CHECK(single.value == doctest::Approx(bound_w2_halfline(tc).value).epsilon(1e-6));
  // two marks with weights 1/2 and 1/2 reduce to a weighted mean of squared bounds
  const TimeChangeSpec half = TimeChangeSpec::rational(0.5, 1000.0);
  const BoundResult two = bound_w2_timechange({{tc, 0.5}, {half, 0.5}});
  CHECK(two.value == doctest::Approx(std::sqrt(0.5 / 3.0 + 0.5 * 0.25 / 3.0)).epsilon(1e-6));
  CHECK_THROWS_AS(bound_w2_timechange(std::vector<MarkedTimeChange>{}), Error);
  CHECK_THROWS_AS(bound_w2_timechange({{tc, -1.0}}), Error);
}

TEST_CASE("general bound") {
  const Functional one = [](const Configuration&) { return 1.0; };
  CHECK(bound_tv_general(one, unit, 500, SeedSpec{2, 0}).value == 0.0);

  // Poisson(2 Lebesgue) density w.r.t. Poisson(Lebesgue): L = e^{-1} 2^{n}
  const Functional poisson = [](const Configuration& c) {
    return std::exp(-1.0) * std::pow(2.0, static_cast<double>(c.size()));
  };
  const BoundResult r = bound_tv_general(poisson, unit, 10000, SeedSpec{2, 0});
  CHECK(std::abs(r.value - 1.0) <= 3.0 * r.std_error);

  const PairPotential pot = PairPotential::constant(0.05);
  const BoundResult g = bound_tv_general(gibbs_density(pot), unit, 10000, SeedSpec{2, 0});
  CHECK(g.value <= bound_tv_gibbs(pot, unit).value + 3.0 * g.std_error);
}
