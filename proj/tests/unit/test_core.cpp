#include <cmath>
#include <set>

#include "doctest.h"
#include "oracles.hpp"
#include "ppt/core.hpp"
#include "ppt/parallel.hpp"
#include "ppt/quadrature.hpp"
#include "ppt/simulate.hpp"

using namespace ppt;

TEST_CASE("configuration basics") {
  Configuration c{Point{0.3}, Point{0.1}, Point{0.3}};
  CHECK(c.size() == 3);
  CHECK(c.dim() == 1);
  CHECK(c.count_in(Window(0.2, 0.4)) == 2);
  CHECK(c.restricted(Window(0.0, 0.2)).size() == 1);
  CHECK(c.plus(Point{0.5}.coords()).size() == 4);
  CHECK(c.merged(c).size() == 6);
  CHECK(multiset_equal(c, Configuration{Point{0.1}, Point{0.3}, Point{0.3}}));
  CHECK_FALSE(multiset_equal(c, Configuration{Point{0.1}, Point{0.3}}));
  CHECK(sym_diff_count(c, Configuration{Point{0.3}}) == 2);
  CHECK_THROWS_AS(Configuration(0), Error);
  CHECK_THROWS_AS(Configuration(1).add(Point{0.1, 0.2}), Error);
}

TEST_CASE("window geometry") {
  const Window w({0.0, 0.0}, {2.0, 0.5});
  CHECK(w.volume() == doctest::Approx(1.0));
  const std::vector<double> inside{1.0, 0.25}, outside{1.0, 0.75};
  CHECK(w.contains(inside));
  CHECK_FALSE(w.contains(outside));
  CHECK(w.intersect(Window::unit(2)).volume() == doctest::Approx(0.5));
  CHECK_THROWS_AS(Window(1.0, 0.0), Error);
}

TEST_CASE("seed substreams are deterministic and distinct") {
  const SeedSpec s{7, 0};
  CHECK(s.substream(3) == s.substream(3));
  CHECK_FALSE(s.substream(3) == s.substream(4));
  Rng a = make_rng(s.substream(1));
  Rng b = make_rng(s.substream(1));
  CHECK(a() == b());
  std::set<std::uint64_t> firsts;
  for (std::uint64_t i = 0; i < 1000; ++i) firsts.insert(make_rng(s.substream(i))());
  CHECK(firsts.size() == 1000);
}

TEST_CASE("estimate_from") {
  const std::vector<double> v{1.0, 2.0, 3.0, 4.0};
  const Estimate e = estimate_from(v, SeedSpec{});
  CHECK(e.mean == doctest::Approx(2.5));
  CHECK(e.std_error == doctest::Approx(std::sqrt(oracle::variance(v) / 4.0)));
  CHECK(e.n_samples == 4);
}

TEST_CASE("intensity measure total mass") {
  CHECK(total_mass(IntensityMeasure::lebesgue(Window(0.0, 1.0))) == doctest::Approx(1.0));
  CHECK(total_mass(IntensityMeasure::constant(2.0, Window::unit(2))) == doctest::Approx(2.0));
  const IntensityMeasure linear([](std::span<const double> x) { return x[0]; }, Window(0.0, 2.0), 2.0);
  // analytic: integral of x over [0, 2]
  CHECK(linear.total_mass() == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(linear.mass_in(Window(0.0, 1.0)) == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(linear.scaled(3.0).total_mass() == doctest::Approx(6.0).epsilon(1e-10));
  const Density tilted = [](std::span<const double> x) { return 1.0 + x[0]; };
  CHECK_THROWS_AS(IntensityMeasure(tilted, Window::unit(4), 2.0), Error);
}

TEST_CASE("discrete gradient") {
  const Functional constant = [](const Configuration&) { return 4.0; };
  const Window k(0.0, 0.5);
  const Functional count_k = [k](const Configuration& c) { return static_cast<double>(c.count_in(k)); };
  const Configuration omega{Point{0.7}};
  CHECK(grad_sharp(constant, omega, Point{0.2}) == 0.0);
  CHECK(grad_sharp(count_k, omega, Point{0.2}) == 1.0);
  CHECK(grad_sharp(count_k, omega, Point{0.8}) == 0.0);

  // e^{-V} with V = c n^2 (diagonal included): e^{-0.4} - e^{-0.1}
  const Functional gibbs = gibbs_density(PairPotential::constant(0.1, true));
  CHECK(grad_sharp(gibbs, omega, Point{0.2}) == doctest::Approx(-0.2345173720003203).epsilon(1e-12));

  const Functional sum = [&](const Configuration& c) { return count_k(c) + gibbs(c); };
  CHECK(grad_sharp(sum, omega, Point{0.1}) ==
        doctest::Approx(grad_sharp(count_k, omega, Point{0.1}) + grad_sharp(gibbs, omega, Point{0.1})));
}

TEST_CASE("rademacher check") {
  const IntensityMeasure sigma = IntensityMeasure::constant(2.0, Window(0.0, 1.0));
  const SeedSpec seed{11, 0};
  const Functional capped = [](const Configuration& c) { return std::min<double>(static_cast<double>(c.size()), 5.0); };
  const Functional doubled = [](const Configuration& c) { return 2.0 * static_cast<double>(c.size()); };
  CHECK(rademacher_check(capped, sigma, 2000, seed) <= 1.0);
  CHECK(rademacher_check(doubled, sigma, 200, seed) == 2.0);
}

TEST_CASE("gradient mass of the count is the total mass") {
  const IntensityMeasure sigma = IntensityMeasure::constant(1.5, Window(0.0, 1.0));
  const Functional count = [](const Configuration& c) { return static_cast<double>(c.size()); };
  const Estimate e = gradient_mass(count, sigma, 500, SeedSpec{3, 0});
  CHECK(e.mean == doctest::Approx(1.5));
  CHECK(e.std_error == doctest::Approx(0.0));
}

TEST_CASE("parallel results do not depend on the thread count") {
  const auto run = [] {
    return replicate<double>(500, [](std::size_t i) {
      Rng rng = make_rng(SeedSpec{5, 0}.substream(i));
      return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    });
  };
  const unsigned before = thread_count();
  set_thread_count(1);
  const auto one = run();
  set_thread_count(4);
  const auto four = run();
  set_thread_count(before);
  CHECK(one == four);
}

TEST_CASE("quadrature") {
  CHECK(integrate([](double x) { return std::abs(x - 1.0); }, 0.0, 2.0).value ==
        doctest::Approx(1.0).epsilon(1e-10));
  const std::vector<double> lo{0.0, 0.0}, hi{1.0, 1.0};
  const auto r = integrate_box([](std::span<const double> x) { return x[0] * x[1]; }, lo, hi);
  CHECK(r.value == doctest::Approx(0.25).epsilon(1e-10));
}
