#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "ppt/metrics.hpp"
#include "ppt/parallel.hpp"
#include "ppt/simulate.hpp"

using namespace ppt;

namespace {
const IntensityMeasure unit = IntensityMeasure::lebesgue(Window(0.0, 1.0));
const IntensityMeasure twice = IntensityMeasure::constant(2.0, Window(0.0, 1.0));
const IntensityMeasure none = IntensityMeasure::constant(0.0, Window(0.0, 1.0));
}  // namespace

TEST_CASE("Poisson counts have Poisson mean and variance") {
  const SeedSpec seed{1, 0};
  const std::size_t n = 100000;
  const auto draws = replicate<Configuration>(n, [&](std::size_t i) { return sample_poisson(twice, seed.substream(i)); });
  const auto counts = oracle::counts(draws);
  CHECK(std::abs(oracle::mean(counts) - 2.0) <= 3.0 * std::sqrt(2.0 / n));
  CHECK(std::abs(oracle::variance(counts) - 2.0) <= 3.0 * oracle::variance_std_error(counts));
  for (const auto& c : draws) REQUIRE(c.lies_in(twice.window()));
}

TEST_CASE("zero mass gives the empty configuration") {
  for (std::uint64_t i = 0; i < 50; ++i) {
    CHECK(sample_poisson(none, SeedSpec{i, 0}).empty());
    CHECK(sample_cox(none, Mixer::gamma(2.0, 1.0), SeedSpec{i, 0}).empty());
    const GibbsDraw g = sample_gibbs(PairPotential::constant(0.3), none, SeedSpec{i, 0});
    CHECK(g.config.empty());
    CHECK(g.proposals == 1);
  }
}

TEST_CASE("sampling is reproducible") {
  CHECK(multiset_equal(sample_poisson(twice, SeedSpec{9, 2}), sample_poisson(twice, SeedSpec{9, 2})));
}

TEST_CASE("inhomogeneous locations follow the density") {
  const IntensityMeasure linear([](std::span<const double> x) { return x[0]; }, Window(0.0, 2.0), 2.0);
  Rng rng = make_rng(SeedSpec{4, 0});
  std::vector<double> xs;
  for (int i = 0; i < 40000; ++i) xs.push_back(sample_location(linear, rng)[0]);
  // density x/2 on [0, 2]: mean 4/3, variance 2/9
  CHECK(std::abs(oracle::mean(xs) - 4.0 / 3.0) <= 3.0 * std::sqrt(2.0 / 9.0 / xs.size()));
}

TEST_CASE("envelope violations are reported") {
  const IntensityMeasure bad([](std::span<const double> x) { return 3.0 * x[0]; }, Window(0.0, 1.0), 1.0);
  bool thrown = false;
  for (std::uint64_t i = 0; i < 20 && !thrown; ++i) {
    try {
      sample_poisson(bad, SeedSpec{i, 0});
    } catch (const Error& e) {
      thrown = e.kind() == ErrorKind::envelope_violation;
    }
  }
  CHECK(thrown);
}

TEST_CASE("Cox process") {
  const SeedSpec seed{2, 0};
  const std::size_t n = 100000;
  SUBCASE("degenerate mixer is Poisson") {
    const auto draws = replicate<Configuration>(
        n, [&](std::size_t i) { return sample_cox(twice, Mixer::degenerate(1.0), seed.substream(i)); });
    const auto counts = oracle::counts(draws);
    CHECK(std::abs(oracle::mean(counts) - 2.0) <= 3.0 * std::sqrt(2.0 / n));
  }
  SUBCASE("two-point mixer: law of total variance") {
    const Mixer mixer = Mixer::two_point(0.5, 1.5);
    CHECK(mixer.mean() == doctest::Approx(1.0));
    CHECK(mixer.variance() == doctest::Approx(0.25));
    const auto draws = replicate<Configuration>(n, [&](std::size_t i) { return sample_cox(twice, mixer, seed.substream(i)); });
    const auto counts = oracle::counts(draws);
    CHECK(std::abs(oracle::mean(counts) - 2.0) <= 3.0 * std::sqrt(3.0 / n));
    CHECK(std::abs(oracle::variance(counts) - 3.0) <= 3.0 * oracle::variance_std_error(counts));
  }
}

TEST_CASE("Gibbs energy") {
  const Configuration three{Point{0.1}, Point{0.2}, Point{0.3}};
  CHECK(gibbs_energy(PairPotential::constant(0.1), three) == doctest::Approx(0.6));
  CHECK(gibbs_energy(PairPotential::constant(0.1, true), three) == doctest::Approx(0.9));
  CHECK(gibbs_energy(PairPotential::constant(0.1), Configuration(1)) == 0.0);
  CHECK_THROWS_AS(gibbs_energy(PairPotential::constant(-0.1), three), Error);
}

TEST_CASE("Gibbs first-proposal acceptance matches the Poisson series") {
  const SeedSpec seed{3, 0};
  const std::size_t n = 100000;
  const double c = 0.3;
  const auto pmf = oracle::poisson_pmf_series(2.0, 200);
  for (bool diag : {false, true}) {
    double series = 0.0;
    for (std::size_t k = 0; k < pmf.size(); ++k) {
      const double kk = static_cast<double>(k);
      series += pmf[k] * std::exp(-c * (diag ? kk * kk : kk * (kk - 1.0)));
    }
    const PairPotential pot = PairPotential::constant(c, diag);
    const auto first = replicate<double>(n, [&](std::size_t i) {
      return sample_gibbs(pot, twice, seed.substream(i)).proposals == 1 ? 1.0 : 0.0;
    });
    const double p = oracle::mean(first);
    CHECK(std::abs(p - series) <= 3.0 * std::sqrt(series * (1.0 - series) / n));
  }
}

TEST_CASE("Gibbs with zero potential is Poisson") {
  const GibbsDraw g = sample_gibbs(PairPotential::constant(0.0), twice, SeedSpec{8, 0});
  CHECK(g.proposals == 1);
  CHECK(multiset_equal(g.config, g.first_proposal));
}

TEST_CASE("Gibbs hardness is reported") {
  GibbsOptions opts;
  opts.min_acceptance = 0.5;
  const IntensityMeasure heavy = IntensityMeasure::constant(20.0, Window(0.0, 1.0));
  try {
    sample_gibbs(PairPotential::constant(5.0), heavy, SeedSpec{1, 0}, opts);
    FAIL("expected a hardness error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::sampling_hardness);
    CHECK(std::string(e.what()).find("mean proposal size") != std::string::npos);
  }
}

TEST_CASE("coupled Gibbs pair shares the first proposal") {
  const CoupledPair pair = sample_coupled_gibbs(PairPotential::constant(0.05), unit, SeedSpec{12, 0});
  const GibbsDraw g = sample_gibbs(PairPotential::constant(0.05), unit, SeedSpec{12, 0});
  CHECK(multiset_equal(pair.left, g.first_proposal));
  CHECK(multiset_equal(pair.right, g.config));
}

TEST_CASE("superposition coupling") {
  const SeedSpec seed{5, 0};
  const std::size_t n = 100000;
  SUBCASE("p = 1 gives identical sides") {
    const SuperpositionCoupler coupler(unit, [](std::span<const double>) { return 1.0; }, 1.0);
    for (std::uint64_t i = 0; i < 100; ++i) {
      const CoupledPair pair = coupler.sample(seed.substream(i));
      CHECK(multiset_equal(pair.left, pair.right));
      CHECK(*pair.cost_hint == 0.0);
    }
  }
  SUBCASE("marginals and unbiased cost for p(x) = 2x") {
    // int p = 1, int |p - 1| = 1/2 on [0, 1]
    const SuperpositionCoupler coupler(unit, [](std::span<const double> x) { return 2.0 * x[0]; }, 2.0);
    const auto pairs = replicate<CoupledPair>(n, [&](std::size_t i) { return coupler.sample(seed.substream(i)); });
    std::vector<double> left, right, cost;
    for (const auto& p : pairs) {
      left.push_back(static_cast<double>(p.left.size()));
      right.push_back(static_cast<double>(p.right.size()));
      cost.push_back(*p.cost_hint);
    }
    CHECK(std::abs(oracle::mean(left) - 1.0) <= 3.0 * std::sqrt(1.0 / n));
    CHECK(std::abs(oracle::mean(right) - 1.0) <= 3.0 * std::sqrt(1.0 / n));
    CHECK(std::abs(oracle::mean(cost) - 0.5) <= 3.0 * std::sqrt(oracle::variance(cost) / n));
  }
}

TEST_CASE("time-change specification") {
  const TimeChangeSpec tc = TimeChangeSpec::rational(1.0, 20.0);
  CHECK(tc.u(1.0) == doctest::Approx(0.5));
  CHECK(tc.forward(tc.inverse(3.0)) == doctest::Approx(3.0).epsilon(1e-11));
  CHECK_THROWS_AS(TimeChangeSpec::rational(-3.0, 20.0), Error);
  CHECK_THROWS_AS(TimeChangeSpec::damped_linear(-2.0, 0.1, 20.0), Error);
}

TEST_CASE("time-change coupling") {
  const SeedSpec seed{6, 0};
  SUBCASE("U = 0 gives identical sides") {
    const TimeChangeSpec zero = TimeChangeSpec::rational(0.0, 10.0);
    const CoupledPair pair = sample_coupled_timechange(zero, seed);
    CHECK(multiset_equal(pair.left, pair.right));
    CHECK(*pair.cost_hint == 0.0);
  }
  SUBCASE("order preserved and cost dominated by the L2 norm") {
    const TimeChangeSpec tc = TimeChangeSpec::rational(1.0, 20.0);
    const std::size_t n = 100000;
    const auto pairs = replicate<CoupledPair>(n, [&](std::size_t i) { return sample_coupled_timechange(tc, seed.substream(i)); });
    std::vector<double> cost;
    for (std::size_t i = 0; i < n; ++i) {
      const auto& p = pairs[i];
      cost.push_back(*p.cost_hint);
      if (i < 200) {
        REQUIRE(p.left.size() == p.right.size());
        for (std::size_t k = 0; k + 1 < p.left.size(); ++k) {
          CHECK(p.left.atom(k)[0] <= p.left.atom(k + 1)[0]);
          CHECK(p.right.atom(k)[0] <= p.right.atom(k + 1)[0]);
        }
        CHECK(rho2(p.left, p.right).value() <= *p.cost_hint + 1e-9);
      }
    }
    // ||U||_{L2[0,20]} for U = t/(1+t^3) is just under 1/sqrt(3)
    CHECK(oracle::mean(cost) <= 1.0 / std::sqrt(3.0) + 3.0 * std::sqrt(oracle::variance(cost) / n));
  }
}
