#include <cmath>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "ppt/parallel.hpp"
#include "ppt/simulate.hpp"
#include "ppt/transport.hpp"

using namespace ppt;

namespace {

CostMatrix random_costs(Rng& rng, std::size_t n, std::size_t m) {
  std::uniform_int_distribution<int> d(0, 50);
  CostMatrix c(n, m);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j) c.set(i, j, static_cast<double>(d(rng)) / 4.0);
  return c;
}

std::vector<double> uniform(std::size_t n) { return std::vector<double>(n, 1.0 / static_cast<double>(n)); }

}  // namespace

TEST_CASE("assignment on tiny cases") {
  const CostMatrix one(1, 1, {3.5});
  const Assignment a = assignment_solve(one);
  CHECK(a.permutation == std::vector<std::size_t>{0});
  CHECK(a.cost == 3.5);

  // both permutations cost 2
  const CostMatrix tie(2, 2, {1.0, 1.0, 1.0, 1.0});
  CHECK(assignment_solve(tie).cost == 2.0);
  CHECK_THROWS_AS(assignment_solve(CostMatrix(2, 3)), Error);
}

TEST_CASE("assignment matches factorial brute force") {
  Rng rng = make_rng(SeedSpec{31, 0});
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 1 + trial % 6;
    const CostMatrix c = random_costs(rng, n, n);
    const Assignment a = assignment_solve(c);
    const double brute = oracle::brute_force_assignment(n, [&](std::size_t i, std::size_t j) { return c(i, j); });
    CHECK(a.cost == brute);
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += c(i, a.permutation[i]);
    CHECK(s == a.cost);
  }
}

TEST_CASE("emd basics") {
  const std::vector<double> a{0.5, 0.5};
  const CostMatrix zero_diag(2, 2, {0.0, 3.0, 2.0, 0.0});
  CHECK(emd(a, a, zero_diag).cost == ExtendedReal(0.0));

  const std::vector<double> dirac{1.0};
  CHECK(emd(dirac, dirac, CostMatrix(1, 1, {4.25})).cost == ExtendedReal(4.25));

  const std::vector<double> bad{0.5, 0.6};
  CHECK_THROWS_AS(emd(bad, a, zero_diag), Error);
}

TEST_CASE("emd on uniform weights equals assignment / n") {
  Rng rng = make_rng(SeedSpec{32, 0});
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + trial % 4;
    const CostMatrix c = random_costs(rng, n, n);
    const auto w = uniform(n);
    const TransportPlan plan = emd(w, w, c);
    CHECK(plan.cost.value() == doctest::Approx(assignment_solve(c).cost / static_cast<double>(n)).epsilon(1e-12));
    for (std::size_t i = 0; i < n; ++i) {
      double row = 0.0;
      for (std::size_t j = 0; j < n; ++j) row += plan.weight(i, j);
      CHECK(row == doctest::Approx(w[i]).epsilon(1e-12));
    }
  }
}

TEST_CASE("emd with unequal sizes respects both marginals") {
  Rng rng = make_rng(SeedSpec{33, 0});
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 2 + trial % 5, m = 1 + trial % 7;
    const CostMatrix c = random_costs(rng, n, m);
    const TransportPlan plan = emd(uniform(n), uniform(m), c);
    double total = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      double col = 0.0;
      for (std::size_t i = 0; i < n; ++i) col += plan.weight(i, j);
      CHECK(col == doctest::Approx(1.0 / m).epsilon(1e-10));
      total += col;
    }
    CHECK(total == doctest::Approx(1.0));
  }
}

TEST_CASE("emd with infinite entries") {
  const double inf = HUGE_VAL;
  const std::vector<double> w{0.5, 0.5};
  // the finite arcs admit a perfect matching
  const CostMatrix avoidable(2, 2, {inf, 1.0, 2.0, inf});
  const TransportPlan plan = emd(w, w, avoidable);
  CHECK(plan.cost.value() == doctest::Approx(1.5));
  CHECK(plan.weight(0, 0) == 0.0);
  // every feasible plan uses an infinite arc
  const CostMatrix forced(2, 2, {inf, inf, 1.0, 1.0});
  CHECK(emd(w, w, forced).cost.is_infinite());
}

TEST_CASE("empirical transport") {
  const IntensityMeasure unit = IntensityMeasure::lebesgue(Window(0.0, 1.0));
  const SeedSpec seed{34, 0};
  const std::size_t n = 100;
  const auto mu = replicate<Configuration>(n, [&](std::size_t i) { return sample_poisson(unit, seed.substream(i)); });
  CHECK(empirical_transport(mu, mu, Metric::rho1).estimate.mean == 0.0);

  const SeedSpec other = seed.substream(1000);
  const auto nu = replicate<Configuration>(n, [&](std::size_t i) { return sample_poisson(unit, other.substream(i)); });
  const Estimate r0 = estimate_rubinstein_empirical(mu, nu, Metric::rho0);
  CHECK(r0.mean >= 0.0);
  CHECK(r0.mean <= 1.0);
  const Estimate r1 = estimate_rubinstein_empirical(mu, nu, Metric::rho1);
  const Functional count = [](const Configuration& c) { return static_cast<double>(c.size()); };
  const Estimate dual = dual_lower_bound(count, mu, nu);
  // weak duality
  CHECK(std::abs(dual.mean) <= r1.mean + 3.0 * std::hypot(dual.std_error, r1.std_error));

  const DoublingDiagnostic dd = doubling_diagnostic(mu, nu, Metric::rho1);
  CHECK(dd.half.n_samples == n / 2);
  CHECK(dd.full.mean == doctest::Approx(r1.mean));
  CHECK(dual_lower_bound([](const Configuration&) { return 1.0; }, mu, nu).mean == 0.0);
}

TEST_CASE("exact oracle on discrete cells") {
  const std::vector<double> one{1.0}, two{2.0};
  CHECK(exact_oracle_discrete(one, one, 60) == doctest::Approx(0.0).scale(1.0).epsilon(1e-10));
  CHECK(exact_oracle_discrete(one, two, 60) == doctest::Approx(1.0).epsilon(1e-8));
  const std::vector<double> a{1.0, 1.0}, b{2.0, 1.0};
  CHECK(exact_oracle_discrete(a, b, 20) == doctest::Approx(1.0).epsilon(1e-8));
  CHECK_THROWS_AS(exact_oracle_discrete(one, two, 5), Error);
}
