#include "ppt/concentration.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

#include <boost/math/special_functions/gamma.hpp>

#include "ppt/metrics.hpp"
#include "ppt/parallel.hpp"
#include "ppt/simulate.hpp"

namespace ppt {
namespace {

void check_query(double mass, double r) {
  if (!(mass > 0.0) || !std::isfinite(mass) || !(r > 0.0) || !std::isfinite(r)) {
    throw Error(ErrorKind::invalid_argument, "tail query needs finite mass > 0 and r > 0");
  }
}

double region_mass(const CountEvent& event, const IntensityMeasure& sigma) {
  return event.region ? sigma.mass_in(*event.region) : sigma.total_mass();
}

Estimate scaled(Estimate e, double c) {
  e.mean *= c;
  e.std_error *= std::abs(c);
  return e;
}

}  // namespace

std::uint64_t upper_int_part(double r) {
  if (!(r > 0.0) || !(r < 9.0e15)) {
    throw Error(ErrorKind::invalid_argument, "upper integer part needs 0 < R < 9e15");
  }
  return std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::ceil(r)));
}

double poisson_pmf(double mass, std::uint64_t k) {
  if (!(mass >= 0.0) || !std::isfinite(mass)) {
    throw Error(ErrorKind::invalid_argument, "Poisson mass must be finite and >= 0");
  }
  if (mass == 0.0) return k == 0 ? 1.0 : 0.0;
  return boost::math::gamma_p_derivative(static_cast<double>(k) + 1.0, mass);
}

double poisson_tail_exact(double mass, std::uint64_t k) {
  if (!(mass >= 0.0) || !std::isfinite(mass)) {
    throw Error(ErrorKind::invalid_argument, "Poisson mass must be finite and >= 0");
  }
  if (k == 0) return 1.0;
  if (mass == 0.0) return 0.0;
  // P(N >= k) = P(k, mass), the regularized lower incomplete gamma function.
  return boost::math::gamma_p(static_cast<double>(k), mass);
}

double laplace_bound_lipschitz(double lambda, double c) {
  if (!(lambda > 0.0) || !(c > 0.0) || !std::isfinite(lambda) || !std::isfinite(c)) {
    throw Error(ErrorKind::invalid_argument, "Laplace bound needs lambda > 0 and c > 0");
  }
  return std::exp(c * (std::expm1(lambda) - lambda));
}

double tail_bound_lipschitz(const TailQuery& q) {
  check_query(q.mass, q.r);
  return std::exp(q.r - (q.r + q.mass) * std::log1p(q.r / q.mass));
}

double tail_bound_count_sharp(const TailQuery& q) {
  check_query(q.mass, q.r);
  const double big = static_cast<double>(upper_int_part(q.mass + q.r));
  const double log_value = std::log(big / q.r) + big - q.mass - big * std::log(big / q.mass) -
                           0.5 * std::log(2.0 * std::numbers::pi * big);
  return std::exp(log_value);
}

double tail_bound_rho_eta(double total_mass, double r) {
  check_query(total_mass, r);
  const double s = total_mass;
  const double a = static_cast<double>(upper_int_part(s));
  const double b = static_cast<double>(upper_int_part(s + r));
  const double two_pi = 2.0 * std::numbers::pi;
  const double log_prefactor = 0.5 * std::log(two_pi * a) + a * std::log(a) + 1.0 / (12.0 * a) -
                               s * std::log(s);
  const double log_tail = b - a - b * std::log(b / (b - r)) - 0.5 * std::log(two_pi * b);
  return std::exp(log_prefactor + log_tail);
}

double rho_eta_tail_exact(double total_mass, double r) {
  check_query(total_mass, r);
  return poisson_tail_exact(total_mass, upper_int_part(total_mass + r));
}

RhoEtaTailCheck rho_eta_tail_check(const IntensityMeasure& sigma, const Configuration& eta, double r,
                                   std::size_t n_samples, const SeedSpec& seed) {
  const double m = sigma.total_mass();
  check_query(m, r);
  if (n_samples == 0) throw Error(ErrorKind::invalid_argument, "rho_eta check needs n_samples > 0");
  const double mean = m + static_cast<double>(eta.size());
  std::vector<char> shared(n_samples, 0);
  const auto hits = replicate<double>(n_samples, [&](std::size_t i) {
    const Configuration omega = sample_poisson(sigma, seed.substream(i));
    const auto dist = static_cast<double>(rho1(omega, eta));
    if (dist != static_cast<double>(omega.size() + eta.size())) shared[i] = 1;
    return dist >= mean + r ? 1.0 : 0.0;
  });
  RhoEtaTailCheck out;
  out.empirical = estimate_from(hits, seed);
  out.exact = rho_eta_tail_exact(m, r);
  out.bound = tail_bound_rho_eta(m, r);
  out.shared_atom_draws = static_cast<std::size_t>(std::count(shared.begin(), shared.end(), 1));
  return out;
}

std::pair<double, double> stirling_bounds(std::uint64_t n) {
  if (n == 0) throw Error(ErrorKind::invalid_argument, "Stirling bounds need N >= 1");
  const double x = static_cast<double>(n);
  const double log_lower = 0.5 * std::log(2.0 * std::numbers::pi) + (x + 0.5) * std::log(x) - x;
  return {std::exp(log_lower), std::exp(log_lower + 1.0 / (12.0 * x))};
}

std::vector<TailGridRow> tail_grid(const std::vector<double>& masses, const std::vector<double>& rs) {
  std::vector<TailGridRow> rows;
  rows.reserve(masses.size() * rs.size());
  for (double m : masses) {
    for (double r : rs) {
      TailQuery q{m, r};
      rows.push_back({m, r, poisson_tail_exact(m, upper_int_part(m + r)), tail_bound_lipschitz(q),
                      tail_bound_count_sharp(q)});
    }
  }
  return rows;
}

std::string tail_grid_csv(const std::vector<TailGridRow>& rows) {
  std::string out = "mass,r,exact,bound_lipschitz,bound_sharp\r\n";
  char buf[160];
  for (const auto& row : rows) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g\r\n", row.mass, row.r, row.exact,
                  row.bound_lipschitz, row.bound_sharp);
    out += buf;
  }
  return out;
}

// ---------------------------------------------------------------------------

bool CountEvent::contains(const Configuration& omega) const {
  const std::size_t n = region ? omega.count_in(*region) : omega.size();
  switch (relation) {
    case Relation::equal: return n == threshold;
    case Relation::at_most: return n <= threshold;
    case Relation::at_least: return n >= threshold;
  }
  return false;
}

Functional CountEvent::indicator() const {
  return [event = *this](const Configuration& omega) { return event.contains(omega) ? 1.0 : 0.0; };
}

std::string CountEvent::describe() const {
  std::ostringstream out;
  out << (region ? "omega(K)" : "omega(Λ)");
  switch (relation) {
    case Relation::equal: out << " = "; break;
    case Relation::at_most: out << " <= "; break;
    case Relation::at_least: out << " >= "; break;
  }
  out << threshold;
  return out.str();
}

Estimate surface_measure(const Functional& indicator, const IntensityMeasure& sigma,
                         std::size_t n_samples, const SeedSpec& seed) {
  return gradient_mass(indicator, sigma, n_samples, seed);
}

double surface_measure_exact(const CountEvent& event, const IntensityMeasure& sigma) {
  const double m = region_mass(event, sigma);
  const std::uint64_t k = event.threshold;
  switch (event.relation) {
    case CountEvent::Relation::at_most: return m * poisson_pmf(m, k);
    case CountEvent::Relation::at_least: return k == 0 ? 0.0 : m * poisson_pmf(m, k - 1);
    case CountEvent::Relation::equal:
      return m * (poisson_pmf(m, k) + (k > 0 ? poisson_pmf(m, k - 1) : 0.0));
  }
  return 0.0;
}

double event_probability_exact(const CountEvent& event, const IntensityMeasure& sigma) {
  const double m = region_mass(event, sigma);
  const std::uint64_t k = event.threshold;
  switch (event.relation) {
    case CountEvent::Relation::equal: return poisson_pmf(m, k);
    case CountEvent::Relation::at_least: return poisson_tail_exact(m, k);
    case CountEvent::Relation::at_most: return 1.0 - poisson_tail_exact(m, k + 1);
  }
  return 0.0;
}

Estimate isoperimetric_ratio(const Functional& indicator, const IntensityMeasure& sigma,
                             std::size_t n_samples, const SeedSpec& seed) {
  if (n_samples == 0) throw Error(ErrorKind::invalid_argument, "isoperimetric ratio needs n_samples > 0");
  const SeedSpec prob_seed = seed.substream(0);
  const auto hits = replicate<double>(n_samples, [&](std::size_t i) {
    return indicator(sample_poisson(sigma, prob_seed.substream(i)));
  });
  const Estimate p = estimate_from(hits, prob_seed);
  if (p.mean <= 0.0 || p.mean >= 1.0) {
    throw Error(ErrorKind::undefined_input,
                "estimated mu(A) = " + std::to_string(p.mean) + " is degenerate; the ratio is undefined");
  }
  const Estimate s = gradient_mass(indicator, sigma, n_samples, seed.substream(1));
  const double q = p.mean * (1.0 - p.mean);
  const double ratio = 2.0 * s.mean / q;
  const double d_s = 2.0 / q;
  const double d_p = -2.0 * s.mean * (1.0 - 2.0 * p.mean) / (q * q);
  const double se = std::hypot(d_s * s.std_error, d_p * p.std_error);
  return Estimate{ratio, se, n_samples, seed};
}

double isoperimetric_ratio_exact(const CountEvent& event, const IntensityMeasure& sigma) {
  const double p = event_probability_exact(event, sigma);
  if (p <= 0.0 || p >= 1.0) {
    throw Error(ErrorKind::undefined_input, "mu(A) is 0 or 1 for " + event.describe());
  }
  return 2.0 * surface_measure_exact(event, sigma) / (p * (1.0 - p));
}

std::pair<double, double> isoperimetric_bounds(double total_mass) {
  if (!(total_mass > 0.0) || !std::isfinite(total_mass)) {
    throw Error(ErrorKind::invalid_argument, "isoperimetric bounds need a finite positive mass");
  }
  return {1.0, total_mass / -std::expm1(-total_mass)};
}

bool PoincareCheck::holds(double k) const {
  return lhs.mean <= rhs.mean + k * std::hypot(lhs.std_error, rhs.std_error);
}

PoincareCheck poincare_l1_check(const Functional& f, const IntensityMeasure& sigma,
                                std::size_t n_samples, const SeedSpec& seed) {
  if (n_samples == 0) throw Error(ErrorKind::invalid_argument, "Poincaré check needs n_samples > 0");
  const SeedSpec value_seed = seed.substream(0);
  auto values = replicate<double>(n_samples, [&](std::size_t i) {
    return f(sample_poisson(sigma, value_seed.substream(i)));
  });
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(n_samples);
  for (double& v : values) v = std::abs(v - mean);
  PoincareCheck out;
  out.lhs = estimate_from(values, value_seed);
  out.rhs = scaled(gradient_mass(f, sigma, n_samples, seed.substream(1)), 2.0);
  return out;
}

bool CoareaCheck::agrees(double k) const {
  return std::abs(lhs.mean - rhs.mean) <= k * std::hypot(lhs.std_error, rhs.std_error) + 1e-12;
}

CoareaCheck coarea_check(const Functional& f, const IntensityMeasure& sigma, std::size_t n_samples,
                         const SeedSpec& seed, std::size_t max_levels) {
  if (n_samples == 0) throw Error(ErrorKind::invalid_argument, "co-area check needs n_samples > 0");
  constexpr std::size_t inner = 8;
  CoareaCheck out;
  out.lhs = gradient_mass(f, sigma, n_samples, seed.substream(0), inner);

  auto as_integer = [](double v) {
    const double r = std::round(v);
    if (!std::isfinite(v) || std::abs(v - r) > 1e-9) {
      throw Error(ErrorKind::invalid_argument, "co-area check needs an integer-valued functional");
    }
    return static_cast<std::int64_t>(r);
  };

  // Values F(omega) followed by F(omega + x_j) for each replicate.
  const double mass = sigma.total_mass();
  const SeedSpec outer_seed = seed.substream(1).substream(0);
  const SeedSpec inner_seed = seed.substream(1).substream(1);
  const auto samples = replicate<std::vector<std::int64_t>>(n_samples, [&](std::size_t i) {
    std::vector<std::int64_t> v;
    if (mass == 0.0) return v;
    Rng outer = make_rng(outer_seed.substream(i));
    Rng locations = make_rng(inner_seed.substream(i));
    const Configuration omega = sample_poisson(sigma, outer);
    v.push_back(as_integer(f(omega)));
    for (std::size_t j = 0; j < inner; ++j) {
      v.push_back(as_integer(f(omega.plus(sample_location(sigma, locations).coords()))));
    }
    return v;
  });

  bool any = false;
  for (const auto& v : samples) {
    for (std::int64_t x : v) {
      out.min_value = any ? std::min(out.min_value, x) : x;
      out.max_value = any ? std::max(out.max_value, x) : x;
      any = true;
    }
  }
  if (any && static_cast<std::uint64_t>(out.max_value - out.min_value) > max_levels) {
    throw Error(ErrorKind::invalid_argument,
                "observed range [" + std::to_string(out.min_value) + ", " +
                    std::to_string(out.max_value) + "] exceeds " + std::to_string(max_levels) + " levels");
  }

  std::vector<double> values(n_samples, 0.0);
  for (std::size_t i = 0; i < n_samples; ++i) {
    const auto& v = samples[i];
    if (v.empty()) continue;
    double acc = 0.0;
    for (std::size_t j = 1; j < v.size(); ++j) {
      for (std::int64_t level = out.min_value; level < out.max_value; ++level) {
        const double t = static_cast<double>(level) + 0.5;
        const bool before = static_cast<double>(v[0]) > t;
        const bool after = static_cast<double>(v[j]) > t;
        acc += before != after ? 1.0 : 0.0;
      }
    }
    values[i] = mass * acc / static_cast<double>(inner);
  }
  out.rhs = estimate_from(values, seed.substream(1));
  return out;
}

}  // namespace ppt
