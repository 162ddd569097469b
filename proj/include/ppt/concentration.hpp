#pragma once

// Deviation and isoperimetric estimates for Poisson functionals, with exact
// Poisson references.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ppt/core.hpp"

namespace ppt {

struct TailQuery {
  double mass = 1.0;
  double r = 1.0;
};

/// Smallest positive integer N >= R.
std::uint64_t upper_int_part(double r);

/// P(N >= k) for N ~ Poisson(mass).
double poisson_tail_exact(double mass, std::uint64_t k);
/// P(N = k) for N ~ Poisson(mass); mass 0 is the point mass at 0.
double poisson_pmf(double mass, std::uint64_t k);

/// exp{c (e^lambda - lambda - 1)}.
double laplace_bound_lipschitz(double lambda, double c);

/// exp{r - (r + c) log(1 + r / c)} with c = q.mass.
double tail_bound_lipschitz(const TailQuery& q);

/// ([m + r] / r) exp{[m + r] - m - [m + r] log([m + r] / m)} / sqrt(2 pi [m + r]).
double tail_bound_count_sharp(const TailQuery& q);

/// Deviation bound for rho_eta = rho1(., eta) above its mean.
double tail_bound_rho_eta(double total_mass, double r);

/// P(rho_eta >= E rho_eta + r) exactly. For diffuse sigma, rho_eta equals
/// omega(Λ) + eta(Λ) almost surely, so this is P(N >= [m + r]).
double rho_eta_tail_exact(double total_mass, double r);

struct RhoEtaTailCheck {
  Estimate empirical;  ///< MC frequency of rho_eta >= E rho_eta + r
  double exact = 0.0;
  double bound = 0.0;
  /// Draws in which omega shared an atom with eta (expected 0).
  std::size_t shared_atom_draws = 0;
};

/// Confirms rho_eta = omega(Λ) + eta(Λ) on every draw, then compares the
/// empirical tail with the exact count tail and the bound.
RhoEtaTailCheck rho_eta_tail_check(const IntensityMeasure& sigma, const Configuration& eta, double r,
                                   std::size_t n_samples, const SeedSpec& seed);

/// sqrt(2 pi) N^{N+1/2} e^{-N} and the same times e^{1/(12N)}.
std::pair<double, double> stirling_bounds(std::uint64_t n);

struct TailGridRow {
  double mass = 0.0;
  double r = 0.0;
  double exact = 0.0;
  double bound_lipschitz = 0.0;
  double bound_sharp = 0.0;
};

std::vector<TailGridRow> tail_grid(const std::vector<double>& masses, const std::vector<double>& rs);
/// Header mass,r,exact,bound_lipschitz,bound_sharp; values at 17 significant digits.
std::string tail_grid_csv(const std::vector<TailGridRow>& rows);

// ---------------------------------------------------------------------------
// Isoperimetry

/// Event {omega(K) rel k}, with K the whole window when region is empty.
struct CountEvent {
  enum class Relation { equal, at_most, at_least };
  Relation relation = Relation::equal;
  std::uint64_t threshold = 0;
  std::optional<Window> region;

  bool contains(const Configuration& omega) const;
  Functional indicator() const;
  std::string describe() const;
};

/// Nested Monte Carlo of E ∫ |grad_x 1_A| dsigma.
Estimate surface_measure(const Functional& indicator, const IntensityMeasure& sigma,
                         std::size_t n_samples, const SeedSpec& seed);

/// Exact surface measure and probability of a count event.
double surface_measure_exact(const CountEvent& event, const IntensityMeasure& sigma);
double event_probability_exact(const CountEvent& event, const IntensityMeasure& sigma);

/// 2 mu(∂A) / (mu(A)(1 - mu(A))) from independent MC estimates of mu(A) and
/// mu(∂A), with a delta-method standard error. Throws undefined_input when the
/// estimate of mu(A) is 0 or 1.
Estimate isoperimetric_ratio(const Functional& indicator, const IntensityMeasure& sigma,
                             std::size_t n_samples, const SeedSpec& seed);

/// Exact ratio for a count event; throws undefined_input when mu(A) is 0 or 1.
double isoperimetric_ratio_exact(const CountEvent& event, const IntensityMeasure& sigma);

/// (1, m / (1 - e^{-m})).
std::pair<double, double> isoperimetric_bounds(double total_mass);

struct PoincareCheck {
  Estimate lhs;  ///< E|F - EF|
  Estimate rhs;  ///< 2 E ∫ |grad F| dsigma
  bool holds(double k = 3.0) const;
};

PoincareCheck poincare_l1_check(const Functional& f, const IntensityMeasure& sigma,
                                std::size_t n_samples, const SeedSpec& seed);

struct CoareaCheck {
  Estimate lhs;  ///< E ∫ |grad F| dsigma
  Estimate rhs;  ///< E ∫ Σ_t |grad 1_{F > t}| dsigma over half-integer t
  std::int64_t min_value = 0;
  std::int64_t max_value = 0;
  bool agrees(double k = 3.0) const;
};

/// Both sides from independent substreams. F must be integer valued; an
/// observed range wider than max_levels throws invalid_argument.
CoareaCheck coarea_check(const Functional& f, const IntensityMeasure& sigma, std::size_t n_samples,
                         const SeedSpec& seed, std::size_t max_levels = 10'000);

}  // namespace ppt
