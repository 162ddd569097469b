#pragma once

// Samplers for Poisson, Cox and Gibbs point processes and for the explicit
// couplings between them.

#include <cstddef>
#include <functional>
#include <optional>
#include <span>

#include "ppt/core.hpp"

namespace ppt {

/// Jointly sampled pair of configurations. cost_hint is the realized transport
/// cost of the construction, when it provides one.
struct CoupledPair {
  Configuration left;
  Configuration right;
  std::optional<double> cost_hint;
};

/// One location from sigma / sigma(Λ), by rejection against density_sup.
Point sample_location(const IntensityMeasure& sigma, Rng& rng);

/// N ~ Poisson(sigma(Λ)) then N i.i.d. locations from sigma / sigma(Λ).
Configuration sample_poisson(const IntensityMeasure& sigma, Rng& rng);
Configuration sample_poisson(const IntensityMeasure& sigma, const SeedSpec& seed);

// ---------------------------------------------------------------------------
// Cox

/// Law of the scalar Xi in the random intensity M = Xi * sigma.
class Mixer {
 public:
  enum class Family { degenerate, gamma, lognormal, two_point };

  static Mixer degenerate(double value);
  static Mixer gamma(double shape, double scale);
  static Mixer lognormal(double log_mean, double log_sd);
  /// Xi = low with probability p_low, high otherwise.
  static Mixer two_point(double low, double high, double p_low = 0.5);

  Family family() const noexcept { return family_; }
  double draw(Rng& rng) const;
  double mean() const;
  double variance() const;

 private:
  Mixer(Family family, double a, double b, double c) : family_(family), a_(a), b_(b), c_(c) {}

  Family family_;
  double a_;
  double b_;
  double c_;
};

Configuration sample_cox(const IntensityMeasure& base, const Mixer& mixer, Rng& rng);
Configuration sample_cox(const IntensityMeasure& base, const Mixer& mixer, const SeedSpec& seed);

// ---------------------------------------------------------------------------
// Gibbs

/// Pair potential phi evaluated on the difference x - y.
///
/// V(omega) sums phi over ordered pairs of distinct atoms. With
/// include_diagonal the self-interaction phi(0) of every atom is added as well.
struct PairPotential {
  std::function<double(std::span<const double>)> phi;
  bool include_diagonal = false;

  static PairPotential constant(double c, bool include_diagonal = false);
};

double gibbs_energy(const PairPotential& potential, const Configuration& omega);

/// Unnormalized Gibbs density e^{-V} against the Poisson measure.
Functional gibbs_density(PairPotential potential);

struct GibbsOptions {
  double min_acceptance = 1e-4;
  /// Proposals allowed per draw; 0 means ceil(12 / min_acceptance).
  std::size_t max_proposals = 0;
};

struct GibbsDraw {
  Configuration config;
  /// Bernoulli acceptance over the proposals spent on this draw.
  Estimate acceptance_rate;
  std::size_t proposals = 0;
  /// The first proposal, which is Poisson distributed.
  Configuration first_proposal;
};

/// Exact rejection sampling: propose omega ~ Poisson(sigma), accept with
/// probability e^{-V(omega)}.
GibbsDraw sample_gibbs(const PairPotential& potential, const IntensityMeasure& sigma,
                       const SeedSpec& seed, const GibbsOptions& options = {});

/// Rejection coupling: left is the first Poisson proposal, right the accepted
/// Gibbs configuration (equal to left when the first proposal is accepted).
CoupledPair sample_coupled_gibbs(const PairPotential& potential, const IntensityMeasure& sigma,
                                 const SeedSpec& seed, const GibbsOptions& options = {});

// ---------------------------------------------------------------------------
// Superposition coupling of two Poisson laws

/// Realizes mu_sigma and mu_tau, dtau = p dsigma, as omega0 + omega1 and
/// omega0 + omega2 with independent parts of intensities (p ∧ 1) sigma,
/// sigma - sigma0 and tau - sigma0.
class SuperpositionCoupler {
 public:
  SuperpositionCoupler(const IntensityMeasure& sigma, Density p, double p_sup);

  CoupledPair sample(Rng& rng) const;
  CoupledPair sample(const SeedSpec& seed) const;

  const IntensityMeasure& common() const noexcept { return common_; }
  const IntensityMeasure& left_only() const noexcept { return left_only_; }
  const IntensityMeasure& right_only() const noexcept { return right_only_; }

 private:
  IntensityMeasure common_;
  IntensityMeasure left_only_;
  IntensityMeasure right_only_;
};

CoupledPair sample_coupled_superposition(const IntensityMeasure& sigma, const Density& p,
                                         double p_sup, const SeedSpec& seed);

// ---------------------------------------------------------------------------
// Time change on the half-line

/// Deterministic time change v(t) = t + U(t) on [0, horizon]. The constructor
/// checks U(0) = 0 and U' > -1 on a dense grid.
class TimeChangeSpec {
 public:
  TimeChangeSpec(std::function<double(double)> u, std::function<double(double)> u_prime,
                 double horizon, std::size_t grid_points = 20000);

  /// U(t) = c t / (1 + t^3).
  static TimeChangeSpec rational(double c, double horizon);
  /// U(t) = c t e^{-a t}.
  static TimeChangeSpec damped_linear(double c, double a, double horizon);

  double u(double t) const { return u_(t); }
  double u_prime(double t) const { return u_prime_(t); }
  double horizon() const noexcept { return horizon_; }
  double forward(double t) const { return t + u_(t); }
  /// v^{-1}(r) by bisection to absolute tolerance 1e-12, for r in [0, v(horizon)].
  double inverse(double r) const;
  /// Same spec with U scaled by c (validated again).
  TimeChangeSpec scaled(double c) const;

 private:
  std::function<double(double)> u_;
  std::function<double(double)> u_prime_;
  double horizon_;
};

/// left: atoms t_i = v^{-1}(r_i), a Poisson process of intensity (1 + U') on
/// [0, T]; right: the unit-rate atoms r_i on [0, v(T)]. cost_hint is the
/// identity-pairing cost sqrt(sum U(t_i)^2).
CoupledPair sample_coupled_timechange(const TimeChangeSpec& tc, Rng& rng);
CoupledPair sample_coupled_timechange(const TimeChangeSpec& tc, const SeedSpec& seed);

}  // namespace ppt
