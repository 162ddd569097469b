#pragma once

// Upper bounds on Rubinstein distances between a Poisson law and its
// perturbations: Poisson, Cox, Gibbs, time change, and the general gradient bound.

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ppt/core.hpp"
#include "ppt/simulate.hpp"

namespace ppt {

enum class BoundMethod { closed_form, quadrature, monte_carlo };

std::string_view to_string(BoundMethod m) noexcept;

struct BoundResult {
  /// Nonnegative; may be +inf.
  double value = 0.0;
  BoundMethod method = BoundMethod::closed_form;
  double std_error = 0.0;
  std::size_t n_samples = 0;
  SeedSpec seed{};
  /// Hex FNV-1a digest of the method, inputs, sample count and seed.
  std::string inputs_digest;
  std::vector<std::string> notes;
  /// Estimate of what lies beyond a truncated integration range, when relevant.
  std::optional<double> truncation_estimate;
};

/// ∫ |p - 1| dsigma.
BoundResult bound_tv_poisson(const Density& p, const IntensityMeasure& sigma);

/// E|Xi - 1| sigma(Λ) by Monte Carlo over the mixer.
BoundResult bound_tv_cox(const IntensityMeasure& base, const Mixer& mixer, std::size_t n_samples,
                         const SeedSpec& seed);

/// 2 ∫∫ phi(x - y) dsigma(x) dsigma(y), plus phi(0) sigma(Λ) when the potential
/// counts self-interaction.
BoundResult bound_tv_gibbs(const PairPotential& potential, const IntensityMeasure& sigma);

/// ||U||_{L^2[0, T]}. truncation_estimate is ∫_T^{2T} U^2, a proxy for the
/// squared norm left out beyond the horizon.
BoundResult bound_w2_halfline(const TimeChangeSpec& tc);

/// E ∫ |L(omega + x) - L(omega)| dsigma(x) by nested Monte Carlo. A separate
/// substream checks E L = 1; a failure at 4 standard errors adds a warning note.
BoundResult bound_tv_general(const Functional& density, const IntensityMeasure& sigma,
                             std::size_t n_samples, const SeedSpec& seed, std::size_t inner = 8);

/// One mark z with its own time change U_z and mark weight sigma({z}).
struct MarkedTimeChange {
  TimeChangeSpec tc;
  double weight = 1.0;
};

/// Square root of Σ_z w_z ∫ U_z^2 (1 + U_z') dt, after checking it against
/// Σ_z w_z ∫ (r - v_z^{-1}(r))^2 dr to 1e-6 relative.
BoundResult bound_w2_timechange(const std::vector<MarkedTimeChange>& marks);
BoundResult bound_w2_timechange(const TimeChangeSpec& tc);

}  // namespace ppt
