#pragma once

// Distances between individual configurations.

#include <compare>
#include <cstddef>
#include <string_view>

#include "ppt/core.hpp"

namespace ppt {

/// A value in [0, +inf]. Infinity is a state of its own, never a sentinel.
class ExtendedReal {
 public:
  constexpr ExtendedReal() = default;
  /// Accepts any nonnegative double; +inf maps to infinity().
  ExtendedReal(double v);  // NOLINT(google-explicit-constructor)

  static ExtendedReal infinity() noexcept;

  bool is_infinite() const noexcept { return infinite_; }
  bool is_finite() const noexcept { return !infinite_; }
  /// The value as a double; +inf when infinite.
  double value() const noexcept;
  /// Throws undefined_input when infinite.
  double finite_value() const;

  friend ExtendedReal operator+(ExtendedReal a, ExtendedReal b) noexcept;
  /// Throws undefined_input for inf - inf and for a negative result.
  friend ExtendedReal operator-(ExtendedReal a, ExtendedReal b);
  /// Scaling by c >= 0 with the convention inf * 0 = 0.
  friend ExtendedReal operator*(double c, ExtendedReal a);
  friend ExtendedReal operator*(ExtendedReal a, double c) { return c * a; }

  friend bool operator==(ExtendedReal a, ExtendedReal b) noexcept;
  friend std::partial_ordering operator<=>(ExtendedReal a, ExtendedReal b) noexcept;

 private:
  double v_ = 0.0;
  bool infinite_ = false;
};

enum class Metric { rho0, rho1, rho2 };

std::string_view to_string(Metric m) noexcept;
/// Accepts "rho0", "rho1", "rho2".
Metric metric_from_string(std::string_view name);

/// 0 when the two configurations are equal as multisets, else 1.
int rho0(const Configuration& omega, const Configuration& eta);

/// Atoms unmatched in either direction.
std::size_t rho1(const Configuration& omega, const Configuration& eta);

/// Square root of the minimal sum of squared Euclidean gaps over bijections;
/// infinite when the counts differ.
ExtendedReal rho2(const Configuration& omega, const Configuration& eta);

/// Total variation between omega / omega(Λ) and eta / eta(Λ).
/// Throws undefined_input if either configuration is empty.
double rho1_normalized(const Configuration& omega, const Configuration& eta);

/// rho2 / omega(Λ) for equal nonzero counts, |omega(Λ) - eta(Λ)| otherwise.
double rho2_normalized(const Configuration& omega, const Configuration& eta);

/// rho2 on marked configurations: coordinate 0 is the time mark, the rest the
/// spatial location, so the ground cost is |t - s|^2 + |x - y|^2.
ExtendedReal rho2_marked(const Configuration& omega, const Configuration& eta);

ExtendedReal distance(Metric m, const Configuration& omega, const Configuration& eta);

}  // namespace ppt
