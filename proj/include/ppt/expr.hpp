#pragma once

// Scalar function expressions used by the command-line front end:
//
//   const:c              c
//   poly:c0,c1,...       c0 + c1 x + c2 x^2 + ...
//   exp:a,b              a e^{b x}
//   step:t,lo,hi         lo for x < t, hi otherwise
//
// As a density the argument x is the first coordinate of the location; as a
// pair potential it is the Euclidean norm of the difference.

#include <string>
#include <string_view>
#include <vector>

#include "ppt/core.hpp"
#include "ppt/simulate.hpp"

namespace ppt {

class Expression {
 public:
  enum class Kind { constant, polynomial, exponential, step };

  Kind kind() const noexcept { return kind_; }
  const std::vector<double>& params() const noexcept { return params_; }
  const std::string& text() const noexcept { return text_; }

  double operator()(double x) const;

  /// An upper bound on the expression over [lo, hi], tight up to a small
  /// Lipschitz margin for polynomials.
  double sup_over(double lo, double hi) const;
  /// Smallest value on a dense grid of [lo, hi] (and at the endpoints).
  double grid_min_over(double lo, double hi) const;

  Density as_density() const;
  PairPotential as_potential(bool include_diagonal = false) const;

 private:
  friend Expression parse_density_expr(std::string_view text);
  Kind kind_ = Kind::constant;
  std::vector<double> params_;
  std::string text_;
};

/// Throws a parse error naming the 0-based character position.
Expression parse_density_expr(std::string_view text);

/// Intensity with the given density on the window, validated nonnegative on a
/// grid, with density_sup derived from the expression.
IntensityMeasure make_intensity(const Expression& density, const Window& window);

/// Time change from "rational:c" (U = c t / (1 + t^3)) or "damped:c,a"
/// (U = c t e^{-a t}).
TimeChangeSpec parse_time_change(std::string_view text, double horizon);

}  // namespace ppt
