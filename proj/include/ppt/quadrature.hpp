#pragma once

#include <cstddef>
#include <functional>
#include <span>

namespace ppt {

struct QuadratureOptions {
  double rel_tol = 1e-8;
  double abs_tol = 1e-15;
  unsigned max_depth = 30;
  /// Hard cap on integrand evaluations, across all nesting levels.
  std::size_t max_evaluations = 50'000'000;
};

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
  std::size_t evaluations = 0;
};

/// Adaptive Gauss-Kronrod on [a, b]. Throws quadrature_failure with the
/// refinement trace when the error target is missed.
QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           const QuadratureOptions& options = {});

/// Iterated adaptive integration over a box of any dimension.
QuadratureResult integrate_box(const std::function<double(std::span<const double>)>& f,
                               std::span<const double> lower, std::span<const double> upper,
                               const QuadratureOptions& options = {});

}  // namespace ppt
