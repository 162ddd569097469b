#include "ppt/quadrature.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <sstream>
#include <vector>

#include "ppt/error.hpp"

namespace ppt {
namespace {

using Kronrod = boost::math::quadrature::gauss_kronrod<double, 15>;

struct Budget {
  std::size_t used = 0;
  std::size_t limit = 0;
};

QuadratureResult integrate_with_budget(const std::function<double(double)>& f, double a, double b,
                                       const QuadratureOptions& options, Budget& budget,
                                       unsigned level) {
  if (a == b) return {};
  double error = 0.0;
  double l1 = 0.0;
  const auto counted = [&](double x) {
    if (++budget.used > budget.limit) {
      std::ostringstream msg;
      msg << "evaluation budget of " << budget.limit << " exhausted at nesting level " << level
          << " on [" << a << ", " << b << "]";
      throw Error(ErrorKind::quadrature_failure, msg.str());
    }
    return f(x);
  };
  // One non-adaptive pass first: an integrand whose L1 norm is below abs_tol
  // would otherwise be bisected to max_depth chasing a relative tolerance.
  double value = Kronrod::integrate(counted, a, b, 0, options.rel_tol, &error, &l1);
  if (l1 + error > options.abs_tol) {
    value = Kronrod::integrate(counted, a, b, options.max_depth, options.rel_tol, &error, &l1);
  }
  if (!std::isfinite(value)) {
    throw Error(ErrorKind::quadrature_failure, "non-finite integrand on [" + std::to_string(a) +
                                                   ", " + std::to_string(b) + "]");
  }
  const double target = std::max({options.rel_tol * std::abs(value), options.rel_tol * l1 * 1e-2,
                                  options.abs_tol});
  if (error > target) {
    std::ostringstream msg;
    msg.precision(6);
    msg << "refinement trace: level " << level << ", interval [" << a << ", " << b
        << "], max depth " << options.max_depth << ", estimate " << value << ", error " << error
        << " > target " << target << ", evaluations " << budget.used;
    throw Error(ErrorKind::quadrature_failure, msg.str());
  }
  return {value, error, budget.used};
}

}  // namespace

QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           const QuadratureOptions& options) {
  Budget budget{0, options.max_evaluations};
  auto result = integrate_with_budget(f, a, b, options, budget, 0);
  result.evaluations = budget.used;
  return result;
}

QuadratureResult integrate_box(const std::function<double(std::span<const double>)>& f,
                               std::span<const double> lower, std::span<const double> upper,
                               const QuadratureOptions& options) {
  const std::size_t dim = lower.size();
  if (dim == 0 || upper.size() != dim) {
    throw Error(ErrorKind::invalid_argument, "integrate_box: bounds must share a positive dimension");
  }
  if (dim == 1) {
    return integrate([&](double t) { return f(std::span<const double>(&t, 1)); }, lower[0],
                     upper[0], options);
  }
  Budget budget{0, options.max_evaluations};
  std::vector<double> x(dim, 0.0);
  // Worst relative error seen at any inner level; inner results are not
  // checked individually, the total is checked once at the outermost level.
  double worst_inner_rel = 0.0;
  double total_error = 0.0;

  QuadratureOptions inner = options;
  inner.rel_tol = options.rel_tol * 0.1;
  inner.abs_tol = options.abs_tol * 0.1;

  std::function<double(std::size_t)> level = [&](std::size_t k) -> double {
    double error = 0.0;
    double l1 = 0.0;
    double value = 0.0;
    const auto integrand = [&](double t) {
      if (++budget.used > budget.limit) {
        throw Error(ErrorKind::quadrature_failure,
                    "evaluation budget of " + std::to_string(budget.limit) +
                        " exhausted at nesting level " + std::to_string(k));
      }
      x[k] = t;
      return k + 1 == dim ? f(x) : level(k + 1);
    };
    const QuadratureOptions& here = k == 0 ? options : inner;
    value = Kronrod::integrate(integrand, lower[k], upper[k], 0, here.rel_tol, &error, &l1);
    if (l1 + error > here.abs_tol) {
      value = Kronrod::integrate(integrand, lower[k], upper[k], options.max_depth, here.rel_tol,
                                 &error, &l1);
    }
    if (!std::isfinite(value)) {
      throw Error(ErrorKind::quadrature_failure, "non-finite integrand at nesting level " +
                                                     std::to_string(k));
    }
    if (k > 0) {
      const double scale = std::max(std::abs(value), l1);
      if (scale > 0.0) worst_inner_rel = std::max(worst_inner_rel, error / scale);
    } else {
      const double propagated = error + worst_inner_rel * l1;
      const double target = std::max(options.rel_tol * std::abs(value), options.abs_tol);
      if (propagated > target) {
        std::ostringstream msg;
        msg.precision(6);
        msg << "refinement trace: dimension " << dim << ", outer error " << error
            << ", worst inner relative error " << worst_inner_rel << ", estimate " << value
            << ", target " << target << ", evaluations " << budget.used;
        throw Error(ErrorKind::quadrature_failure, msg.str());
      }
      total_error = propagated;
    }
    return value;
  };

  const double value = level(0);
  return {value, total_error, budget.used};
}

}  // namespace ppt
