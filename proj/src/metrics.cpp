#include "ppt/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "ppt/transport.hpp"

namespace ppt {

ExtendedReal::ExtendedReal(double v) {
  if (std::isnan(v) || v < 0.0) {
    throw Error(ErrorKind::invalid_argument, "extended real must be >= 0, got " + std::to_string(v));
  }
  if (std::isinf(v)) {
    infinite_ = true;
  } else {
    v_ = v;
  }
}

ExtendedReal ExtendedReal::infinity() noexcept {
  ExtendedReal r;
  r.infinite_ = true;
  return r;
}

double ExtendedReal::value() const noexcept {
  return infinite_ ? std::numeric_limits<double>::infinity() : v_;
}

double ExtendedReal::finite_value() const {
  if (infinite_) throw Error(ErrorKind::undefined_input, "value is +infinity");
  return v_;
}

ExtendedReal operator+(ExtendedReal a, ExtendedReal b) noexcept {
  if (a.infinite_ || b.infinite_) return ExtendedReal::infinity();
  ExtendedReal r;
  r.v_ = a.v_ + b.v_;
  r.infinite_ = std::isinf(r.v_);
  if (r.infinite_) r.v_ = 0.0;
  return r;
}

ExtendedReal operator-(ExtendedReal a, ExtendedReal b) {
  if (a.infinite_ && b.infinite_) throw Error(ErrorKind::undefined_input, "inf - inf is undefined");
  if (a.infinite_) return a;
  if (b.infinite_ || b.v_ > a.v_) {
    throw Error(ErrorKind::undefined_input, "difference would be negative");
  }
  return ExtendedReal(a.v_ - b.v_);
}

ExtendedReal operator*(double c, ExtendedReal a) {
  if (std::isnan(c) || c < 0.0) throw Error(ErrorKind::invalid_argument, "scale must be >= 0");
  if (c == 0.0) return ExtendedReal{};
  if (a.infinite_) return a;
  return ExtendedReal(c * a.v_);
}

bool operator==(ExtendedReal a, ExtendedReal b) noexcept {
  return a.infinite_ == b.infinite_ && a.v_ == b.v_;
}

std::partial_ordering operator<=>(ExtendedReal a, ExtendedReal b) noexcept {
  return a.value() <=> b.value();
}

// ---------------------------------------------------------------------------

std::string_view to_string(Metric m) noexcept {
  switch (m) {
    case Metric::rho0: return "rho0";
    case Metric::rho1: return "rho1";
    case Metric::rho2: return "rho2";
  }
  return "?";
}

Metric metric_from_string(std::string_view name) {
  if (name == "rho0") return Metric::rho0;
  if (name == "rho1") return Metric::rho1;
  if (name == "rho2") return Metric::rho2;
  throw Error(ErrorKind::invalid_argument, "unknown metric '" + std::string(name) + "'");
}

int rho0(const Configuration& omega, const Configuration& eta) {
  return multiset_equal(omega, eta) ? 0 : 1;
}

std::size_t rho1(const Configuration& omega, const Configuration& eta) {
  return sym_diff_count(omega, eta) + sym_diff_count(eta, omega);
}

ExtendedReal rho2(const Configuration& omega, const Configuration& eta) {
  if (omega.dim() != eta.dim()) {
    throw Error(ErrorKind::invalid_argument, "rho2 needs configurations of equal dimension");
  }
  const std::size_t n = omega.size();
  if (n != eta.size()) return ExtendedReal::infinity();
  if (n == 0) return ExtendedReal{};
  CostMatrix cost(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto x = omega.atom(i);
    for (std::size_t j = 0; j < n; ++j) {
      const auto y = eta.atom(j);
      double s = 0.0;
      for (std::size_t k = 0; k < x.size(); ++k) s += (x[k] - y[k]) * (x[k] - y[k]);
      cost.set(i, j, s);
    }
  }
  return ExtendedReal(std::sqrt(assignment_solve(cost).cost));
}

double rho1_normalized(const Configuration& omega, const Configuration& eta) {
  if (omega.dim() != eta.dim()) {
    throw Error(ErrorKind::invalid_argument, "configurations of different dimension");
  }
  if (omega.empty() || eta.empty()) {
    throw Error(ErrorKind::undefined_input, "normalized total variation needs nonempty configurations");
  }
  const auto lhs = omega.sorted_order();
  const auto rhs = eta.sorted_order();
  const double wa = 1.0 / static_cast<double>(omega.size());
  const double wb = 1.0 / static_cast<double>(eta.size());
  auto same = [](std::span<const double> a, std::span<const double> b) {
    return std::equal(a.begin(), a.end(), b.begin(), b.end());
  };
  auto less = [](std::span<const double> a, std::span<const double> b) {
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
  };

  // Walk the distinct atoms of both sides in lexicographic order, comparing
  // their normalized masses.
  double total = 0.0;
  std::size_t i = 0, j = 0;
  while (i < lhs.size() || j < rhs.size()) {
    std::span<const double> x;
    if (j == rhs.size() || (i < lhs.size() && !less(eta.atom(rhs[j]), omega.atom(lhs[i])))) {
      x = omega.atom(lhs[i]);
    } else {
      x = eta.atom(rhs[j]);
    }
    std::size_t ka = 0, kb = 0;
    while (i < lhs.size() && same(omega.atom(lhs[i]), x)) ++ka, ++i;
    while (j < rhs.size() && same(eta.atom(rhs[j]), x)) ++kb, ++j;
    total += std::abs(static_cast<double>(ka) * wa - static_cast<double>(kb) * wb);
  }
  return total;
}

double rho2_normalized(const Configuration& omega, const Configuration& eta) {
  const std::size_t n = omega.size();
  const std::size_t m = eta.size();
  if (n == m && n > 0) return rho2(omega, eta).finite_value() / static_cast<double>(n);
  return std::abs(static_cast<double>(n) - static_cast<double>(m));
}

ExtendedReal rho2_marked(const Configuration& omega, const Configuration& eta) {
  if (omega.dim() < 2 || eta.dim() < 2) {
    throw Error(ErrorKind::invalid_argument,
                "marked configurations need dimension >= 2 (time mark plus location)");
  }
  return rho2(omega, eta);
}

ExtendedReal distance(Metric m, const Configuration& omega, const Configuration& eta) {
  switch (m) {
    case Metric::rho0: return ExtendedReal(static_cast<double>(rho0(omega, eta)));
    case Metric::rho1: return ExtendedReal(static_cast<double>(rho1(omega, eta)));
    case Metric::rho2: return rho2(omega, eta);
  }
  throw Error(ErrorKind::internal_consistency, "unhandled metric");
}

}  // namespace ppt
