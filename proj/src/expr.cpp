#include "ppt/expr.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <string>

namespace ppt {
namespace {

constexpr int kGridPoints = 4097;

[[noreturn]] void parse_fail(std::string_view text, std::size_t pos, const std::string& what) {
  throw Error(ErrorKind::parse, what + " at position " + std::to_string(pos) + " in '" +
                                    std::string(text) + "'");
}

// Comma-separated numbers starting at `pos`.
std::vector<double> parse_numbers(std::string_view text, std::size_t pos) {
  std::vector<double> out;
  while (true) {
    if (pos >= text.size()) parse_fail(text, pos, "expected a number");
    double v = 0.0;
    const char* first = text.data() + pos;
    const char* last = text.data() + text.size();
    if (*first == '+') ++first;  // from_chars rejects a leading '+'
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc{} || ptr == first) parse_fail(text, pos, "expected a number");
    if (!std::isfinite(v)) parse_fail(text, pos, "number is not finite");
    out.push_back(v);
    pos = static_cast<std::size_t>(ptr - text.data());
    if (pos == text.size()) return out;
    if (text[pos] != ',') parse_fail(text, pos, "expected ',' or end of expression");
    ++pos;
  }
}

void expect_count(std::string_view text, std::size_t pos, const std::vector<double>& params,
                  std::size_t count, const char* name) {
  if (params.size() != count) {
    parse_fail(text, pos, std::string(name) + " takes " + std::to_string(count) + " parameter(s), got " +
                              std::to_string(params.size()));
  }
}

}  // namespace

Expression parse_density_expr(std::string_view text) {
  const std::size_t colon = text.find(':');
  if (colon == std::string_view::npos) parse_fail(text, text.size(), "expected ':' after the function name");
  const std::string_view name = text.substr(0, colon);
  Expression e;
  e.text_ = std::string(text);
  e.params_ = parse_numbers(text, colon + 1);
  if (name == "const") {
    e.kind_ = Expression::Kind::constant;
    expect_count(text, colon + 1, e.params_, 1, "const");
  } else if (name == "poly") {
    e.kind_ = Expression::Kind::polynomial;
  } else if (name == "exp") {
    e.kind_ = Expression::Kind::exponential;
    expect_count(text, colon + 1, e.params_, 2, "exp");
  } else if (name == "step") {
    e.kind_ = Expression::Kind::step;
    expect_count(text, colon + 1, e.params_, 3, "step");
  } else {
    parse_fail(text, 0, "unknown function '" + std::string(name) + "' (const, poly, exp, step)");
  }
  return e;
}

double Expression::operator()(double x) const {
  switch (kind_) {
    case Kind::constant: return params_[0];
    case Kind::polynomial: {
      double acc = 0.0;
      for (auto it = params_.rbegin(); it != params_.rend(); ++it) acc = acc * x + *it;
      return acc;
    }
    case Kind::exponential: return params_[0] * std::exp(params_[1] * x);
    case Kind::step: return x < params_[0] ? params_[1] : params_[2];
  }
  return 0.0;
}

double Expression::sup_over(double lo, double hi) const {
  switch (kind_) {
    case Kind::constant: return params_[0];
    case Kind::exponential: return std::max((*this)(lo), (*this)(hi));
    case Kind::step: {
      double s = -HUGE_VAL;
      if (lo < params_[0]) s = std::max(s, params_[1]);
      if (hi >= params_[0]) s = std::max(s, params_[2]);
      return s;
    }
    case Kind::polynomial: {
      // Grid maximum plus half a grid step times a bound on |p'|.
      const double reach = std::max(std::abs(lo), std::abs(hi));
      double slope = 0.0;
      for (std::size_t k = 1; k < params_.size(); ++k) {
        slope += static_cast<double>(k) * std::abs(params_[k]) * std::pow(reach, static_cast<double>(k - 1));
      }
      const double h = (hi - lo) / (kGridPoints - 1);
      double best = -HUGE_VAL;
      for (int i = 0; i < kGridPoints; ++i) best = std::max(best, (*this)(lo + h * i));
      return best + 0.5 * h * slope;
    }
  }
  return 0.0;
}

double Expression::grid_min_over(double lo, double hi) const {
  const double h = (hi - lo) / (kGridPoints - 1);
  double best = HUGE_VAL;
  for (int i = 0; i < kGridPoints; ++i) best = std::min(best, (*this)(lo + h * i));
  if (kind_ == Kind::step && lo < params_[0] && params_[0] <= hi) {
    best = std::min({best, params_[1], params_[2]});
  }
  return best;
}

Density Expression::as_density() const {
  return [e = *this](std::span<const double> x) { return e(x[0]); };
}

PairPotential Expression::as_potential(bool include_diagonal) const {
  return PairPotential{[e = *this](std::span<const double> d) {
                         double s = 0.0;
                         for (double v : d) s += v * v;
                         return e(std::sqrt(s));
                       },
                       include_diagonal};
}

IntensityMeasure make_intensity(const Expression& density, const Window& window) {
  const double lo = window.lower()[0];
  const double hi = window.upper()[0];
  if (density.grid_min_over(lo, hi) < 0.0) {
    throw Error(ErrorKind::validation, "density '" + density.text() + "' is negative on the window");
  }
  double sup = density.sup_over(lo, hi);
  // An identically zero density still needs a positive envelope.
  if (!(sup > 0.0)) sup = 1.0;
  return IntensityMeasure(density.as_density(), window, sup);
}

TimeChangeSpec parse_time_change(std::string_view text, double horizon) {
  const std::size_t colon = text.find(':');
  if (colon == std::string_view::npos) parse_fail(text, text.size(), "expected ':' after the time-change name");
  const std::string_view name = text.substr(0, colon);
  const std::vector<double> p = parse_numbers(text, colon + 1);
  if (name == "rational") {
    expect_count(text, colon + 1, p, 1, "rational");
    return TimeChangeSpec::rational(p[0], horizon);
  }
  if (name == "damped") {
    expect_count(text, colon + 1, p, 2, "damped");
    return TimeChangeSpec::damped_linear(p[0], p[1], horizon);
  }
  parse_fail(text, 0, "unknown time change '" + std::string(name) + "' (rational, damped)");
}

}  // namespace ppt
