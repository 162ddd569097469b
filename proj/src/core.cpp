#include "ppt/core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "ppt/parallel.hpp"
#include "ppt/quadrature.hpp"
#include "ppt/simulate.hpp"

namespace ppt {
namespace {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

bool lex_less(std::span<const double> a, std::span<const double> b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

void require_same_dim(const Configuration& a, const Configuration& b) {
  if (a.dim() != b.dim()) {
    throw Error(ErrorKind::invalid_argument, "configurations of dimension " +
                                                 std::to_string(a.dim()) + " and " +
                                                 std::to_string(b.dim()) + " cannot be compared");
  }
}

}  // namespace

// ---------------------------------------------------------------------------

Point::Point(std::vector<double> coords) : coords_(std::move(coords)) {
  if (coords_.empty()) throw Error(ErrorKind::invalid_argument, "point must have dimension >= 1");
  for (double c : coords_) {
    if (!std::isfinite(c)) throw Error(ErrorKind::invalid_argument, "point coordinate not finite");
  }
}

Window::Window(std::vector<double> lower, std::vector<double> upper)
    : lower_(std::move(lower)), upper_(std::move(upper)) {
  if (lower_.empty() || lower_.size() != upper_.size()) {
    throw Error(ErrorKind::invalid_argument, "window bounds must have equal, positive length");
  }
  for (std::size_t i = 0; i < lower_.size(); ++i) {
    if (!std::isfinite(lower_[i]) || !std::isfinite(upper_[i]) || !(lower_[i] < upper_[i])) {
      throw Error(ErrorKind::invalid_argument,
                  "window requires finite lower[i] < upper[i] (axis " + std::to_string(i) + ")");
    }
  }
}

Window Window::unit(std::size_t dim) {
  return Window(std::vector<double>(dim, 0.0), std::vector<double>(dim, 1.0));
}

double Window::volume() const noexcept {
  double v = 1.0;
  for (std::size_t i = 0; i < lower_.size(); ++i) v *= upper_[i] - lower_[i];
  return v;
}

bool Window::contains(std::span<const double> x) const {
  if (x.size() != lower_.size()) return false;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] < lower_[i] || x[i] > upper_[i]) return false;
  }
  return true;
}

Window Window::intersect(const Window& other) const {
  if (other.dim() != dim()) throw Error(ErrorKind::invalid_argument, "window dimension mismatch");
  std::vector<double> lo(dim()), hi(dim());
  for (std::size_t i = 0; i < dim(); ++i) {
    lo[i] = std::max(lower_[i], other.lower_[i]);
    hi[i] = std::min(upper_[i], other.upper_[i]);
  }
  return Window(std::move(lo), std::move(hi));
}

// ---------------------------------------------------------------------------

void Configuration::check_dim() const {
  if (dim_ == 0) throw Error(ErrorKind::invalid_argument, "configuration dimension must be >= 1");
}

Configuration::Configuration(std::size_t dim, std::vector<double> flat_coords)
    : dim_(dim), coords_(std::move(flat_coords)) {
  check_dim();
  if (coords_.size() % dim_ != 0) {
    throw Error(ErrorKind::invalid_argument, "flat coordinate count is not a multiple of dimension");
  }
  for (double c : coords_) {
    if (!std::isfinite(c)) throw Error(ErrorKind::invalid_argument, "atom coordinate not finite");
  }
}

Configuration::Configuration(std::initializer_list<Point> atoms)
    : dim_(atoms.size() == 0 ? 1 : atoms.begin()->dim()) {
  for (const auto& p : atoms) add(p);
}

Configuration Configuration::from_points(std::size_t dim,
                                         const std::vector<std::vector<double>>& atoms) {
  Configuration c(dim);
  for (const auto& a : atoms) c.add(std::span<const double>(a));
  return c;
}

void Configuration::add(std::span<const double> x) {
  if (x.size() != dim_) {
    throw Error(ErrorKind::invalid_argument, "atom of dimension " + std::to_string(x.size()) +
                                                 " added to configuration of dimension " +
                                                 std::to_string(dim_));
  }
  for (double c : x) {
    if (!std::isfinite(c)) throw Error(ErrorKind::invalid_argument, "atom coordinate not finite");
  }
  coords_.insert(coords_.end(), x.begin(), x.end());
}

Configuration Configuration::plus(std::span<const double> x) const {
  Configuration out = *this;
  out.add(x);
  return out;
}

Configuration Configuration::merged(const Configuration& other) const {
  require_same_dim(*this, other);
  Configuration out = *this;
  out.coords_.insert(out.coords_.end(), other.coords_.begin(), other.coords_.end());
  return out;
}

Configuration Configuration::restricted(const Window& k) const {
  Configuration out(dim_);
  for (std::size_t i = 0; i < size(); ++i) {
    if (k.contains(atom(i))) out.add(atom(i));
  }
  return out;
}

std::size_t Configuration::count_in(const Window& k) const {
  std::size_t n = 0;
  for (std::size_t i = 0; i < size(); ++i) n += k.contains(atom(i)) ? 1 : 0;
  return n;
}

bool Configuration::lies_in(const Window& w) const {
  for (std::size_t i = 0; i < size(); ++i) {
    if (!w.contains(atom(i))) return false;
  }
  return true;
}

std::vector<std::size_t> Configuration::sorted_order() const {
  std::vector<std::size_t> idx(size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::sort(idx.begin(), idx.end(),
            [&](std::size_t a, std::size_t b) { return lex_less(atom(a), atom(b)); });
  return idx;
}

bool multiset_equal(const Configuration& a, const Configuration& b) {
  require_same_dim(a, b);
  return a.size() == b.size() && sym_diff_count(a, b) == 0;
}

std::size_t sym_diff_count(const Configuration& omega, const Configuration& eta) {
  require_same_dim(omega, eta);
  const auto lhs = omega.sorted_order();
  const auto rhs = eta.sorted_order();
  std::size_t i = 0, j = 0, unmatched = 0;
  while (i < lhs.size()) {
    if (j == rhs.size()) {
      unmatched += lhs.size() - i;
      break;
    }
    const auto a = omega.atom(lhs[i]);
    const auto b = eta.atom(rhs[j]);
    if (lex_less(a, b)) {
      ++unmatched;
      ++i;
    } else if (lex_less(b, a)) {
      ++j;
    } else {
      ++i;
      ++j;
    }
  }
  return unmatched;
}

// ---------------------------------------------------------------------------

SeedSpec SeedSpec::substream(std::uint64_t k) const noexcept {
  return SeedSpec{splitmix64(seed ^ splitmix64(stream_id ^ 0x5851f42d4c957f2dULL)), k};
}

Rng make_rng(const SeedSpec& spec) {
  std::seed_seq seq{static_cast<std::uint32_t>(spec.seed), static_cast<std::uint32_t>(spec.seed >> 32),
                    static_cast<std::uint32_t>(spec.stream_id),
                    static_cast<std::uint32_t>(spec.stream_id >> 32)};
  return Rng(seq);
}

Estimate estimate_from(std::span<const double> values, const SeedSpec& seed) {
  if (values.empty()) throw Error(ErrorKind::invalid_argument, "estimate needs at least one sample");
  const double n = static_cast<double>(values.size());
  double sum = 0.0;
  for (double v : values) sum += v;
  const double mean = sum / n;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  const double sd = values.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
  return Estimate{mean, sd / std::sqrt(n), values.size(), seed};
}

// ---------------------------------------------------------------------------

IntensityMeasure::IntensityMeasure(Density density, Window window, double density_sup)
    : density_(std::move(density)), window_(std::move(window)), density_sup_(density_sup) {
  if (!density_) throw Error(ErrorKind::invalid_argument, "intensity density is empty");
  if (!(density_sup_ > 0.0) || !std::isfinite(density_sup_)) {
    throw Error(ErrorKind::invalid_argument, "density_sup must be a positive finite number");
  }
  if (window_.dim() > 3) {
    throw Error(ErrorKind::unsupported_dimension,
                "total mass quadrature supports d <= 3, got d = " + std::to_string(window_.dim()));
  }
  base_mass_ = integrate_box(density_, window_.lower(), window_.upper()).value;
  if (base_mass_ < 0.0) throw Error(ErrorKind::invalid_argument, "density integrates to a negative mass");
}

IntensityMeasure::IntensityMeasure(Density density, Window window, double density_sup,
                                   double base_mass, double scale)
    : density_(std::move(density)),
      window_(std::move(window)),
      density_sup_(density_sup),
      base_mass_(base_mass),
      scale_(scale) {}

IntensityMeasure IntensityMeasure::constant(double level, Window window) {
  if (!(level >= 0.0) || !std::isfinite(level)) {
    throw Error(ErrorKind::invalid_argument, "constant intensity must be finite and >= 0");
  }
  const double mass = window.volume();
  return IntensityMeasure([](std::span<const double>) { return 1.0; }, std::move(window), 1.0,
                          mass, level);
}

IntensityMeasure IntensityMeasure::scaled(double c) const {
  if (!(c >= 0.0) || !std::isfinite(c)) {
    throw Error(ErrorKind::invalid_argument, "intensity scale must be finite and >= 0");
  }
  return IntensityMeasure(density_, window_, density_sup_, base_mass_, scale_ * c);
}

double IntensityMeasure::mass_in(const Window& k) const {
  const Window region = window_.intersect(k);
  return scale_ * integrate_box(density_, region.lower(), region.upper()).value;
}

double total_mass(const IntensityMeasure& sigma) { return sigma.total_mass(); }

// ---------------------------------------------------------------------------

double grad_sharp(const Functional& f, const Configuration& omega, std::span<const double> x) {
  return f(omega.plus(x)) - f(omega);
}

double rademacher_check(const Functional& f, const IntensityMeasure& sigma, std::size_t n_samples,
                        const SeedSpec& seed) {
  if (!(sigma.total_mass() > 0.0)) {
    throw Error(ErrorKind::invalid_argument, "rademacher_check needs a measure with positive mass");
  }
  const auto maxima = replicate<double>(n_samples, [&](std::size_t i) {
    Rng rng = make_rng(seed.substream(i));
    const Configuration omega = sample_poisson(sigma, rng);
    const Point x = sample_location(sigma, rng);
    return std::abs(grad_sharp(f, omega, x));
  });
  double worst = 0.0;
  for (double m : maxima) worst = std::max(worst, m);
  return worst;
}

Estimate gradient_mass(const Functional& f, const IntensityMeasure& sigma, std::size_t n_samples,
                       const SeedSpec& seed, std::size_t inner) {
  if (n_samples == 0 || inner == 0) {
    throw Error(ErrorKind::invalid_argument, "gradient_mass needs positive sample counts");
  }
  const double mass = sigma.total_mass();
  const SeedSpec outer_seed = seed.substream(0);
  const SeedSpec inner_seed = seed.substream(1);
  const auto values = replicate<double>(n_samples, [&](std::size_t i) {
    if (mass == 0.0) return 0.0;
    Rng outer = make_rng(outer_seed.substream(i));
    Rng locations = make_rng(inner_seed.substream(i));
    const Configuration omega = sample_poisson(sigma, outer);
    const double base = f(omega);
    double acc = 0.0;
    for (std::size_t j = 0; j < inner; ++j) {
      const Point x = sample_location(sigma, locations);
      acc += std::abs(f(omega.plus(x.coords())) - base);
    }
    return mass * acc / static_cast<double>(inner);
  });
  return estimate_from(values, seed);
}

}  // namespace ppt
