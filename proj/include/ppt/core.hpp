#pragma once

// Foundational types: points, windows, configurations, intensity measures,
// seeded randomness and Monte Carlo estimates.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <random>
#include <span>
#include <vector>

#include "ppt/error.hpp"

namespace ppt {

/// A location in R^d. Coordinates must be finite.
class Point {
 public:
  Point() = default;
  explicit Point(std::vector<double> coords);
  Point(std::initializer_list<double> coords) : Point(std::vector<double>(coords)) {}

  std::size_t dim() const noexcept { return coords_.size(); }
  double operator[](std::size_t i) const { return coords_[i]; }
  std::span<const double> coords() const noexcept { return coords_; }

  friend bool operator==(const Point&, const Point&) = default;

 private:
  std::vector<double> coords_;
};

/// Axis-aligned bounded box [lower, upper] in R^d, d >= 1.
class Window {
 public:
  Window(std::vector<double> lower, std::vector<double> upper);
  Window(double lower, double upper) : Window(std::vector{lower}, std::vector{upper}) {}

  static Window unit(std::size_t dim);

  std::size_t dim() const noexcept { return lower_.size(); }
  std::span<const double> lower() const noexcept { return lower_; }
  std::span<const double> upper() const noexcept { return upper_; }
  double volume() const noexcept;
  bool contains(std::span<const double> x) const;
  /// Box intersection; throws if the two boxes do not overlap with positive volume.
  Window intersect(const Window& other) const;

  friend bool operator==(const Window&, const Window&) = default;

 private:
  std::vector<double> lower_;
  std::vector<double> upper_;
};

/// Finite multiset of atoms in R^d. Storage order carries no meaning; atoms
/// compare by exact coordinate equality.
class Configuration {
 public:
  explicit Configuration(std::size_t dim = 1) : dim_(dim) { check_dim(); }
  Configuration(std::size_t dim, std::vector<double> flat_coords);
  Configuration(std::initializer_list<Point> atoms);

  static Configuration from_points(std::size_t dim, const std::vector<std::vector<double>>& atoms);

  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return coords_.size() / dim_; }
  bool empty() const noexcept { return coords_.empty(); }

  std::span<const double> atom(std::size_t i) const {
    return {coords_.data() + i * dim_, dim_};
  }
  const std::vector<double>& flat() const noexcept { return coords_; }

  void add(std::span<const double> x);
  void add(const Point& x) { add(x.coords()); }
  void reserve(std::size_t n) { coords_.reserve(n * dim_); }

  /// omega + epsilon_x
  Configuration plus(std::span<const double> x) const;
  /// Concatenation of the two multisets.
  Configuration merged(const Configuration& other) const;
  /// Restriction to the box K (the map pi_K).
  Configuration restricted(const Window& k) const;
  std::size_t count_in(const Window& k) const;
  bool lies_in(const Window& w) const;

  /// Atom indices in lexicographic coordinate order.
  std::vector<std::size_t> sorted_order() const;

 private:
  void check_dim() const;

  std::size_t dim_;
  std::vector<double> coords_;
};

bool multiset_equal(const Configuration& a, const Configuration& b);

/// (omega \ (omega ∩ eta))(Λ): atoms of omega not matched, with multiplicity, by atoms of eta.
std::size_t sym_diff_count(const Configuration& omega, const Configuration& eta);

// ---------------------------------------------------------------------------
// Randomness

/// Identifies one random stream. Equal specs give equal streams.
struct SeedSpec {
  std::uint64_t seed = 0;
  std::uint64_t stream_id = 0;

  /// Stream `k` of the family derived from this spec. Replicate i of a Monte
  /// Carlo loop driven by `s` draws from `s.substream(i)`.
  SeedSpec substream(std::uint64_t k) const noexcept;

  friend bool operator==(const SeedSpec&, const SeedSpec&) = default;
};

using Rng = std::mt19937_64;

Rng make_rng(const SeedSpec& spec);

/// Monte Carlo summary. std_error is the sample standard deviation over sqrt(n).
struct Estimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t n_samples = 0;
  SeedSpec seed{};
};

Estimate estimate_from(std::span<const double> values, const SeedSpec& seed);

// ---------------------------------------------------------------------------
// Intensity measures

using Density = std::function<double(std::span<const double>)>;
using Functional = std::function<double(const Configuration&)>;

/// Diffuse measure sigma(dx) = density(x) dx on a window.
class IntensityMeasure {
 public:
  IntensityMeasure(Density density, Window window, double density_sup);

  static IntensityMeasure constant(double level, Window window);
  static IntensityMeasure lebesgue(Window window) { return constant(1.0, std::move(window)); }

  double density(std::span<const double> x) const { return scale_ * density_(x); }
  const Density& raw_density() const noexcept { return density_; }
  double scale() const noexcept { return scale_; }
  const Window& window() const noexcept { return window_; }
  double density_sup() const noexcept { return scale_ * density_sup_; }
  double total_mass() const noexcept { return scale_ * base_mass_; }
  std::size_t dim() const noexcept { return window_.dim(); }

  /// c * sigma, for c >= 0. Shares the density; no re-integration.
  IntensityMeasure scaled(double c) const;

  /// sigma(K ∩ window) by quadrature.
  double mass_in(const Window& k) const;

 private:
  IntensityMeasure(Density density, Window window, double density_sup, double base_mass, double scale);

  Density density_;
  Window window_;
  double density_sup_;
  double base_mass_;
  double scale_ = 1.0;
};

double total_mass(const IntensityMeasure& sigma);

// ---------------------------------------------------------------------------
// Discrete gradient

/// grad_x F(omega) = F(omega + epsilon_x) - F(omega).
double grad_sharp(const Functional& f, const Configuration& omega, std::span<const double> x);
inline double grad_sharp(const Functional& f, const Configuration& omega, const Point& x) {
  return grad_sharp(f, omega, x.coords());
}

/// Largest |grad_x F(omega)| seen over omega ~ Poisson(sigma), x ~ sigma / sigma(Λ).
/// A 1-Lipschitz functional for rho0 or rho1 never exceeds 1.
double rademacher_check(const Functional& f, const IntensityMeasure& sigma, std::size_t n_samples,
                        const SeedSpec& seed);

/// Nested Monte Carlo of E ∫ |grad_x F| dsigma(x): one Poisson configuration per
/// outer replicate, `inner` locations x drawn from its own substream.
Estimate gradient_mass(const Functional& f, const IntensityMeasure& sigma, std::size_t n_samples,
                       const SeedSpec& seed, std::size_t inner = 8);

}  // namespace ppt
