#include "ppt/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

namespace ppt {
namespace {

constexpr std::size_t kMaxLocationAttempts = 100'000'000;

std::size_t draw_count(double mean, Rng& rng) {
  if (mean <= 0.0) return 0;
  std::poisson_distribution<long long> count(mean);
  return static_cast<std::size_t>(count(rng));
}

}  // namespace

Point sample_location(const IntensityMeasure& sigma, Rng& rng) {
  const Window& w = sigma.window();
  const double sup = sigma.density_sup();
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> x(w.dim());
  for (std::size_t attempt = 0; attempt < kMaxLocationAttempts; ++attempt) {
    for (std::size_t k = 0; k < x.size(); ++k) {
      x[k] = w.lower()[k] + (w.upper()[k] - w.lower()[k]) * unit(rng);
    }
    const double d = sigma.density(x);
    if (!(d >= 0.0)) {
      throw Error(ErrorKind::invalid_argument, "density is negative or NaN inside the window");
    }
    if (d > sup * (1.0 + 1e-12)) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "density " << d << " exceeds density_sup " << sup << " at x0 = " << x[0];
      throw Error(ErrorKind::envelope_violation, msg.str());
    }
    if (unit(rng) * sup < d) return Point(x);
  }
  throw Error(ErrorKind::sampling_hardness,
              "no location accepted after " + std::to_string(kMaxLocationAttempts) + " attempts");
}

Configuration sample_poisson(const IntensityMeasure& sigma, Rng& rng) {
  Configuration omega(sigma.dim());
  const std::size_t n = draw_count(sigma.total_mass(), rng);
  omega.reserve(n);
  for (std::size_t i = 0; i < n; ++i) omega.add(sample_location(sigma, rng));
  return omega;
}

Configuration sample_poisson(const IntensityMeasure& sigma, const SeedSpec& seed) {
  Rng rng = make_rng(seed);
  return sample_poisson(sigma, rng);
}

// ---------------------------------------------------------------------------

Mixer Mixer::degenerate(double value) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw Error(ErrorKind::invalid_argument, "degenerate mixer value must be positive");
  }
  return Mixer(Family::degenerate, value, 0.0, 0.0);
}

Mixer Mixer::gamma(double shape, double scale) {
  if (!(shape > 0.0) || !(scale > 0.0)) {
    throw Error(ErrorKind::invalid_argument, "gamma mixer needs shape > 0 and scale > 0");
  }
  return Mixer(Family::gamma, shape, scale, 0.0);
}

Mixer Mixer::lognormal(double log_mean, double log_sd) {
  if (!std::isfinite(log_mean) || !(log_sd >= 0.0)) {
    throw Error(ErrorKind::invalid_argument, "lognormal mixer needs finite mean and sd >= 0");
  }
  return Mixer(Family::lognormal, log_mean, log_sd, 0.0);
}

Mixer Mixer::two_point(double low, double high, double p_low) {
  if (!(low > 0.0) || !(high > 0.0) || !(p_low >= 0.0 && p_low <= 1.0)) {
    throw Error(ErrorKind::invalid_argument, "two-point mixer needs positive atoms and p in [0, 1]");
  }
  return Mixer(Family::two_point, low, high, p_low);
}

double Mixer::draw(Rng& rng) const {
  double xi = 0.0;
  switch (family_) {
    case Family::degenerate:
      xi = a_;
      break;
    case Family::gamma:
      xi = std::gamma_distribution<double>(a_, b_)(rng);
      break;
    case Family::lognormal:
      xi = std::lognormal_distribution<double>(a_, b_)(rng);
      break;
    case Family::two_point:
      xi = std::uniform_real_distribution<double>(0.0, 1.0)(rng) < c_ ? a_ : b_;
      break;
  }
  if (!(xi > 0.0)) throw Error(ErrorKind::invalid_argument, "mixer produced a non-positive draw");
  return xi;
}

double Mixer::mean() const {
  switch (family_) {
    case Family::degenerate: return a_;
    case Family::gamma: return a_ * b_;
    case Family::lognormal: return std::exp(a_ + 0.5 * b_ * b_);
    case Family::two_point: return c_ * a_ + (1.0 - c_) * b_;
  }
  return 0.0;
}

double Mixer::variance() const {
  switch (family_) {
    case Family::degenerate: return 0.0;
    case Family::gamma: return a_ * b_ * b_;
    case Family::lognormal: return (std::exp(b_ * b_) - 1.0) * std::exp(2.0 * a_ + b_ * b_);
    case Family::two_point: {
      const double m = mean();
      return c_ * (a_ - m) * (a_ - m) + (1.0 - c_) * (b_ - m) * (b_ - m);
    }
  }
  return 0.0;
}

Configuration sample_cox(const IntensityMeasure& base, const Mixer& mixer, Rng& rng) {
  const double xi = mixer.draw(rng);
  return sample_poisson(base.scaled(xi), rng);
}

Configuration sample_cox(const IntensityMeasure& base, const Mixer& mixer, const SeedSpec& seed) {
  Rng rng = make_rng(seed);
  return sample_cox(base, mixer, rng);
}

// ---------------------------------------------------------------------------

PairPotential PairPotential::constant(double c, bool include_diagonal) {
  return PairPotential{[c](std::span<const double>) { return c; }, include_diagonal};
}

double gibbs_energy(const PairPotential& potential, const Configuration& omega) {
  const std::size_t n = omega.size();
  const std::size_t d = omega.dim();
  std::vector<double> diff(d);
  double v = 0.0;
  auto accumulate = [&](std::size_t i, std::size_t j) {
    const auto x = omega.atom(i);
    const auto y = omega.atom(j);
    for (std::size_t k = 0; k < d; ++k) diff[k] = x[k] - y[k];
    const double phi = potential.phi(diff);
    if (!(phi >= 0.0)) throw Error(ErrorKind::invalid_argument, "pair potential must be >= 0");
    v += phi;
  };
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i != j || potential.include_diagonal) accumulate(i, j);
    }
  }
  return v;
}

Functional gibbs_density(PairPotential potential) {
  return [potential = std::move(potential)](const Configuration& omega) {
    return std::exp(-gibbs_energy(potential, omega));
  };
}

GibbsDraw sample_gibbs(const PairPotential& potential, const IntensityMeasure& sigma,
                       const SeedSpec& seed, const GibbsOptions& options) {
  if (!(options.min_acceptance > 0.0 && options.min_acceptance <= 1.0)) {
    throw Error(ErrorKind::invalid_argument, "min_acceptance must lie in (0, 1]");
  }
  const std::size_t max_proposals =
      options.max_proposals > 0
          ? options.max_proposals
          : static_cast<std::size_t>(std::ceil(12.0 / options.min_acceptance));
  Rng rng = make_rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  GibbsDraw out{Configuration(sigma.dim()), {}, 0, Configuration(sigma.dim())};
  double proposed_atoms = 0.0;
  for (std::size_t k = 0; k < max_proposals; ++k) {
    Configuration omega = sample_poisson(sigma, rng);
    proposed_atoms += static_cast<double>(omega.size());
    const double accept = std::exp(-gibbs_energy(potential, omega));
    if (k == 0) out.first_proposal = omega;
    if (unit(rng) < accept) {
      out.proposals = k + 1;
      out.config = std::move(omega);
      std::vector<double> outcomes(out.proposals, 0.0);
      outcomes.back() = 1.0;
      out.acceptance_rate = estimate_from(outcomes, seed);
      return out;
    }
  }
  std::ostringstream msg;
  msg << "no proposal accepted in " << max_proposals << " proposals (acceptance floor "
      << options.min_acceptance << ", sigma(Λ) = " << sigma.total_mass()
      << ", mean proposal size " << proposed_atoms / static_cast<double>(max_proposals) << ")";
  throw Error(ErrorKind::sampling_hardness, msg.str());
}

CoupledPair sample_coupled_gibbs(const PairPotential& potential, const IntensityMeasure& sigma,
                                 const SeedSpec& seed, const GibbsOptions& options) {
  GibbsDraw draw = sample_gibbs(potential, sigma, seed, options);
  const double cost = static_cast<double>(sym_diff_count(draw.first_proposal, draw.config) +
                                          sym_diff_count(draw.config, draw.first_proposal));
  return CoupledPair{std::move(draw.first_proposal), std::move(draw.config), cost};
}

// ---------------------------------------------------------------------------

SuperpositionCoupler::SuperpositionCoupler(const IntensityMeasure& sigma, Density p, double p_sup)
    : common_([&] {
        if (!(p_sup > 0.0) || !std::isfinite(p_sup)) {
          throw Error(ErrorKind::invalid_argument, "p_sup must be a positive finite bound on p");
        }
        return IntensityMeasure(
            [sigma, p](std::span<const double> x) { return sigma.density(x) * std::min(p(x), 1.0); },
            sigma.window(), sigma.density_sup() * std::min(p_sup, 1.0));
      }()),
      left_only_(
          [sigma, p](std::span<const double> x) {
            return sigma.density(x) * (1.0 - std::min(p(x), 1.0));
          },
          sigma.window(), sigma.density_sup()),
      right_only_(
          [sigma, p](std::span<const double> x) {
            return sigma.density(x) * std::max(p(x) - 1.0, 0.0);
          },
          sigma.window(), sigma.density_sup() * std::max(p_sup - 1.0, 1e-300)) {}

CoupledPair SuperpositionCoupler::sample(Rng& rng) const {
  const Configuration shared = sample_poisson(common_, rng);
  const Configuration extra_left = sample_poisson(left_only_, rng);
  const Configuration extra_right = sample_poisson(right_only_, rng);
  const double cost = static_cast<double>(extra_left.size() + extra_right.size());
  return CoupledPair{shared.merged(extra_left), shared.merged(extra_right), cost};
}

CoupledPair SuperpositionCoupler::sample(const SeedSpec& seed) const {
  Rng rng = make_rng(seed);
  return sample(rng);
}

CoupledPair sample_coupled_superposition(const IntensityMeasure& sigma, const Density& p,
                                         double p_sup, const SeedSpec& seed) {
  return SuperpositionCoupler(sigma, p, p_sup).sample(seed);
}

// ---------------------------------------------------------------------------

TimeChangeSpec::TimeChangeSpec(std::function<double(double)> u,
                               std::function<double(double)> u_prime, double horizon,
                               std::size_t grid_points)
    : u_(std::move(u)), u_prime_(std::move(u_prime)), horizon_(horizon) {
  if (!u_ || !u_prime_) throw Error(ErrorKind::validation, "time change needs U and U'");
  if (!(horizon_ > 0.0) || !std::isfinite(horizon_)) {
    throw Error(ErrorKind::validation, "time-change horizon must be positive and finite");
  }
  if (std::abs(u_(0.0)) > 1e-12) throw Error(ErrorKind::validation, "time change requires U(0) = 0");
  grid_points = std::max<std::size_t>(grid_points, 2);
  double previous = -1.0;
  for (std::size_t k = 0; k < grid_points; ++k) {
    const double t = horizon_ * static_cast<double>(k) / static_cast<double>(grid_points - 1);
    const double slope = u_prime_(t);
    const double ut = u_(t);
    if (!std::isfinite(slope) || !std::isfinite(ut)) {
      throw Error(ErrorKind::validation, "U or U' not finite at t = " + std::to_string(t));
    }
    if (!(slope > -1.0)) {
      throw Error(ErrorKind::validation, "U'(t) <= -1 at t = " + std::to_string(t));
    }
    const double v = t + ut;
    if (k > 0 && !(v > previous)) {
      throw Error(ErrorKind::validation,
                  "v(t) = t + U(t) not strictly increasing near t = " + std::to_string(t));
    }
    previous = v;
  }
}

TimeChangeSpec TimeChangeSpec::rational(double c, double horizon) {
  return TimeChangeSpec([c](double t) { return c * t / (1.0 + t * t * t); },
                        [c](double t) {
                          const double q = 1.0 + t * t * t;
                          return c * (1.0 - 2.0 * t * t * t) / (q * q);
                        },
                        horizon);
}

TimeChangeSpec TimeChangeSpec::damped_linear(double c, double a, double horizon) {
  return TimeChangeSpec([c, a](double t) { return c * t * std::exp(-a * t); },
                        [c, a](double t) { return c * std::exp(-a * t) * (1.0 - a * t); }, horizon);
}

double TimeChangeSpec::inverse(double r) const {
  double lo = 0.0;
  double hi = horizon_;
  if (r <= forward(lo)) return lo;
  if (r >= forward(hi)) return hi;
  if (forward(r) == r) return r;
  while (hi - lo > 1e-12) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (forward(mid) < r) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

TimeChangeSpec TimeChangeSpec::scaled(double c) const {
  auto u = u_;
  auto up = u_prime_;
  return TimeChangeSpec([u, c](double t) { return c * u(t); }, [up, c](double t) { return c * up(t); },
                        horizon_);
}

CoupledPair sample_coupled_timechange(const TimeChangeSpec& tc, Rng& rng) {
  const double end = tc.forward(tc.horizon());
  const std::size_t n = draw_count(end, rng);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> r(n);
  for (auto& ri : r) ri = end * unit(rng);
  std::sort(r.begin(), r.end());

  std::vector<double> t(n);
  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    t[i] = tc.inverse(r[i]);
    const double u = tc.u(t[i]);
    ss += u * u;
  }
  return CoupledPair{Configuration(1, std::move(t)), Configuration(1, std::move(r)), std::sqrt(ss)};
}

CoupledPair sample_coupled_timechange(const TimeChangeSpec& tc, const SeedSpec& seed) {
  Rng rng = make_rng(seed);
  return sample_coupled_timechange(tc, rng);
}

}  // namespace ppt
