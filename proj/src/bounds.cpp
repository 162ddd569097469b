#include "ppt/bounds.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <sstream>

#include "ppt/parallel.hpp"
#include "ppt/quadrature.hpp"

namespace ppt {
namespace {

std::string fnv1a_hex(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void describe_measure(std::ostringstream& out, const IntensityMeasure& sigma) {
  out << "window";
  for (double x : sigma.window().lower()) out << ' ' << x;
  out << " /";
  for (double x : sigma.window().upper()) out << ' ' << x;
  out << " mass " << sigma.total_mass() << " sup " << sigma.density_sup();
}

void seal(BoundResult& r, std::string_view op, const std::string& inputs) {
  std::ostringstream out;
  out.precision(17);
  out << op << '|' << to_string(r.method) << '|' << inputs << '|' << r.n_samples << '|'
      << r.seed.seed << ':' << r.seed.stream_id;
  r.inputs_digest = fnv1a_hex(out.str());
}

}  // namespace

std::string_view to_string(BoundMethod m) noexcept {
  switch (m) {
    case BoundMethod::closed_form: return "closed_form";
    case BoundMethod::quadrature: return "quadrature";
    case BoundMethod::monte_carlo: return "monte_carlo";
  }
  return "?";
}

BoundResult bound_tv_poisson(const Density& p, const IntensityMeasure& sigma) {
  BoundResult r;
  r.method = BoundMethod::quadrature;
  const Window& w = sigma.window();
  r.value = integrate_box(
                [&](std::span<const double> x) {
                  const double px = p(x);
                  if (!(px >= 0.0)) {
                    throw Error(ErrorKind::invalid_argument, "density p must be >= 0");
                  }
                  return std::abs(px - 1.0) * sigma.density(x);
                },
                w.lower(), w.upper())
                .value;
  std::ostringstream in;
  in.precision(17);
  describe_measure(in, sigma);
  seal(r, "bound_tv_poisson", in.str());
  return r;
}

BoundResult bound_tv_cox(const IntensityMeasure& base, const Mixer& mixer, std::size_t n_samples,
                         const SeedSpec& seed) {
  if (n_samples == 0) throw Error(ErrorKind::invalid_argument, "bound_tv_cox needs n_samples > 0");
  const double mass = base.total_mass();
  const auto values = replicate<double>(n_samples, [&](std::size_t i) {
    Rng rng = make_rng(seed.substream(i));
    return std::abs(mixer.draw(rng) - 1.0) * mass;
  });
  const Estimate e = estimate_from(values, seed);
  BoundResult r;
  r.method = BoundMethod::monte_carlo;
  r.value = e.mean;
  r.std_error = e.std_error;
  r.n_samples = n_samples;
  r.seed = seed;
  std::ostringstream in;
  in.precision(17);
  describe_measure(in, base);
  in << " mixer " << static_cast<int>(mixer.family()) << ' ' << mixer.mean() << ' '
     << mixer.variance();
  seal(r, "bound_tv_cox", in.str());
  return r;
}

BoundResult bound_tv_gibbs(const PairPotential& potential, const IntensityMeasure& sigma) {
  const Window& w = sigma.window();
  const std::size_t d = w.dim();
  std::vector<double> lower(2 * d), upper(2 * d);
  for (std::size_t k = 0; k < d; ++k) {
    lower[k] = lower[d + k] = w.lower()[k];
    upper[k] = upper[d + k] = w.upper()[k];
  }
  const auto weight = [&](std::span<const double> x, std::span<const double> y) {
    std::vector<double> diff(d);
    for (std::size_t k = 0; k < d; ++k) diff[k] = x[k] - y[k];
    const double phi = potential.phi(diff);
    if (!(phi >= 0.0)) throw Error(ErrorKind::invalid_argument, "pair potential must be >= 0");
    return phi * sigma.density(x) * sigma.density(y);
  };
  double pair = 0.0;
  if (d == 1) {
    // Potentials of |x - y| are typically kinked on the diagonal, so the inner
    // integral is split there.
    QuadratureOptions inner;
    inner.rel_tol = 1e-10;
    pair = integrate(
               [&](double x) {
                 const auto along = [&](double y) {
                   return weight(std::span<const double>(&x, 1), std::span<const double>(&y, 1));
                 };
                 return integrate(along, lower[0], x, inner).value + integrate(along, x, upper[0], inner).value;
               },
               lower[0], upper[0])
               .value;
  } else {
    pair = integrate_box([&](std::span<const double> z) { return weight(z.first(d), z.subspan(d, d)); }, lower,
                         upper)
               .value;
  }
  BoundResult r;
  r.method = BoundMethod::quadrature;
  r.value = 2.0 * pair;
  if (potential.include_diagonal) {
    const std::vector<double> origin(d, 0.0);
    r.value += potential.phi(origin) * sigma.total_mass();
    r.notes.push_back("self-interaction term phi(0) sigma(Λ) included");
  }
  std::ostringstream in;
  in.precision(17);
  describe_measure(in, sigma);
  in << " diagonal " << potential.include_diagonal;
  seal(r, "bound_tv_gibbs", in.str());
  return r;
}

BoundResult bound_w2_halfline(const TimeChangeSpec& tc) {
  const double t = tc.horizon();
  auto u2 = [&](double s) {
    const double u = tc.u(s);
    return u * u;
  };
  BoundResult r;
  r.method = BoundMethod::quadrature;
  r.value = std::sqrt(integrate(u2, 0.0, t).value);
  r.truncation_estimate = integrate(u2, t, 2.0 * t).value;
  std::ostringstream in;
  in.precision(17);
  in << "horizon " << t << " u(1) " << tc.u(std::min(1.0, t));
  seal(r, "bound_w2_halfline", in.str());
  return r;
}

BoundResult bound_tv_general(const Functional& density, const IntensityMeasure& sigma,
                             std::size_t n_samples, const SeedSpec& seed, std::size_t inner) {
  const Estimate grad = gradient_mass(density, sigma, n_samples, seed, inner);

  const SeedSpec norm_seed = seed.substream(2);
  const auto values = replicate<double>(n_samples, [&](std::size_t i) {
    return density(sample_poisson(sigma, norm_seed.substream(i)));
  });
  const Estimate norm = estimate_from(values, norm_seed);

  BoundResult r;
  r.method = BoundMethod::monte_carlo;
  r.value = grad.mean;
  r.std_error = grad.std_error;
  r.n_samples = n_samples;
  r.seed = seed;
  const double gap = std::abs(norm.mean - 1.0);
  if (gap > 4.0 * norm.std_error && gap > 1e-12) {
    std::ostringstream note;
    note.precision(6);
    note << "warning: E L = " << norm.mean << " +/- " << norm.std_error
         << " is not 1 at 4 standard errors; the density may be unnormalized";
    r.notes.push_back(note.str());
  } else {
    std::ostringstream note;
    note.precision(6);
    note << "normalization check: E L = " << norm.mean << " +/- " << norm.std_error;
    r.notes.push_back(note.str());
  }
  std::ostringstream in;
  in.precision(17);
  describe_measure(in, sigma);
  in << " inner " << inner;
  seal(r, "bound_tv_general", in.str());
  return r;
}

BoundResult bound_w2_timechange(const std::vector<MarkedTimeChange>& marks) {
  if (marks.empty()) throw Error(ErrorKind::invalid_argument, "time-change bound needs at least one mark");
  double lhs = 0.0;
  double rhs = 0.0;
  std::ostringstream in;
  in.precision(17);
  for (const auto& mark : marks) {
    if (!(mark.weight >= 0.0) || !std::isfinite(mark.weight)) {
      throw Error(ErrorKind::invalid_argument, "mark weights must be finite and >= 0");
    }
    const TimeChangeSpec& tc = mark.tc;
    const double a = integrate(
                         [&](double t) {
                           const double u = tc.u(t);
                           return u * u * (1.0 + tc.u_prime(t));
                         },
                         0.0, tc.horizon())
                         .value;
    const double b = integrate(
                         [&](double s) {
                           const double gap = s - tc.inverse(s);
                           return gap * gap;
                         },
                         0.0, tc.forward(tc.horizon()))
                         .value;
    if (std::abs(a - b) > 1e-6 * std::max(std::abs(a), std::abs(b)) + 1e-14) {
      std::ostringstream msg;
      msg.precision(12);
      msg << "time-change expressions disagree: " << a << " vs " << b;
      throw Error(ErrorKind::internal_consistency, msg.str());
    }
    lhs += mark.weight * a;
    rhs += mark.weight * b;
    in << " [w " << mark.weight << " T " << tc.horizon() << ']';
  }
  BoundResult r;
  r.method = BoundMethod::quadrature;
  r.value = std::sqrt(std::max(lhs, 0.0));
  std::ostringstream note;
  note.precision(12);
  note << "expressions agree: " << lhs << " vs " << rhs;
  r.notes.push_back(note.str());
  seal(r, "bound_w2_timechange", in.str());
  return r;
}

BoundResult bound_w2_timechange(const TimeChangeSpec& tc) {
  return bound_w2_timechange(std::vector<MarkedTimeChange>{{tc, 1.0}});
}

}  // namespace ppt
