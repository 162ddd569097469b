#include "ppt/transport.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <sstream>

#include <boost/graph/adjacency_list.hpp>
#include <boost/graph/edmonds_karp_max_flow.hpp>
#include <boost/math/distributions/poisson.hpp>

#include "ppt/parallel.hpp"

namespace ppt {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

void check_cost(double c) {
  if (std::isnan(c) || c < 0.0) {
    throw Error(ErrorKind::invalid_argument, "cost entries must lie in [0, +inf]");
  }
}

// ---------------------------------------------------------------------------
// Transportation simplex on a complete bipartite graph with finite costs.
// Nodes 0..n-1 are rows, n..n+m-1 columns; a basis is a spanning tree of n+m-1
// cells.

class TransportationSimplex {
 public:
  TransportationSimplex(std::span<const double> a, std::span<const double> b,
                        const std::vector<double>& cost)
      : n_(a.size()),
        m_(b.size()),
        cost_(cost),
        flow_(n_ * m_, 0.0),
        basic_(n_ * m_, 0),
        adj_(n_ + m_),
        pot_(n_ + m_, 0.0),
        parent_node_(n_ + m_),
        parent_cell_(n_ + m_),
        depth_(n_ + m_) {
    double scale = 1.0;
    for (double c : cost_) scale = std::max(scale, c);
    eps_ = 1e-12 * scale;
    scale_ = scale;
    northwest_corner(a, b);
  }

  void solve() {
    const std::size_t max_pivots = 50 * n_ * m_ + 10'000;
    std::size_t degenerate_streak = 0;
    bool bland = false;
    compute_tree();
    while (true) {
      const std::size_t entering = bland ? price_bland() : price_dantzig();
      if (entering == kNone) break;
      if (++pivots_ > max_pivots) {
        throw Error(ErrorKind::internal_consistency,
                    "transportation simplex exceeded " + std::to_string(max_pivots) + " pivots");
      }
      const double theta = pivot(entering, bland);
      if (theta > 0.0) {
        degenerate_streak = 0;
        bland = false;
      } else if (++degenerate_streak > 2 * (n_ + m_)) {
        bland = true;
      }
      compute_tree();
    }
    verify_optimality();
  }

  const std::vector<double>& flow() const noexcept { return flow_; }
  std::size_t pivots() const noexcept { return pivots_; }

 private:
  void add_basic(std::size_t cell) {
    basic_[cell] = 1;
    adj_[cell / m_].push_back(cell);
    adj_[n_ + cell % m_].push_back(cell);
  }

  void remove_basic(std::size_t cell) {
    basic_[cell] = 0;
    for (std::size_t node : {cell / m_, n_ + cell % m_}) {
      auto& list = adj_[node];
      list.erase(std::find(list.begin(), list.end(), cell));
    }
  }

  void northwest_corner(std::span<const double> a, std::span<const double> b) {
    std::vector<double> ra(a.begin(), a.end());
    std::vector<double> rb(b.begin(), b.end());
    std::size_t i = 0, j = 0;
    while (true) {
      const std::size_t cell = i * m_ + j;
      const double x = std::min(ra[i], rb[j]);
      flow_[cell] = std::max(x, 0.0);
      ra[i] -= x;
      rb[j] -= x;
      add_basic(cell);
      if (i == n_ - 1 && j == m_ - 1) break;
      if (i == n_ - 1) {
        ++j;
      } else if (j == m_ - 1) {
        ++i;
      } else if (ra[i] <= rb[j]) {
        ++i;
      } else {
        ++j;
      }
    }
  }

  std::size_t other_end(std::size_t node, std::size_t cell) const {
    return node < n_ ? n_ + cell % m_ : cell / m_;
  }

  // Potentials u_i + v_j = c_ij on basic cells, and a rooted tree for paths.
  void compute_tree() {
    std::fill(parent_node_.begin(), parent_node_.end(), kNone);
    std::vector<char> seen(n_ + m_, 0);
    std::vector<std::size_t> queue;
    queue.reserve(n_ + m_);
    queue.push_back(0);
    seen[0] = 1;
    pot_[0] = 0.0;
    depth_[0] = 0;
    for (std::size_t head = 0; head < queue.size(); ++head) {
      const std::size_t u = queue[head];
      for (std::size_t cell : adj_[u]) {
        const std::size_t w = other_end(u, cell);
        if (seen[w]) continue;
        seen[w] = 1;
        parent_node_[w] = u;
        parent_cell_[w] = cell;
        depth_[w] = depth_[u] + 1;
        pot_[w] = cost_[cell] - pot_[u];
        queue.push_back(w);
      }
    }
    if (queue.size() != n_ + m_) {
      throw Error(ErrorKind::internal_consistency, "simplex basis is not a spanning tree");
    }
  }

  double reduced(std::size_t cell) const {
    return cost_[cell] - pot_[cell / m_] - pot_[n_ + cell % m_];
  }

  std::size_t price_dantzig() const {
    std::size_t best = kNone;
    double best_r = -eps_;
    for (std::size_t cell = 0; cell < cost_.size(); ++cell) {
      if (basic_[cell]) continue;
      const double r = reduced(cell);
      if (r < best_r) {
        best_r = r;
        best = cell;
      }
    }
    return best;
  }

  std::size_t price_bland() const {
    for (std::size_t cell = 0; cell < cost_.size(); ++cell) {
      if (!basic_[cell] && reduced(cell) < -eps_) return cell;
    }
    return kNone;
  }

  // Pushes flow around the cycle closed by `entering`; returns the step size.
  double pivot(std::size_t entering, bool bland) {
    std::size_t x = n_ + entering % m_;  // column end
    std::size_t y = entering / m_;       // row end
    std::vector<std::size_t> from_col, from_row;
    while (depth_[x] > depth_[y]) {
      from_col.push_back(parent_cell_[x]);
      x = parent_node_[x];
    }
    while (depth_[y] > depth_[x]) {
      from_row.push_back(parent_cell_[y]);
      y = parent_node_[y];
    }
    while (x != y) {
      from_col.push_back(parent_cell_[x]);
      x = parent_node_[x];
      from_row.push_back(parent_cell_[y]);
      y = parent_node_[y];
    }
    std::vector<std::size_t> path = std::move(from_col);
    path.insert(path.end(), from_row.rbegin(), from_row.rend());

    // Cells at even positions lose flow, odd positions gain it.
    double theta = kInf;
    std::size_t leaving = kNone;
    for (std::size_t k = 0; k < path.size(); k += 2) {
      const double f = flow_[path[k]];
      if (f < theta || (bland && f == theta && path[k] < leaving)) {
        theta = f;
        leaving = path[k];
      }
    }
    for (std::size_t k = 0; k < path.size(); ++k) {
      if (k % 2 == 0) {
        flow_[path[k]] -= theta;
      } else {
        flow_[path[k]] += theta;
      }
    }
    flow_[leaving] = 0.0;
    flow_[entering] = theta;
    remove_basic(leaving);
    add_basic(entering);
    return theta;
  }

  void verify_optimality() const {
    double residual = 0.0;
    for (std::size_t cell = 0; cell < cost_.size(); ++cell) {
      const double r = reduced(cell);
      residual = std::max(residual, -r);
      residual = std::max(residual, flow_[cell] * std::abs(r));
    }
    if (residual > 1e-9 * scale_) {
      std::ostringstream msg;
      msg << "complementary slackness residual " << residual << " exceeds 1e-9 (cost scale "
          << scale_ << ")";
      throw Error(ErrorKind::internal_consistency, msg.str());
    }
  }

  std::size_t n_;
  std::size_t m_;
  const std::vector<double>& cost_;
  std::vector<double> flow_;
  std::vector<char> basic_;
  std::vector<std::vector<std::size_t>> adj_;
  std::vector<double> pot_;
  std::vector<std::size_t> parent_node_;
  std::vector<std::size_t> parent_cell_;
  std::vector<std::size_t> depth_;
  double eps_ = 0.0;
  double scale_ = 1.0;
  std::size_t pivots_ = 0;
};

// Largest flow routable through finite-cost arcs only.
double finite_arc_max_flow(std::span<const double> a, std::span<const double> b,
                           const CostMatrix& cost) {
  using Traits = boost::adjacency_list_traits<boost::vecS, boost::vecS, boost::directedS>;
  using Graph = boost::adjacency_list<
      boost::vecS, boost::vecS, boost::directedS, boost::no_property,
      boost::property<boost::edge_capacity_t, double,
                      boost::property<boost::edge_residual_capacity_t, double,
                                      boost::property<boost::edge_reverse_t, Traits::edge_descriptor>>>>;
  const std::size_t n = a.size();
  const std::size_t m = b.size();
  Graph g(n + m + 2);
  const std::size_t source = n + m;
  const std::size_t sink = n + m + 1;
  auto capacity = boost::get(boost::edge_capacity, g);
  auto reverse = boost::get(boost::edge_reverse, g);
  auto link = [&](std::size_t u, std::size_t v, double cap) {
    auto e = boost::add_edge(u, v, g).first;
    auto r = boost::add_edge(v, u, g).first;
    capacity[e] = cap;
    capacity[r] = 0.0;
    reverse[e] = r;
    reverse[r] = e;
  };
  for (std::size_t i = 0; i < n; ++i) link(source, i, a[i]);
  for (std::size_t j = 0; j < m; ++j) link(n + j, sink, b[j]);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      if (std::isfinite(cost(i, j))) link(i, n + j, 2.0);
    }
  }
  return boost::edmonds_karp_max_flow(g, source, sink);
}

void check_marginal(std::span<const double> w, const char* name) {
  if (w.empty()) throw Error(ErrorKind::invalid_argument, std::string(name) + " is empty");
  double s = 0.0;
  for (double x : w) {
    if (!std::isfinite(x) || x < 0.0) {
      throw Error(ErrorKind::invalid_argument, std::string(name) + " has a negative or non-finite weight");
    }
    s += x;
  }
  if (std::abs(s - 1.0) > 1e-12) {
    std::ostringstream msg;
    msg.precision(17);
    msg << name << " sums to " << s << ", not 1 within 1e-12";
    throw Error(ErrorKind::invalid_argument, msg.str());
  }
}

}  // namespace

// ---------------------------------------------------------------------------

CostMatrix::CostMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), entries_(rows * cols, 0.0) {}

CostMatrix::CostMatrix(std::size_t rows, std::size_t cols, std::vector<double> entries)
    : rows_(rows), cols_(cols), entries_(std::move(entries)) {
  if (entries_.size() != rows_ * cols_) {
    throw Error(ErrorKind::invalid_argument, "cost matrix entry count does not match its shape");
  }
  for (double c : entries_) check_cost(c);
}

void CostMatrix::set(std::size_t i, std::size_t j, double c) {
  check_cost(c);
  entries_.at(i * cols_ + j) = c;
}

bool CostMatrix::has_infinite() const noexcept {
  return std::any_of(entries_.begin(), entries_.end(), [](double c) { return std::isinf(c); });
}

Assignment assignment_solve(const CostMatrix& cost) {
  const std::size_t n = cost.rows();
  if (n != cost.cols()) {
    throw Error(ErrorKind::invalid_argument, "assignment needs a square cost matrix, got " +
                                                 std::to_string(n) + "x" + std::to_string(cost.cols()));
  }
  if (cost.has_infinite()) {
    throw Error(ErrorKind::invalid_argument, "assignment needs finite costs");
  }
  Assignment out;
  if (n == 0) return out;

  // Shortest augmenting paths with potentials; index 0 is a virtual column.
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1);
  std::vector<std::size_t> match(n + 1, 0), way(n + 1, 0);
  std::vector<char> used(n + 1);
  for (std::size_t i = 1; i <= n; ++i) {
    match[0] = i;
    std::size_t j0 = 0;
    std::fill(minv.begin(), minv.end(), kInf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = match[j0];
      double delta = kInf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[match[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (match[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      match[j0] = match[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  out.permutation.assign(n, 0);
  for (std::size_t j = 1; j <= n; ++j) out.permutation[match[j] - 1] = j - 1;
  for (std::size_t i = 0; i < n; ++i) out.cost += cost(i, out.permutation[i]);
  return out;
}

TransportPlan emd(std::span<const double> a, std::span<const double> b, const CostMatrix& cost) {
  check_marginal(a, "row marginal");
  check_marginal(b, "column marginal");
  const std::size_t n = a.size();
  const std::size_t m = b.size();
  if (cost.rows() != n || cost.cols() != m) {
    throw Error(ErrorKind::invalid_argument, "cost matrix shape does not match the marginals");
  }

  TransportPlan plan;
  plan.rows = n;
  plan.cols = m;
  plan.row_marginals.assign(a.begin(), a.end());
  plan.col_marginals.assign(b.begin(), b.end());

  bool feasible = true;
  double max_finite = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      if (std::isfinite(cost(i, j))) max_finite = std::max(max_finite, cost(i, j));
    }
  }
  const bool has_inf = cost.has_infinite();
  if (has_inf) feasible = finite_arc_max_flow(a, b, cost) >= 1.0 - 1e-9;

  // Infinite arcs carry a big-M cost, raised while an optimal plan still uses them.
  double big_m = (max_finite + 1.0) * 1e3;
  for (int round = 0;; ++round) {
    std::vector<double> finite_cost(n * m);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < m; ++j) {
        const double c = cost(i, j);
        finite_cost[i * m + j] = std::isfinite(c) ? c : big_m;
      }
    }
    TransportationSimplex simplex(a, b, finite_cost);
    simplex.solve();
    plan.weights = simplex.flow();
    plan.pivots += simplex.pivots();

    bool on_infinite = false;
    for (std::size_t k = 0; k < n * m; ++k) {
      if (plan.weights[k] > 0.0 && !std::isfinite(cost(k / m, k % m))) on_infinite = true;
    }
    if (!on_infinite || !feasible || round >= 6) {
      if (on_infinite && feasible) {
        throw Error(ErrorKind::internal_consistency,
                    "optimal plan keeps mass on infinite arcs although a finite plan exists");
      }
      break;
    }
    big_m *= 1e4;
  }

  if (!feasible) {
    plan.cost = ExtendedReal::infinity();
    return plan;
  }
  double total = 0.0;
  for (std::size_t k = 0; k < n * m; ++k) {
    if (plan.weights[k] > 0.0) total += plan.weights[k] * cost(k / m, k % m);
  }
  plan.cost = ExtendedReal(std::max(total, 0.0));
  return plan;
}

// ---------------------------------------------------------------------------

CostMatrix pairwise_costs(const std::vector<Configuration>& left,
                          const std::vector<Configuration>& right, Metric metric) {
  const std::size_t n = left.size();
  const std::size_t m = right.size();
  std::vector<double> entries(n * m);
  parallel_for(n, [&](std::size_t i) {
    for (std::size_t j = 0; j < m; ++j) entries[i * m + j] = distance(metric, left[i], right[j]).value();
  });
  return CostMatrix(n, m, std::move(entries));
}

EmpiricalTransport empirical_transport(const std::vector<Configuration>& samples_mu,
                                       const std::vector<Configuration>& samples_nu, Metric metric,
                                       const SeedSpec& seed) {
  if (samples_mu.empty() || samples_nu.empty()) {
    throw Error(ErrorKind::invalid_argument, "empirical transport needs nonempty sample lists");
  }
  const std::size_t n = samples_mu.size();
  const std::size_t m = samples_nu.size();
  const CostMatrix cost = pairwise_costs(samples_mu, samples_nu, metric);
  const std::vector<double> a(n, 1.0 / static_cast<double>(n));
  const std::vector<double> b(m, 1.0 / static_cast<double>(m));

  EmpiricalTransport out{{}, emd(a, b, cost)};
  out.estimate.n_samples = std::min(n, m);
  out.estimate.seed = seed;
  out.estimate.mean = out.plan.cost.value();
  if (out.plan.cost.is_finite()) {
    const double mean = out.estimate.mean;
    double var = 0.0;
    for (std::size_t k = 0; k < n * m; ++k) {
      const double w = out.plan.weights[k];
      if (w > 0.0) var += w * (cost(k / m, k % m) - mean) * (cost(k / m, k % m) - mean);
    }
    out.estimate.std_error = std::sqrt(var / static_cast<double>(out.estimate.n_samples));
  }
  return out;
}

Estimate estimate_rubinstein_empirical(const std::vector<Configuration>& samples_mu,
                                       const std::vector<Configuration>& samples_nu, Metric metric,
                                       const SeedSpec& seed) {
  return empirical_transport(samples_mu, samples_nu, metric, seed).estimate;
}

DoublingDiagnostic doubling_diagnostic(const std::vector<Configuration>& samples_mu,
                                       const std::vector<Configuration>& samples_nu, Metric metric,
                                       const SeedSpec& seed) {
  if (samples_mu.size() < 2 || samples_nu.size() < 2) {
    throw Error(ErrorKind::invalid_argument, "doubling diagnostic needs at least two samples per law");
  }
  const std::vector<Configuration> half_mu(samples_mu.begin(),
                                           samples_mu.begin() + static_cast<std::ptrdiff_t>(samples_mu.size() / 2));
  const std::vector<Configuration> half_nu(samples_nu.begin(),
                                           samples_nu.begin() + static_cast<std::ptrdiff_t>(samples_nu.size() / 2));
  return {estimate_rubinstein_empirical(half_mu, half_nu, metric, seed),
          estimate_rubinstein_empirical(samples_mu, samples_nu, metric, seed)};
}

Estimate dual_lower_bound(const Functional& f, const std::vector<Configuration>& samples_mu,
                          const std::vector<Configuration>& samples_nu, const SeedSpec& seed) {
  if (samples_mu.empty() || samples_nu.empty()) {
    throw Error(ErrorKind::invalid_argument, "dual witness needs nonempty sample lists");
  }
  const auto fm = replicate<double>(samples_mu.size(), [&](std::size_t i) { return f(samples_mu[i]); });
  const auto fn = replicate<double>(samples_nu.size(), [&](std::size_t i) { return f(samples_nu[i]); });
  const Estimate em = estimate_from(fm, seed);
  const Estimate en = estimate_from(fn, seed);
  return Estimate{en.mean - em.mean, std::hypot(en.std_error, em.std_error),
                  std::min(samples_mu.size(), samples_nu.size()), seed};
}

double exact_oracle_discrete(std::span<const double> cell_masses_mu,
                             std::span<const double> cell_masses_nu, std::size_t truncation) {
  const std::size_t cells = cell_masses_mu.size();
  if (cells == 0 || cells > 2 || cell_masses_nu.size() != cells) {
    throw Error(ErrorKind::invalid_argument, "exact oracle supports one or two cells, equal for both laws");
  }
  for (double x : cell_masses_mu) {
    if (!std::isfinite(x) || x < 0.0) throw Error(ErrorKind::invalid_argument, "cell masses must be finite and >= 0");
  }
  for (double x : cell_masses_nu) {
    if (!std::isfinite(x) || x < 0.0) throw Error(ErrorKind::invalid_argument, "cell masses must be finite and >= 0");
  }
  const std::size_t side = truncation + 1;

  auto pmf_table = [&](double mass) {
    std::vector<double> p(side, 0.0);
    if (mass == 0.0) {
      p[0] = 1.0;
      return p;
    }
    const boost::math::poisson_distribution<double> law(mass);
    for (std::size_t k = 0; k < side; ++k) p[k] = boost::math::pdf(law, static_cast<double>(k));
    return p;
  };

  std::size_t states = 1;
  for (std::size_t c = 0; c < cells; ++c) states *= side;

  auto law_weights = [&](std::span<const double> masses) {
    std::vector<std::vector<double>> tables;
    for (double mass : masses) tables.push_back(pmf_table(mass));
    std::vector<double> w(states, 1.0);
    for (std::size_t s = 0; s < states; ++s) {
      std::size_t rest = s;
      for (std::size_t c = 0; c < cells; ++c) {
        w[s] *= tables[c][rest % side];
        rest /= side;
      }
    }
    const double kept = std::accumulate(w.begin(), w.end(), 0.0);
    if (1.0 - kept > 1e-10) {
      std::ostringstream msg;
      msg << "truncation " << truncation << " neglects Poisson mass " << 1.0 - kept << " > 1e-10";
      throw Error(ErrorKind::invalid_argument, msg.str());
    }
    for (double& x : w) x /= kept;
    return w;
  };

  const std::vector<double> a = law_weights(cell_masses_mu);
  const std::vector<double> b = law_weights(cell_masses_nu);
  CostMatrix cost(states, states);
  for (std::size_t s = 0; s < states; ++s) {
    for (std::size_t t = 0; t < states; ++t) {
      std::size_t rs = s, rt = t;
      double l1 = 0.0;
      for (std::size_t c = 0; c < cells; ++c) {
        l1 += std::abs(static_cast<double>(rs % side) - static_cast<double>(rt % side));
        rs /= side;
        rt /= side;
      }
      cost.set(s, t, l1);
    }
  }
  return emd(a, b, cost).cost.finite_value();
}

}  // namespace ppt
