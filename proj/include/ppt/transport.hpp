#pragma once

// Exact discrete optimal transport: assignment, transportation simplex,
// empirical Rubinstein estimates and a small exact oracle for Poisson laws.

#include <cstddef>
#include <span>
#include <vector>

#include "ppt/core.hpp"
#include "ppt/metrics.hpp"

namespace ppt {

/// Dense n x m matrix of costs in [0, +inf].
class CostMatrix {
 public:
  CostMatrix(std::size_t rows, std::size_t cols);
  /// Row-major entries; +inf is allowed.
  CostMatrix(std::size_t rows, std::size_t cols, std::vector<double> entries);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  double operator()(std::size_t i, std::size_t j) const { return entries_[i * cols_ + j]; }
  ExtendedReal entry(std::size_t i, std::size_t j) const { return ExtendedReal((*this)(i, j)); }
  void set(std::size_t i, std::size_t j, double c);
  void set(std::size_t i, std::size_t j, ExtendedReal c) { set(i, j, c.value()); }
  bool has_infinite() const noexcept;

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> entries_;
};

struct Assignment {
  /// permutation[i] is the column matched to row i.
  std::vector<std::size_t> permutation;
  /// Sum of C(i, permutation[i]) accumulated in row order.
  double cost = 0.0;
};

/// Exact minimum-cost perfect matching (Hungarian method, O(n^3)).
/// Requires a square matrix with finite entries.
Assignment assignment_solve(const CostMatrix& cost);

struct TransportPlan {
  std::size_t rows = 0;
  std::size_t cols = 0;
  /// Row-major n x m weights.
  std::vector<double> weights;
  std::vector<double> row_marginals;
  std::vector<double> col_marginals;
  ExtendedReal cost;
  /// Simplex pivots spent; 0 for trivial instances.
  std::size_t pivots = 0;

  double weight(std::size_t i, std::size_t j) const { return weights[i * cols + j]; }
};

/// Optimal plan between probability vectors a and b for cost C, by the
/// transportation simplex. Arcs of infinite cost are excluded; when no plan
/// avoids them the returned cost is +inf.
TransportPlan emd(std::span<const double> a, std::span<const double> b, const CostMatrix& cost);

/// Pairwise configuration distances, assembled in parallel over rows.
CostMatrix pairwise_costs(const std::vector<Configuration>& left,
                          const std::vector<Configuration>& right, Metric metric);

struct EmpiricalTransport {
  /// mean: empirical transport cost. std_error: plan-weighted standard
  /// deviation of the matched costs over sqrt(min(n, m)), a dispersion measure
  /// rather than a sampling error of T itself.
  Estimate estimate;
  TransportPlan plan;
};

/// Transport cost between the uniform empirical measures of the two samples.
EmpiricalTransport empirical_transport(const std::vector<Configuration>& samples_mu,
                                       const std::vector<Configuration>& samples_nu, Metric metric,
                                       const SeedSpec& seed = {});

Estimate estimate_rubinstein_empirical(const std::vector<Configuration>& samples_mu,
                                       const std::vector<Configuration>& samples_nu, Metric metric,
                                       const SeedSpec& seed = {});

struct DoublingDiagnostic {
  Estimate half;  ///< first floor(n/2) samples of each list
  Estimate full;
};

DoublingDiagnostic doubling_diagnostic(const std::vector<Configuration>& samples_mu,
                                       const std::vector<Configuration>& samples_nu, Metric metric,
                                       const SeedSpec& seed = {});

/// mean F(nu samples) - mean F(mu samples), with the combined standard error.
/// A lower bound on T whenever F is 1-Lipschitz for the metric.
Estimate dual_lower_bound(const Functional& f, const std::vector<Configuration>& samples_mu,
                          const std::vector<Configuration>& samples_nu, const SeedSpec& seed = {});

/// Exact T_rho1 between the Poisson laws with the given cell masses (one or two
/// cells), by enumerating count vectors up to `truncation` per cell.
double exact_oracle_discrete(std::span<const double> cell_masses_mu,
                             std::span<const double> cell_masses_nu, std::size_t truncation);

}  // namespace ppt
