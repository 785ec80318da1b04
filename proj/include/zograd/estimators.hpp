#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "zograd/core.hpp"

namespace zograd {

/// A non-adaptive linear gradient estimator: sum_j w_j * Y_j(x0 + delta_j).
/// Each delta_j and w_j is a p-vector.
class LinearDesign {
 public:
  LinearDesign(std::vector<Point> deltas, std::vector<Point> weights);

  std::size_t size() const noexcept { return deltas_.size(); }
  int dimension() const noexcept { return static_cast<int>(deltas_.front().size()); }
  const std::vector<Point>& deltas() const noexcept { return deltas_; }
  const std::vector<Point>& weights() const noexcept { return weights_; }

  /// sum_j ||w_j||_2^2, the variance multiplier under constant noise.
  double weight_energy() const noexcept;

  friend bool operator==(const LinearDesign&, const LinearDesign&) = default;

 private:
  std::vector<Point> deltas_;
  std::vector<Point> weights_;
};

/// Central differences with n/2 independent (+delta, -delta) pairs.
LinearDesign cfd_design_1d(int n, double delta);

/// Per-axis central differences: n/p evaluations on each axis, n % (2p) == 0.
LinearDesign cfd_design_multi(int n, int p, double delta);

/// n/2 forward-difference pairs (Y(x0+delta) - Y(x0)) / delta, averaged.
LinearDesign forward_difference_design(int n, double delta);

/// (18 b / a^2)^(1/6) (n/p)^(-1/6). Throws DegenerateError for b == 0.
double optimal_delta(double a, double b, int n, int p = 1);

/// Residuals of the three moment conditions a design needs for bounded
/// worst-case risk over the class.
struct MomentReport {
  double constant;   // ||sum_j w_j||_2
  double linear;     // ||sum_j w_j delta_j^T - I||_F
  double quadratic;  // max_i ||sum_j (w_j)_i delta_j delta_j^T||_F
  bool matched;
};

MomentReport moment_conditions(const LinearDesign& design);

/// True when every w_j has all of its nonzero components of one sign.
bool is_same_sign(const LinearDesign& design) noexcept;

/// Evaluates the design against the oracle, one fresh sample per design
/// point in order j = 1..n. Throws BudgetError before sampling if the oracle
/// cannot afford n evaluations.
Point linear_estimate(const LinearDesign& design, Oracle& oracle, std::span<const double> x0);

/// Law of each perturbation coordinate, given as a map from a uniform draw on
/// (0, 1) to a real value. Must be symmetric about zero.
struct PerturbationLaw {
  std::string name;
  std::function<double(double)> from_uniform;

  static PerturbationLaw rademacher();
};

/// Simultaneous-perturbation configuration.
struct SPConfig {
  double h = 1.0;
  int n = 2;
  PerturbationLaw law = PerturbationLaw::rademacher();

  void validate() const;
};

/// Simultaneous-perturbation estimate averaged over n/2 independent
/// perturbation directions. Perturbations are drawn from the oracle's
/// perturbation stream so they are reproducible per replication.
Point sp_estimate(const SPConfig& config, Oracle& oracle, std::span<const double> x0);

}  // namespace zograd
