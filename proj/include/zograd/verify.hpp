#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <variant>
#include <vector>

#include "zograd/core.hpp"
#include "zograd/estimators.hpp"
#include "zograd/worstcase.hpp"

namespace zograd {

/// Monte Carlo estimate of E||estimate - grad||_2^2 with its decomposition.
struct RiskReport {
  double mse = 0.0;
  double bias_sq = 0.0;
  double variance = 0.0;
  double std_error = 0.0;  // sample std of squared errors / sqrt(reps)
  std::uint64_t reps = 0;
  std::uint64_t seed = 0;
  std::uint64_t evals_consumed = 0;

  friend bool operator==(const RiskReport&, const RiskReport&) = default;
};

using Estimator = std::variant<LinearDesign, SPConfig>;

struct McOptions {
  std::uint64_t reps = 100'000;
  std::uint64_t seed = 0;
  /// 0 means std::thread::hardware_concurrency().
  unsigned workers = 0;
};

/// Replication r evaluates the estimator once against an oracle on stream
/// (seed, r). Results are reduced in replication order, so the report is
/// identical for any worker count.
RiskReport mc_mse(const Estimator& estimator, const Function& f, std::span<const double> grad, const NoiseSpec& noise,
                  std::span<const double> x0, const McOptions& options);

/// Exact MSE of a linear design for one fixed f under constant variance b:
/// (noiseless estimate - grad)^2 + b sum_j ||w_j||^2.
double fixed_function_mse(const LinearDesign& design, const Function& f, std::span<const double> grad,
                          std::span<const double> x0, double b);

struct BruteForceOptions {
  /// Grid resolution per free parameter.
  int grid_points = 2001;
  /// Local refinement starts taken from the best grid points (n >= 3).
  int refine_starts = 8;
};

struct BruteForceResult {
  double value;                   // minimum worst-case risk found
  LinearDesign design;            // its minimizing design
  double min_evaluated;           // smallest objective value of any design evaluated
  std::uint64_t evaluated;        // number of designs evaluated
  double asymmetric_branch_min;   // n = 2 only: best value with delta_1 != -delta_2 (+inf when all unbounded)
};

/// Minimizes exact_worst_case_risk_linear over 1-d designs with n <= 4
/// points, imposing the moment conditions by elimination.
BruteForceResult brute_force_linear_minimax(int n, double a, double b, const BruteForceOptions& options = {});

struct RateFit {
  double slope;
  double intercept;
  double r_squared;
  std::vector<std::pair<double, double>> points;
};

/// Least squares of log(risk) on log(n).
RateFit rate_fit(std::span<const std::pair<double, double>> points);

struct BlowupPoint {
  double rho;
  RiskReport empirical;
  double analytic;  // 2 rho^2 p (p - 1) / n
};

/// SP risk on f(x) = rho * 1^T (x - x0), noiseless, for each rho.
std::vector<BlowupPoint> sp_blowup_curve(std::span<const double> rho_list, int p, int n, double h,
                                         std::uint64_t reps, std::uint64_t seed, unsigned workers = 0);

/// Risks of a 1-d design under the two-point pair (f*, -f*) with gradient gap
/// eps, Gaussian noise of variance b.
struct TwoPointRisk {
  RiskReport positive;
  RiskReport negative;
  double worst() const noexcept { return positive.mse > negative.mse ? positive.mse : negative.mse; }
  double worst_std_error() const noexcept {
    return positive.mse > negative.mse ? positive.std_error : negative.std_error;
  }
};

TwoPointRisk two_point_risk(const LinearDesign& design, double eps, double a, double b, const McOptions& options);

/// Worst-case MC risk of a linear design: the design's own spike adversary
/// (common-sign rule) under Gaussian noise of variance b.
RiskReport spike_mc_mse(const LinearDesign& design, const FunctionClassSpec& spec, double b, const McOptions& options);

}  // namespace zograd
