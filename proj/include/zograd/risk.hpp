#pragma once

#include <span>
#include <string>
#include <string_view>

#include "zograd/core.hpp"
#include "zograd/estimators.hpp"

namespace zograd {

/// Closed-form minimax bounds.
enum class BoundFlavor {
  linear_lower,            // all linear estimators
  linear_lower_same_sign,  // linear estimators whose weights share a sign per point
  cfd_upper,               // worst case of per-axis CFD at its optimal step
  general_lower,           // all estimators, two-point argument
};

BoundFlavor parse_bound_flavor(std::string_view text);
std::string to_string(BoundFlavor flavor);

struct BoundQuery {
  int n = 1;
  double a = 1.0;
  double b = 1.0;
  int p = 1;
  Norm q = Norm::l2;
  BoundFlavor flavor = BoundFlavor::linear_lower;

  void validate() const;
};

/// (3 a^2 b^2 / 16)^(1/3), the constant shared by the linear bounds.
double linear_risk_constant(double a, double b);

/// factor(p, q) (3a^2b^2/16)^(1/3) n^(-2/3). The factor is p^(4/3) for
/// q in {1,2} and p^(2/3) for q = inf; with the same-sign restriction it is
/// p^(5/3) and p. Accepts the two linear flavors only.
double linear_minimax_lower(const BoundQuery& query);

/// p [ (a^2/36) delta^4 + b p / (n delta^2) ]: worst-case MSE of per-axis CFD.
double cfd_worst_case_mse(int n, double a, double b, int p, double delta);

/// (1/16) e^(-2/3) (3 a b m / n)^(2/3) with m = p^(3/2) for q = 1, else 1.
double general_minimax_lower(int n, double a, double b, int p, Norm q);

/// Evaluates any flavor. cfd_upper is cfd_worst_case_mse at the optimal step.
double bound_value(const BoundQuery& query);

/// Supremum of the MSE of a linear design over the class and noise levels up
/// to b. Unbounded (not moment matched) designs report +inf for both ends.
/// For p = 1 and for same-sign designs the two ends coincide and `exact` is
/// set; otherwise the true supremum lies in [lower, upper].
struct WorstCaseRisk {
  double lower;
  double upper;
  bool exact;

  bool bounded() const noexcept;
  /// The point value when exact, otherwise upper.
  double value() const noexcept { return upper; }
};

WorstCaseRisk exact_worst_case_risk_linear(const LinearDesign& design, double a, double b, Norm q);

/// (eps^2/16) exp(-2 n eps^3 / (9 a b m)), m = p^(3/2) for q = 1, else 1.
double le_cam_bound(double eps, int n, double a, double b, int p, Norm q);

/// The eps at which le_cam_bound peaks: (3 a b m / n)^(1/3).
double le_cam_optimal_eps(int n, double a, double b, int p, Norm q);

/// KL divergence between N(mu1, b I) and N(mu2, b I).
double kl_gaussian(std::span<const double> mu1, std::span<const double> mu2, double b);

struct MinIntegral {
  double exact;  // integral of min(p1, p2): 2 Phi(-Delta/2)
  double floor;  // (1/2) exp(-KL)
};

/// Overlap of two isotropic Gaussians and its KL floor.
MinIntegral min_integral_gaussian(std::span<const double> mu1, std::span<const double> mu2, double b);

/// Same, parameterized by the standardized separation Delta = ||mu2-mu1|| / sqrt(b).
MinIntegral min_integral_gaussian(double separation);

}  // namespace zograd
