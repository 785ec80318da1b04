#pragma once

#include <map>
#include <optional>
#include <span>
#include <vector>

#include "zograd/core.hpp"
#include "zograd/estimators.hpp"

namespace zograd {

/// The odd extremal member of the class that has gradient xi at x0 and stays
/// as close to zero as the remainder bound allows:
///
///   f(x) = sign(xi.d) [ |xi.d| - (a/6) ||d||_q^3 ]_+ ,   d = x - x0.
///
/// For q in {1, 2} xi is eps/(2 sqrt p) on every axis; for q = inf it is
/// eps/2 on the first axis only. A negated copy is the other half of the
/// two-point hypothesis pair.
class ExtremalFunction {
 public:
  enum class Direction { diagonal, first_axis };

  ExtremalFunction(double eps, FunctionClassSpec spec);

  double operator()(std::span<const double> x) const;
  Function as_function() const;

  double eps() const noexcept { return eps_; }
  const FunctionClassSpec& spec() const noexcept { return spec_; }
  Direction direction() const noexcept { return direction_; }
  /// +1 for f*, -1 for -f*.
  int orientation() const noexcept { return orientation_; }

  /// The direction xi (times orientation), which is also the gradient at x0.
  Point gradient() const;

  /// Closed-form sup_x |f(x)|; equals inverse_modulus(eps, ...) / 2.
  double sup_abs() const;

  /// A point where |f| attains sup_abs().
  Point maximizer() const;

  /// Point on the maximizing ray beyond which the clamp keeps f at zero.
  Point zero_boundary() const;

  ExtremalFunction negated() const;

 private:
  double ray_length_at(double ratio) const;

  double eps_;
  FunctionClassSpec spec_;
  Direction direction_;
  int orientation_ = 1;
};

/// One-dimensional extremal function centred at x0.
ExtremalFunction f_star_1d(double eps, double a, double x0 = 0.0);

/// Multi-dimensional extremal function for the class described by spec.
ExtremalFunction f_star_multi(double eps, const FunctionClassSpec& spec);

/// The smallest sup-distance between two class members whose gradients at x0
/// differ by eps in l2: (2 eps / 3) sqrt(eps / a), times p^(-3/4) for q = 1.
double inverse_modulus(double eps, double a, int p, Norm q);

/// Grid estimate of sup |f| along the segment from x0 to the zero boundary.
double grid_sup_abs(const ExtremalFunction& f, std::size_t points = 100'000);

/// How spike signs are chosen from the design weights.
struct SpikeSign {
  enum class Rule {
    component,       // s_j = sign((w_j)_i) for a fixed component i (0-based)
    auto_component,  // component maximizing sum_j |(w_j)_i| ||delta_j||_q^3
    common,          // s_j = sign(sum_i (w_j)_i); the common sign for same-sign designs
  };
  Rule rule = Rule::auto_component;
  int component = 0;

  static SpikeSign axis(int i) { return {Rule::component, i}; }
  static SpikeSign automatic() { return {Rule::auto_component, 0}; }
  static SpikeSign common_sign() { return {Rule::common, 0}; }
};

/// Class member that is (a/6)||delta_j||_q^3 * s_j at each design point
/// x0 + delta_j and zero everywhere else. Gradient and Hessian at x0 vanish.
class SpikeAdversary {
 public:
  double operator()(std::span<const double> x) const;
  Function as_function() const;

  const FunctionClassSpec& spec() const noexcept { return spec_; }
  const std::vector<int>& signs() const noexcept { return signs_; }
  /// Component whose signs were used, or -1 for the common-sign rule.
  int component() const noexcept { return component_; }
  /// Design points x0 + delta_j, in design order.
  const std::vector<Point>& support() const noexcept { return support_; }
  Point gradient() const { return Point(static_cast<std::size_t>(spec_.p()), 0.0); }

 private:
  friend SpikeAdversary spike_adversary(const LinearDesign&, const FunctionClassSpec&, SpikeSign);
  explicit SpikeAdversary(FunctionClassSpec spec) : spec_(std::move(spec)) {}

  FunctionClassSpec spec_;
  std::map<Point, double> heights_;
  std::vector<int> signs_;
  std::vector<Point> support_;
  int component_ = 0;
};

/// Builds the spike adversary of a design. Duplicate design points must carry
/// equal weights.
SpikeAdversary spike_adversary(const LinearDesign& design, const FunctionClassSpec& spec,
                               SpikeSign sign = SpikeSign::automatic());

}  // namespace zograd
