#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace zograd {

/// Neumaier compensated accumulator. Reductions in the library always add in
/// a fixed order through this so results do not depend on worker count.
class CompensatedSum {
 public:
  void add(double x) noexcept {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const noexcept { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

double compensated_sum(std::span<const double> xs) noexcept;

struct ScalarMinimum {
  double x;
  double value;
};

/// Golden-section search for a unimodal objective on [lo, hi].
ScalarMinimum golden_section_minimize(const std::function<double(double)>& objective, double lo, double hi,
                                      double x_tol = 1e-12, int max_iter = 500);

/// Golden-section on log(x) over [lo, hi], lo > 0.
ScalarMinimum log_golden_section_minimize(const std::function<double(double)>& objective, double lo, double hi,
                                          double rel_tol = 1e-12);

struct SimplexMinimum {
  std::vector<double> x;
  double value;
  int iterations;
};

/// Nelder-Mead on an unconstrained objective; infeasible points may return +inf.
SimplexMinimum nelder_mead_minimize(const std::function<double(std::span<const double>)>& objective,
                                    std::vector<double> start, double initial_step, double f_tol = 1e-14,
                                    int max_iter = 20000);

/// Standard normal CDF.
double normal_cdf(double x) noexcept;

}  // namespace zograd
