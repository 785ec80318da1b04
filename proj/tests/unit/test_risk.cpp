#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "zograd/errors.hpp"
#include "zograd/estimators.hpp"
#include "zograd/numeric.hpp"
#include "zograd/risk.hpp"

using namespace zograd;

namespace {

double lin(int n, double a, double b, int p = 1, Norm q = Norm::l2,
           BoundFlavor flavor = BoundFlavor::linear_lower) {
  return linear_minimax_lower({n, a, b, p, q, flavor});
}

// Trapezoid integral of min of two unit-variance normal densities at
// distance delta apart, computed directly rather than via the CDF.
double overlap_by_quadrature(double delta) {
  const double lo = -12.0 - delta;
  const double hi = 12.0 + delta;
  const int steps = 400'000;
  const double h = (hi - lo) / steps;
  CompensatedSum acc;
  for (int k = 0; k <= steps; ++k) {
    const double x = lo + k * h;
    const double p1 = std::exp(-0.5 * x * x);
    const double p2 = std::exp(-0.5 * (x - delta) * (x - delta));
    acc.add((k == 0 || k == steps ? 0.5 : 1.0) * std::min(p1, p2));
  }
  return acc.value() * h / std::sqrt(2.0 * M_PI);
}

}  // namespace

TEST(LinearLower, Values) {
  EXPECT_NEAR(lin(1, 1, 1), std::cbrt(3.0 / 16.0), 1e-15);
  EXPECT_NEAR(lin(1, 1, 1), 0.57236, 5e-6);
  EXPECT_NEAR(lin(4, 1, 1, 2, Norm::l2), 0.57236, 5e-6);
  EXPECT_NEAR(lin(4, 1, 1, 2, Norm::linf), 0.36056, 5e-6);
  EXPECT_NEAR(lin(4, 1, 1, 2, Norm::l2, BoundFlavor::linear_lower_same_sign), 0.72112, 5e-6);
  EXPECT_NEAR(lin(4, 1, 1, 2, Norm::linf, BoundFlavor::linear_lower_same_sign), 2.0 * lin(4, 1, 1, 1), 1e-14);
  EXPECT_THROW(lin(0, 1, 1), InputError);
  EXPECT_THROW(lin(1, 0, 1), InputError);
  EXPECT_THROW(lin(1, 1, 1, 1, Norm::l2, BoundFlavor::general_lower), InputError);
}

TEST(CfdWorstCase, Values) {
  EXPECT_NEAR(cfd_worst_case_mse(2, 1, 1, 1, optimal_delta(1, 1, 2)), 0.36056, 5e-6);
  EXPECT_NEAR(cfd_worst_case_mse(64, 1, 1, 1, optimal_delta(1, 1, 64)), 0.035772, 5e-7);
  EXPECT_NEAR(cfd_worst_case_mse(4, 1, 1, 2, optimal_delta(1, 1, 4, 2)), 0.72112, 5e-6);
  EXPECT_NEAR(cfd_worst_case_mse(2, 1, 1, 1, 1.0), 1.0 / 36.0 + 0.5, 1e-15);
  EXPECT_THROW(cfd_worst_case_mse(3, 1, 1, 1, 1.0), InputError);
  EXPECT_THROW(cfd_worst_case_mse(2, 1, 1, 1, 0.0), InputError);
}

TEST(CfdWorstCase, PropertyMinimizedAtOptimalDelta) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> logu(-2.0, 2.0);
  for (int trial = 0; trial < 30; ++trial) {
    const double a = std::exp(logu(rng));
    const double b = std::exp(logu(rng));
    const int p = 1 + trial % 3;
    const int n = 2 * p * (1 + trial % 7);
    const double star = optimal_delta(a, b, n, p);
    const auto best = log_golden_section_minimize(
        [&](double d) { return exact_worst_case_risk_linear(cfd_design_multi(n, p, d), a, b, Norm::l2).value(); },
        star / 100.0, star * 100.0, 1e-12);
    EXPECT_NEAR(best.x / star, 1.0, 1e-6);
  }
}

TEST(ExactWorstCase, CfdClosedForms) {
  const auto r = exact_worst_case_risk_linear(cfd_design_1d(2, 1.0), 1, 1, Norm::l2);
  EXPECT_TRUE(r.exact);
  EXPECT_NEAR(r.value(), 1.0 / 36.0 + 0.5, 1e-15);
  EXPECT_NEAR(r.value(), 0.52778, 5e-6);
  const auto opt = exact_worst_case_risk_linear(cfd_design_1d(2, optimal_delta(1, 1, 2)), 1, 1, Norm::l2);
  EXPECT_NEAR(opt.value(), lin(2, 1, 1), 1e-14);
}

TEST(ExactWorstCase, ForwardDifferenceUnbounded) {
  for (int n : {2, 8, 64}) {
    const auto r = exact_worst_case_risk_linear(forward_difference_design(n, 0.3), 1, 1, Norm::l2);
    EXPECT_TRUE(std::isinf(r.value()));
    EXPECT_FALSE(r.bounded());
  }
}

TEST(ExactWorstCase, MultiDimMatchesClosedForm) {
  const double d = optimal_delta(1, 1, 4, 2);
  const auto r = exact_worst_case_risk_linear(cfd_design_multi(4, 2, d), 1, 1, Norm::l2);
  EXPECT_TRUE(r.exact);
  EXPECT_NEAR(r.value(), cfd_worst_case_mse(4, 1, 1, 2, d), 1e-14);
}

TEST(ExactWorstCase, MixedSignIsBracket) {
  // Shared points with opposite-sign components: only an envelope is known.
  const LinearDesign d({{1.0, 1.0}, {-1.0, -1.0}, {1.0, -1.0}, {-1.0, 1.0}},
                       {{0.25, 0.25}, {-0.25, -0.25}, {0.25, -0.25}, {-0.25, 0.25}});
  const auto r = exact_worst_case_risk_linear(d, 1, 1, Norm::l2);
  ASSERT_TRUE(moment_conditions(d).matched);
  EXPECT_FALSE(r.exact);
  EXPECT_LT(r.lower, r.upper);
}

TEST(GeneralLower, Values) {
  const double g1 = std::exp(-2.0 / 3.0) / 16.0 * std::cbrt(9.0);
  EXPECT_NEAR(general_minimax_lower(1, 1, 1, 1, Norm::l2), g1, 1e-15);
  EXPECT_NEAR(general_minimax_lower(1, 1, 1, 1, Norm::l2), 0.0667, 5e-5);
  EXPECT_NEAR(general_minimax_lower(1, 1, 1, 4, Norm::l1), 4.0 * g1, 1e-14);
  EXPECT_NEAR(general_minimax_lower(1, 1, 1, 4, Norm::l1), 0.26699, 5e-6);
  EXPECT_NEAR(general_minimax_lower(8, 1, 1, 1, Norm::l2), 0.016687, 5e-7);
  EXPECT_NEAR(general_minimax_lower(3, 2, 1, 5, Norm::linf), general_minimax_lower(3, 2, 1, 1, Norm::l2), 1e-16);
}

TEST(GeneralLower, PropertyOrderingAndRatio) {
  const double ratio = std::exp(-2.0 / 3.0) / 16.0 * std::pow(3.0, 2.0 / 3.0) / std::cbrt(3.0 / 16.0);
  for (double a : {0.01, 0.1, 1.0, 10.0, 100.0}) {
    for (double b : {0.01, 0.1, 1.0, 10.0, 100.0}) {
      for (int n : {2, 4, 16, 128, 1024}) {
        const double l = lin(n, a, b);
        const double g = general_minimax_lower(n, a, b, 1, Norm::l2);
        EXPECT_LT(g, l);
        EXPECT_NEAR(g / l, ratio, 1e-12);
        EXPECT_NEAR(cfd_worst_case_mse(n, a, b, 1, optimal_delta(a, b, n)) / l, 1.0, 1e-12);
      }
    }
  }
}

TEST(GeneralLower, PropertyDimensionGap) {
  for (int p : {1, 2, 3, 5, 8}) {
    for (Norm q : {Norm::l1, Norm::l2}) {
      const int n = 2 * p * 3;
      const double lower = lin(n, 1.3, 0.7, p, q);
      const double upper = bound_value({n, 1.3, 0.7, p, q, BoundFlavor::cfd_upper});
      EXPECT_NEAR(upper / lower, std::cbrt(static_cast<double>(p)), 1e-12);
    }
  }
}

TEST(LeCam, Values) {
  const double eps = le_cam_optimal_eps(5, 1.0, 2.0, 1, Norm::l2);
  EXPECT_NEAR(eps, std::cbrt(6.0 / 5.0), 1e-15);
  EXPECT_NEAR(le_cam_bound(eps, 5, 1.0, 2.0, 1, Norm::l2), general_minimax_lower(5, 1.0, 2.0, 1, Norm::l2), 1e-15);
  EXPECT_NEAR(le_cam_bound(1.0, 9, 1, 1, 1, Norm::l2), std::exp(-2.0) / 16.0, 1e-16);
  EXPECT_NEAR(le_cam_bound(1.0, 9, 1, 1, 1, Norm::l2), 0.008459, 1e-6);
  EXPECT_LT(le_cam_bound(1e-8, 9, 1, 1, 1, Norm::l2), 1e-16);
  EXPECT_THROW(le_cam_bound(0.0, 9, 1, 1, 1, Norm::l2), InputError);
}

TEST(LeCam, PropertyNeverAboveGeneral) {
  for (int n : {1, 7, 100}) {
    const double g = general_minimax_lower(n, 1.0, 1.0, 3, Norm::l1);
    for (double eps = 1e-3; eps < 20.0; eps *= 1.1) EXPECT_LE(le_cam_bound(eps, n, 1.0, 1.0, 3, Norm::l1), g * (1 + 1e-15));
  }
}

TEST(Kl, Values) {
  const double m1[] = {0.0, 0.0};
  const double m2[] = {1.0, 1.0};
  EXPECT_EQ(kl_gaussian(m1, m1, 1.0), 0.0);
  EXPECT_DOUBLE_EQ(kl_gaussian(m1, m2, 1.0), 1.0);
  const double s1[] = {0.3, -1.0};
  const double s2[] = {2.0, 0.5};
  const double c1[] = {0.9, -3.0};
  const double c2[] = {6.0, 1.5};
  EXPECT_NEAR(kl_gaussian(c1, c2, 2.0), 9.0 * kl_gaussian(s1, s2, 2.0), 1e-12);
  const double bad[] = {1.0};
  EXPECT_THROW(kl_gaussian(m1, bad, 1.0), InputError);
}

TEST(MinIntegral, Values) {
  const auto at0 = min_integral_gaussian(0.0);
  EXPECT_DOUBLE_EQ(at0.exact, 1.0);
  EXPECT_DOUBLE_EQ(at0.floor, 0.5);
  const auto r2 = min_integral_gaussian(std::sqrt(2.0));
  EXPECT_NEAR(r2.exact, 0.47950, 5e-6);
  EXPECT_NEAR(r2.floor, 0.5 * std::exp(-1.0), 1e-16);
  EXPECT_NEAR(r2.floor, 0.18394, 5e-6);

  const double m1[] = {0.0, 0.0};
  const double m2[] = {1.0, 1.0};
  const auto v = min_integral_gaussian(m1, m2, 1.0);
  EXPECT_NEAR(v.exact, r2.exact, 1e-15);
  EXPECT_THROW(min_integral_gaussian(-1.0), InputError);
}

TEST(MinIntegral, AgreesWithQuadrature) {
  for (double delta : {0.0, 0.5, std::sqrt(2.0), 3.0, 10.0}) {
    const double q = overlap_by_quadrature(delta);
    EXPECT_NEAR(min_integral_gaussian(delta).exact / q, 1.0, 1e-6) << delta;
  }
  const auto far = min_integral_gaussian(10.0);
  EXPECT_GT(far.exact, far.floor);
}

TEST(MinIntegral, PropertyExactAboveFloor) {
  for (int k = 0; k <= 10000; ++k) {
    const auto m = min_integral_gaussian(k * 1e-3);
    ASSERT_GE(m.exact, m.floor) << k;
  }
}

TEST(BoundQuery, Parsing) {
  EXPECT_EQ(parse_bound_flavor("cfd-upper"), BoundFlavor::cfd_upper);
  EXPECT_EQ(to_string(BoundFlavor::linear_lower_same_sign), "linear-lower-same-sign");
  EXPECT_THROW(parse_bound_flavor("upper"), InputError);
  EXPECT_THROW(bound_value({3, 1, 1, 1, Norm::l2, BoundFlavor::cfd_upper}), InputError);
}
