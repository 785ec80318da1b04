#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "zograd/errors.hpp"
#include "zograd/estimators.hpp"
#include "zograd/risk.hpp"
#include "zograd/verify.hpp"
#include "zograd/worstcase.hpp"

using namespace zograd;

namespace {

const Point kOrigin{0.0};

RiskReport spike_mse(const LinearDesign& d, double b, std::uint64_t reps, std::uint64_t seed, unsigned workers = 0) {
  return spike_mc_mse(d, FunctionClassSpec::centered(1.0, d.dimension()), b, {reps, seed, workers});
}

}  // namespace

TEST(McMse, CfdOnSpikeMatchesClosedForm) {
  const auto d = cfd_design_1d(2, 1.0);
  const auto r = spike_mse(d, 1.0, 1'000'000, 11);
  EXPECT_LE(std::abs(r.mse - 0.5277777777777778), 3.0 * r.std_error);
  EXPECT_EQ(r.reps, 1'000'000u);
  EXPECT_EQ(r.evals_consumed, 2'000'000u);
}

TEST(McMse, NoiselessSpikeIsPureBias) {
  const auto d = cfd_design_1d(2, 1.0);
  const auto s = spike_adversary(d, FunctionClassSpec::centered(1.0, 1));
  const auto r = mc_mse(d, s.as_function(), s.gradient(), NoiseSpec::none(), kOrigin, {1000, 1, 0});
  EXPECT_NEAR(r.mse, 1.0 / 36.0, 1e-15);
  EXPECT_NEAR(r.bias_sq, 1.0 / 36.0, 1e-15);
  EXPECT_NEAR(r.variance, 0.0, 1e-15);
}

TEST(McMse, NoiselessLinearIsExact) {
  const Function f = [](std::span<const double> x) { return 2.0 * x[0] - x[1]; };
  const Point g{2.0, -1.0};
  const Point x0{0.3, 0.1};
  const auto r = mc_mse(cfd_design_multi(8, 2, 0.4), f, g, NoiseSpec::none(), x0, {500, 3, 0});
  EXPECT_NEAR(r.mse, 0.0, 1e-24);
  const auto sp = mc_mse(SPConfig{0.5, 4, PerturbationLaw::rademacher()},
                         [](std::span<const double> x) { return 3.0 * x[0]; }, Point{3.0}, NoiseSpec::none(), kOrigin,
                         {500, 3, 0});
  EXPECT_NEAR(sp.mse, 0.0, 1e-20);
}

TEST(McMse, DeterministicAcrossWorkers) {
  const auto d = cfd_design_1d(8, 0.6);
  const auto one = spike_mse(d, 1.0, 20'000, 5, 1);
  const auto three = spike_mse(d, 1.0, 20'000, 5, 3);
  const auto again = spike_mse(d, 1.0, 20'000, 5, 1);
  EXPECT_EQ(one, three);
  EXPECT_EQ(one, again);
  const auto other = spike_mse(d, 1.0, 20'000, 6, 1);
  EXPECT_NE(one.mse, other.mse);
}

TEST(McMse, RejectsTooFewReps) {
  EXPECT_THROW(spike_mse(cfd_design_1d(2, 1.0), 1.0, 10, 1), InputError);
}

TEST(McMse, CfdVarianceAttainsBound) {
  const int n = 6;
  const double delta = 0.7;
  const double b = 2.0;
  const std::uint64_t reps = 400'000;
  const auto r = mc_mse(cfd_design_1d(n, delta), [](std::span<const double>) { return 0.0; }, Point{0.0},
                        NoiseSpec::gaussian(b), kOrigin, {reps, 21, 0});
  const double expect = b / (n * delta * delta);
  const double se = expect * std::sqrt(2.0 / (reps - 1.0));
  EXPECT_LE(std::abs(r.variance - expect), 3.0 * se);
}

TEST(McMse, AttainmentAcrossBudgets) {
  for (int n : {2, 8, 64}) {
    const auto r = spike_mse(cfd_design_1d(n, optimal_delta(1, 1, n)), 1.0, 200'000, 100 + n);
    const double lower = linear_minimax_lower({n, 1, 1, 1, Norm::l2, BoundFlavor::linear_lower});
    EXPECT_LE(std::abs(r.mse - lower), 3.0 * r.std_error) << n;
  }
}

TEST(McMse, PerAxisSpikeTwoDimensions) {
  const double delta = optimal_delta(1, 1, 4, 2);
  const auto r = spike_mse(cfd_design_multi(4, 2, delta), 1.0, 200'000, 8);
  EXPECT_LE(std::abs(r.mse - cfd_worst_case_mse(4, 1, 1, 2, delta)), 3.0 * r.std_error);
  EXPECT_GT(r.mse, linear_minimax_lower({4, 1, 1, 2, Norm::l2, BoundFlavor::linear_lower}));
}

// The spike adversary never does better than the exact sup.
TEST(McMse, PropertyDominance) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.2, 2.0);
  for (int trial = 0; trial < 8; ++trial) {
    const int p = 1 + trial % 2;
    const auto d = cfd_design_multi(2 * p * (1 + trial % 3), p, u(rng));
    const auto r = spike_mse(d, 1.0, 50'000, 40 + trial);
    const auto w = exact_worst_case_risk_linear(d, 1.0, 1.0, Norm::l2);
    EXPECT_LE(r.mse, w.upper + 3.0 * r.std_error);
  }
}

TEST(TwoPoint, FloorForCfdAndForwardDifference) {
  for (int n : {8, 64}) {
    const double eps = std::cbrt(3.0 / n);
    const double g = general_minimax_lower(n, 1, 1, 1, Norm::l2);
    const McOptions opts{100'000, 3, 0};
    const auto cfd = two_point_risk(cfd_design_1d(n, optimal_delta(1, 1, n)), eps, 1, 1, opts);
    EXPECT_GE(cfd.worst(), g - 3.0 * cfd.worst_std_error());
    const auto ffd = two_point_risk(forward_difference_design(n, optimal_delta(1, 1, n)), eps, 1, 1, opts);
    EXPECT_GE(ffd.worst(), g - 3.0 * ffd.worst_std_error());
  }
}

TEST(FixedFunctionMse, Closed) {
  const Function f = [](std::span<const double> x) { return 0.5 * x[0] * x[0]; };
  const double g[] = {0.0};
  const double mse = fixed_function_mse(forward_difference_design(4, 0.4), f, g, kOrigin, 1.0);
  EXPECT_NEAR(mse, 0.04 + 4.0 / (4 * 0.16), 1e-12);
}

TEST(BruteForce, TwoPointsIsCfd) {
  const auto r = brute_force_linear_minimax(2, 1.0, 1.0);
  const double bound = linear_minimax_lower({2, 1, 1, 1, Norm::l2, BoundFlavor::linear_lower});
  EXPECT_NEAR(r.value / bound, 1.0, 1e-3);
  EXPECT_NEAR(r.value / 0.36056, 1.0, 1e-3);
  ASSERT_EQ(r.design.size(), 2u);
  EXPECT_NEAR(std::abs(r.design.deltas()[0][0]), 1.44227, 1.5e-3);
  EXPECT_NEAR(r.design.deltas()[0][0], -r.design.deltas()[1][0], 1e-12);
  EXPECT_NEAR(std::abs(r.design.weights()[0][0]), 0.34668, 1e-3);
  EXPECT_GE(r.min_evaluated, bound - 1e-6);
  EXPECT_TRUE(std::isinf(r.asymmetric_branch_min));
  // The analytic CFD design is at least as good as anything on the grid.
  const double cfd = exact_worst_case_risk_linear(cfd_design_1d(2, optimal_delta(1, 1, 2)), 1, 1, Norm::l2).value();
  EXPECT_LE(cfd, r.min_evaluated + 1e-12);
}

TEST(BruteForce, StepScalesWithCurvature) {
  const auto r1 = brute_force_linear_minimax(2, 1.0, 1.0);
  const auto r8 = brute_force_linear_minimax(2, 8.0, 1.0);
  EXPECT_NEAR(std::abs(r8.design.deltas()[0][0]) / std::abs(r1.design.deltas()[0][0]), 0.5, 1e-3);
}

TEST(BruteForce, LargerBudgetsRespectBound) {
  for (int n : {3, 4}) {
    const auto r = brute_force_linear_minimax(n, 1.0, 1.0, {201, 4});
    const double bound = linear_minimax_lower({n, 1, 1, 1, Norm::l2, BoundFlavor::linear_lower});
    EXPECT_GE(r.min_evaluated, bound - 1e-6) << n;
    if (n == 4) EXPECT_NEAR(r.value / bound, 1.0, 1e-3);
  }
  EXPECT_THROW(brute_force_linear_minimax(5, 1.0, 1.0), InputError);
}

TEST(RateFit, ExactPowerLaw) {
  const double c = 0.7;
  const std::vector<std::pair<double, double>> pts{
      {2.0, c * std::pow(2.0, -2.0 / 3.0)}, {8.0, c * std::pow(8.0, -2.0 / 3.0)}, {32.0, c * std::pow(32.0, -2.0 / 3.0)}};
  const auto fit = rate_fit(pts);
  EXPECT_NEAR(fit.slope, -2.0 / 3.0, 1e-12);
  EXPECT_NEAR(fit.r_squared, 1.0, 1e-12);
  EXPECT_NEAR(std::exp(fit.intercept), c, 1e-12);
  const std::vector<std::pair<double, double>> one{{2.0, 1.0}};
  EXPECT_THROW(rate_fit(one), InputError);
}

TEST(SpBlowup, ScalesWithRhoSquared) {
  const double rhos[] = {0.0, 1.0, 2.0};
  const auto curve = sp_blowup_curve(rhos, 3, 2, 1.0, 200'000, 13);
  ASSERT_EQ(curve.size(), 3u);
  EXPECT_EQ(curve[0].empirical.mse, 0.0);
  EXPECT_EQ(curve[0].analytic, 0.0);
  EXPECT_DOUBLE_EQ(curve[1].analytic, 6.0);
  EXPECT_NEAR(curve[1].empirical.mse / 6.0, 1.0, 0.05);
  EXPECT_NEAR(curve[2].empirical.mse / curve[1].empirical.mse, 4.0, 0.2);
}
