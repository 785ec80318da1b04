#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "zograd/errors.hpp"
#include "zograd/estimators.hpp"
#include "zograd/worstcase.hpp"

using namespace zograd;

TEST(FStar1d, PeakAndClamp) {
  const auto f = f_star_1d(1.0, 1.0);
  const double one[] = {1.0};
  const double two[] = {2.0};
  const double zero[] = {0.0};
  EXPECT_NEAR(f(one), 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(f.sup_abs(), 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(f.maximizer()[0], 1.0, 1e-15);
  EXPECT_EQ(f(two), 0.0);
  EXPECT_EQ(f(zero), 0.0);
  EXPECT_NEAR(f.zero_boundary()[0], std::sqrt(3.0), 1e-14);
}

TEST(FStar1d, OddAndNegated) {
  const auto f = f_star_1d(0.7, 2.3, 0.4);
  const auto g = f.negated();
  EXPECT_EQ(g.orientation(), -1);
  for (double t = -3.0; t <= 3.0; t += 0.01) {
    const double xp[] = {0.4 + t};
    const double xm[] = {0.4 - t};
    EXPECT_NEAR(f(xp), -f(xm), 1e-14);
    EXPECT_EQ(g(xp), -f(xp));
  }
  EXPECT_DOUBLE_EQ(f.gradient()[0], 0.35);
  EXPECT_DOUBLE_EQ(g.gradient()[0], -0.35);
}

TEST(FStarMulti, DiagonalL2) {
  const auto f = f_star_multi(1.0, FunctionClassSpec::centered(1.0, 4, Norm::l2));
  const auto x = f.maximizer();
  for (double v : x) EXPECT_NEAR(v, 0.5, 1e-14);
  EXPECT_NEAR(f(x), 1.0 / 3.0, 1e-14);
  EXPECT_NEAR(f.sup_abs(), 1.0 / 3.0, 1e-14);
}

TEST(FStarMulti, DiagonalL1) {
  const auto f = f_star_multi(1.0, FunctionClassSpec::centered(1.0, 4, Norm::l1));
  EXPECT_NEAR(f.sup_abs(), std::pow(4.0, -0.75) / 3.0, 1e-14);
  EXPECT_NEAR(f.sup_abs(), 0.11785, 5e-6);
  EXPECT_NEAR(f(f.maximizer()), f.sup_abs(), 1e-14);
}

TEST(FStarMulti, LinfFirstAxis) {
  const auto f = f_star_multi(1.0, FunctionClassSpec::centered(1.0, 3, Norm::linf));
  EXPECT_EQ(f.direction(), ExtremalFunction::Direction::first_axis);
  const double x0[] = {0.0, 0.0, 0.0};
  EXPECT_EQ(f(x0), 0.0);
  const auto g = f.gradient();
  EXPECT_DOUBLE_EQ(g[0], 0.5);
  EXPECT_EQ(g[1], 0.0);
  EXPECT_EQ(g[2], 0.0);
}

TEST(FStar, Validation) {
  EXPECT_THROW(f_star_1d(0.0, 1.0), InputError);
  EXPECT_THROW(f_star_1d(1.0, -1.0), InputError);
}

TEST(InverseModulus, Values) {
  EXPECT_NEAR(inverse_modulus(1.0, 1.0, 1, Norm::l2), 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(inverse_modulus(1.0, 1.0, 4, Norm::l1), 0.23570, 5e-6);
  EXPECT_NEAR(inverse_modulus(4.0, 1.0, 1, Norm::l2), 16.0 / 3.0, 1e-14);
}

TEST(InverseModulus, PropertyGridAgreement) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> logu(-2.0, 2.0);
  for (int trial = 0; trial < 30; ++trial) {
    const double eps = std::exp(logu(rng));
    const double a = std::exp(logu(rng));
    const int p = 1 + trial % 5;
    const Norm q = trial % 3 == 0 ? Norm::l1 : (trial % 3 == 1 ? Norm::l2 : Norm::linf);
    const auto f = f_star_multi(eps, FunctionClassSpec::centered(a, p, q));
    const double omega = inverse_modulus(eps, a, p, q);
    EXPECT_NEAR(2.0 * grid_sup_abs(f) / omega, 1.0, 1e-6);
    EXPECT_NEAR(2.0 * f.sup_abs() / omega, 1.0, 1e-12);
  }
}

TEST(ExtremalFunction, PropertyInClass) {
  for (int p : {1, 2, 3}) {
    for (Norm q : {Norm::l1, Norm::l2, Norm::linf}) {
      const auto spec = FunctionClassSpec::centered(1.7, p, q);
      const auto f = f_star_multi(0.9, spec);
      const auto probes = default_probe_grid(spec, norm(f.zero_boundary(), Norm::linf) / 2.0, 1001, 300'000);
      EXPECT_EQ(remainder_violation(f.as_function(), f.gradient(), Matrix::zeros(static_cast<std::size_t>(p)), spec,
                                    probes),
                0.0);
    }
  }
}

// Odd cubic class members with slope eps/2 dominate the f* envelope.
TEST(ExtremalFunction, PropertyEnvelope) {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const double eps = 1.2;
  const double a = 0.8;
  for (int trial = 0; trial < 100; ++trial) {
    const double c3 = u(rng) * a / 6.0;
    for (double x = -4.0; x <= 4.0; x += 0.05) {
      const double f = eps / 2.0 * x + c3 * x * x * x;
      const double envelope = eps / 2.0 * std::abs(x) - a / 6.0 * std::abs(x * x * x);
      EXPECT_GE(std::abs(f), envelope - 1e-12);
    }
  }
}

TEST(SpikeAdversary, OneDimensional) {
  const auto s = spike_adversary(cfd_design_1d(2, 1.0), FunctionClassSpec::centered(1.0, 1));
  const double plus[] = {1.0};
  const double minus[] = {-1.0};
  const double other[] = {0.5};
  EXPECT_NEAR(s(plus), 1.0 / 6.0, 1e-16);
  EXPECT_NEAR(s(minus), -1.0 / 6.0, 1e-16);
  EXPECT_EQ(s(other), 0.0);
  EXPECT_EQ(s.gradient()[0], 0.0);
}

TEST(SpikeAdversary, ZeroWeightsGiveZeroFunction) {
  const LinearDesign d({{1.0}, {-2.0}}, {{0.0}, {0.0}});
  const auto s = spike_adversary(d, FunctionClassSpec::centered(1.0, 1));
  for (const auto& x : s.support()) EXPECT_EQ(s(x), 0.0);
}

TEST(SpikeAdversary, MultiDimensionalComponent) {
  const auto s = spike_adversary(cfd_design_multi(4, 2, 1.0), FunctionClassSpec::centered(1.0, 2), SpikeSign::axis(0));
  const double e1[] = {1.0, 0.0};
  const double me1[] = {-1.0, 0.0};
  EXPECT_NEAR(s(e1), 1.0 / 6.0, 1e-16);
  EXPECT_NEAR(s(me1), -1.0 / 6.0, 1e-16);
  EXPECT_EQ(s.component(), 0);
}

TEST(SpikeAdversary, CommonSignCoversAllAxes) {
  const auto s = spike_adversary(cfd_design_multi(4, 2, 1.0), FunctionClassSpec::centered(1.0, 2),
                                 SpikeSign::common_sign());
  const double e2[] = {0.0, 1.0};
  const double me2[] = {0.0, -1.0};
  EXPECT_NEAR(s(e2), 1.0 / 6.0, 1e-16);
  EXPECT_NEAR(s(me2), -1.0 / 6.0, 1e-16);
  EXPECT_EQ(s.component(), -1);
}

TEST(SpikeAdversary, Errors) {
  const LinearDesign dup({{1.0}, {1.0}}, {{0.5}, {-0.5}});
  EXPECT_THROW(spike_adversary(dup, FunctionClassSpec::centered(1.0, 1)), InputError);
  EXPECT_THROW(spike_adversary(cfd_design_1d(2, 1.0), FunctionClassSpec::centered(1.0, 2)), InputError);
  EXPECT_THROW(spike_adversary(cfd_design_multi(4, 2, 1.0), FunctionClassSpec::centered(1.0, 2), SpikeSign::axis(2)),
               InputError);
}

TEST(SpikeAdversary, PropertyInClass) {
  for (Norm q : {Norm::l1, Norm::l2, Norm::linf}) {
    const auto spec = FunctionClassSpec::centered(1.0, 2, q);
    const auto s = spike_adversary(cfd_design_multi(8, 2, 0.6), spec);
    auto probes = default_probe_grid(spec, 0.3, 201);
    probes.insert(probes.end(), s.support().begin(), s.support().end());
    EXPECT_EQ(remainder_violation(s.as_function(), s.gradient(), Matrix::zeros(2), spec, probes), 0.0);
  }
}
