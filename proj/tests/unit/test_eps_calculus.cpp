#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "colombeau/eps_calculus.hpp"
#include "colombeau/errors.hpp"
#include "generators.hpp"

using namespace colombeau;

namespace {

const std::vector<int> kOrders = default_orders();

}  // namespace

TEST(EpsGrid, DyadicValuesAndActiveSet) {
  const EpsGrid g = EpsGrid::dyadic(3, 20, 0.125);
  ASSERT_EQ(g.size(), 18u);
  EXPECT_EQ(g[0], 0.125);
  EXPECT_EQ(g[17], std::ldexp(1.0, -20));
  EXPECT_EQ(g.active_count(), 18u);
  EXPECT_EQ(g.with_eps0(0.01).active_indices().front(), 4u);  // 2^-7 is the first below 0.01
}

TEST(EpsGrid, RejectsUnsortedValues) {
  EXPECT_THROW(EpsGrid({0.1, 0.5}, 1.0), Error);
}

TEST(ClassifyGrowth, PowerLawIsModerateWithExactOrder) {
  const EpsGrid g = EpsGrid::dyadic(3, 20, 0.125);
  const auto net = NumberNet::from(g, [](double e) { return std::pow(e, -3); });
  const GrowthClass c = classify_growth(net, kOrders);
  EXPECT_EQ(c.kind, GrowthKind::Moderate);
  EXPECT_EQ(c.order, 3);
  EXPECT_NEAR(c.fit.slope, -3.0, 1e-9);
}

TEST(ClassifyGrowth, ExpOfInverseIsSuperPolynomial) {
  const EpsGrid g = EpsGrid::dyadic(0, 9, 1.0);
  const auto net = NumberNet::from(g, [](double e) { return std::exp(1.0 / e); });
  EXPECT_EQ(classify_growth(net, kOrders).kind, GrowthKind::SuperPolynomial);
}

TEST(ClassifyGrowth, ZeroIsNegligibleToEveryOrder) {
  const EpsGrid g = EpsGrid::dyadic();
  const GrowthClass c = classify_growth(NumberNet::constant(g, 0.0), kOrders);
  EXPECT_EQ(c.kind, GrowthKind::Negligible);
  EXPECT_EQ(c.order, kOrders.back());
}

TEST(ClassifyGrowth, RejectsEmptyOrderList) {
  EXPECT_THROW(classify_growth(NumberNet::constant(EpsGrid::dyadic(), 1.0), {}), Error);
}

TEST(NetsEquivalent, Examples) {
  const EpsGrid g = EpsGrid::dyadic();
  const auto one = NumberNet::constant(g, 1.0);
  EXPECT_TRUE(nets_equivalent(one, one, 5).equivalent);
  const auto b10 = NumberNet::from(g, [](double e) { return 1.0 + std::pow(e, 10); });
  EXPECT_TRUE(nets_equivalent(one, b10, 5).equivalent);
  const auto b2 = NumberNet::from(g, [](double e) { return 1.0 + e * e; });
  const auto r = nets_equivalent(one, b2, 5);
  EXPECT_FALSE(r.equivalent);
  // the difference is eps^2: bounds hold up to m = 2 and fail at 3
  EXPECT_EQ(r.difference.kind, GrowthKind::Negligible);
  EXPECT_EQ(r.difference.order, 2);
}

TEST(NearStandard, Examples) {
  const EpsGrid g = EpsGrid::dyadic();
  const auto lin = PointNet::from(g, 1, [](double e, std::span<double> x) { x[0] = 0.3 + e; });
  auto r = near_standard_limit(lin);
  ASSERT_TRUE(r.limit.has_value());
  EXPECT_NEAR((*r.limit)[0], 0.3, 1e-6);
  EXPECT_FALSE(r.standard);

  const auto osc = PointNet::from(g, 1, [](double e, std::span<double> x) { x[0] = std::sin(1.0 / e); });
  EXPECT_FALSE(near_standard_limit(osc).limit.has_value());

  const double c[2] = {1.5, -2.0};
  r = near_standard_limit(PointNet::constant(g, c));
  ASSERT_TRUE(r.limit.has_value());
  EXPECT_EQ((*r.limit)[0], 1.5);
  EXPECT_EQ((*r.limit)[1], -2.0);
  EXPECT_TRUE(r.standard);
}

TEST(ClassifyGrowthProperty, ModerateIsMonotoneInTheOrder) {
  const EpsGrid g = EpsGrid::dyadic();
  int moderate = 0;
  gen::for_all(40, 11, [&](gen::Rng& rng, int c) {
    SCOPED_TRACE("case " + std::to_string(c));
    int N = 0;
    const NumberNet base = gen::power_net(rng, g, 0, 6, &N);
    // wobble: |r| in [c eps^-N, 1.1 c eps^-N]
    std::vector<double> s = base.samples();
    for (double& v : s) v *= rng.uniform(1.0, 1.1);
    const NumberNet net(g, s);
    const GrowthClass all = classify_growth(net, kOrders);
    if (all.kind != GrowthKind::Moderate) return;  // the property is conditional
    ++moderate;
    EXPECT_LE(all.order, N + 1);
    for (int n : kOrders) {
      if (n <= all.order) continue;
      const int one[1] = {n};
      const GrowthClass k = classify_growth(net, one);
      EXPECT_EQ(k.kind, GrowthKind::Moderate) << "N' = " << n;
      EXPECT_EQ(k.order, n);
    }
  });
  EXPECT_GE(moderate, 30);
}

TEST(NetsEquivalentProperty, IsAnEquivalenceRelation) {
  const EpsGrid g = EpsGrid::dyadic();
  gen::for_all(60, 12, [&](gen::Rng& rng, int c) {
    SCOPED_TRACE("case " + std::to_string(c));
    const int m = rng.integer(1, 6);
    const double base = rng.uniform(-2, 2);
    auto make = [&] {
      const int k = rng.integer(1, 10);
      const double a = rng.uniform(-1, 1);
      return NumberNet::from(g, [=](double e) { return base + a * std::pow(e, k); });
    };
    const NumberNet a = make(), b = make(), d = make();
    EXPECT_TRUE(nets_equivalent(a, a, m).equivalent);
    const bool ab = nets_equivalent(a, b, m).equivalent;
    EXPECT_EQ(ab, nets_equivalent(b, a, m).equivalent);
    const bool bd = nets_equivalent(b, d, m).equivalent;
    if (ab && bd) {
      EXPECT_TRUE(nets_equivalent(a, d, m).equivalent);
    }
  });
}

TEST(ClassifyGrowthProperty, NegligiblePerturbationKeepsModerateOrder) {
  const EpsGrid g = EpsGrid::dyadic();
  gen::for_all(40, 13, [&](gen::Rng& rng, int c) {
    SCOPED_TRACE("case " + std::to_string(c));
    const NumberNet mod = gen::power_net(rng, g, 0, 5);
    const int k = rng.integer(4, 12);
    const double a = rng.uniform(-1, 1);
    const NumberNet neg = NumberNet::from(g, [=](double e) { return a * std::pow(e, k); });
    const GrowthClass before = classify_growth(mod, kOrders);
    ASSERT_EQ(before.kind, GrowthKind::Moderate);
    const GrowthClass after = classify_growth(mod + neg, kOrders);
    EXPECT_EQ(after.kind, GrowthKind::Moderate);
    EXPECT_EQ(after.order, before.order);
  });
}

TEST(Fits, LogLogAndLogInverse) {
  const EpsGrid g = EpsGrid::dyadic();
  const auto p = NumberNet::from(g, [](double e) { return 3.0 * std::sqrt(e); });
  const LogLogFit f = fit_loglog(p);
  EXPECT_NEAR(f.slope, 0.5, 1e-12);
  EXPECT_NEAR(std::exp(f.intercept), 3.0, 1e-10);
  const auto l = NumberNet::from(g, [](double e) { return 2.0 + 0.25 * std::log(1.0 / e); });
  const LinearFit lf = fit_vs_log_inverse(l);
  EXPECT_NEAR(lf.slope, 0.25, 1e-12);
  EXPECT_NEAR(lf.intercept, 2.0, 1e-10);
}

TEST(CheckBounded, ConstantVersusGrowing) {
  const EpsGrid g = EpsGrid::dyadic();
  EXPECT_TRUE(check_bounded(NumberNet::constant(g, 4.0)).bounded);
  const auto r = check_bounded(NumberNet::from(g, [](double e) { return 2.0 / e; }));
  EXPECT_FALSE(r.bounded);
  EXPECT_NEAR(r.growth_order, 1.0, 1e-9);
}
