#include <cmath>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "colombeau/gf_core.hpp"
#include "colombeau/rhs_dsl.hpp"
#include "generators.hpp"

using namespace colombeau;

namespace {

const EpsGrid kGrid = EpsGrid::dyadic();
const std::vector<int> kOrders = default_orders();

FunctionNet net1(const std::string& src, const std::string& var, const Box& dom) {
  return parse_net({src}, dsl::Signature({var}), kGrid, dom);
}

// f(x) = x/2 + atan(sqrt2 x) / (2 sqrt2), inverted by Newton.
double f_inverse(double s) {
  const double r2 = std::sqrt(2.0);
  double x = 2.0 * s;
  for (int k = 0; k < 60; ++k) {
    const double f = x / 2 + std::atan(r2 * x) / (2 * r2) - s;
    const double df = 0.5 + 0.5 / (1 + 2 * x * x);
    const double step = f / df;
    x -= step;
    if (std::abs(step) <= 1e-15 * (1 + std::abs(x))) break;
  }
  return x;
}

double max_active(const NumberNet& n) {
  double m = 0.0;
  for (std::size_t i : n.grid().active_indices()) m = std::max(m, n[i]);
  return m;
}

}  // namespace

TEST(SupOnCompact, Examples) {
  const auto f = net1("x/eps^2", "x", Box::interval(-1, 2));
  const NumberNet s = sup_on_compact(f, Box::interval(0, 1));
  for (std::size_t i : kGrid.active_indices()) EXPECT_DOUBLE_EQ(s[i], 1.0 / (kGrid[i] * kGrid[i]));
  const auto c = classify_growth(s, kOrders);
  EXPECT_EQ(c.kind, GrowthKind::Moderate);
  EXPECT_EQ(c.order, 2);

  const EpsGrid small = EpsGrid::dyadic(0, 9, 1.0);
  const auto e = parse_net({"exp(t/eps)"}, dsl::Signature({"t"}), small, Box::interval(-1, 1));
  EXPECT_EQ(classify_growth(sup_on_compact(e, Box::interval(-1, 1)), kOrders).kind, GrowthKind::SuperPolynomial);

  const auto z = net1("0", "x", Box::interval(-1, 1));
  EXPECT_EQ(classify_growth(sup_on_compact(z, Box::interval(-1, 1)), kOrders).kind, GrowthKind::Negligible);
}

TEST(SupOnCompact, DerivativeOrders) {
  const auto f = net1("sin(x/eps)", "x", Box::interval(-2, 2));
  const std::size_t dd[2] = {0, 0};
  const NumberNet s = sup_on_compact(f, Box::interval(-1, 1), dd);
  const auto c = classify_growth(s, kOrders);
  EXPECT_EQ(c.kind, GrowthKind::Moderate);
  EXPECT_EQ(c.order, 2);
}

TEST(CheckCBounded, ArctanIsCBounded) {
  const auto f = net1("atan(t/eps)", "t", Box::interval(-2, 2));
  const CBoundResult r = check_cbounded(f, Box::interval(-1, 1), Box::interval(-2, 2));
  ASSERT_TRUE(r.ok());
  const Box& L = r.certificate->target;
  EXPECT_GE(L.lower(0), -std::numbers::pi / 2 - 0.25);
  EXPECT_LE(L.upper(0), std::numbers::pi / 2 + 0.25);
  EXPECT_TRUE(Box::interval(-2, 2).compactly_contains(L));
}

TEST(CheckCBounded, ArctanExampleSolutionIsNot) {
  const auto f = FunctionNet::from_lambda(kGrid, Box::interval(-2, 2), 1,
                                          [](double eps, std::span<const double> x, std::span<double> out) {
                                            out[0] = f_inverse(x[0] / eps);
                                          });
  const CBoundResult r = check_cbounded(f, Box::interval(-1, 1), Box::whole_space(1));
  EXPECT_FALSE(r.ok());
  ASSERT_TRUE(r.failure.has_value());
  // f^-1(s) ~ 2s for large s, so sup ~ 2/eps
  const auto c = classify_growth(r.sup_norm, kOrders);
  EXPECT_EQ(c.kind, GrowthKind::Moderate);
  EXPECT_EQ(c.order, 1);
  EXPECT_NEAR(c.fit.slope, -1.0, 0.05);
}

TEST(CheckCBounded, ConstantNet) {
  const auto f = net1("0.7", "t", Box::interval(-1, 1));
  const CBoundResult r = check_cbounded(f, Box::interval(-0.5, 0.5), Box::interval(0, 1));
  ASSERT_TRUE(r.ok());
  const double c = 0.7;
  EXPECT_TRUE(r.certificate->target.contains(std::span<const double>(&c, 1)));
}

TEST(Compose, RefusedWithoutCertificate) {
  const auto u = net1("t", "t", Box::interval(0, 1));
  const auto v = net1("y", "y", Box::interval(-1, 2));
  EXPECT_THROW(compose(v, u, std::nullopt), Error);
}

TEST(Compose, Examples) {
  const Box K = Box::interval(0, 1);
  const auto u = net1("t + eps", "t", K);
  const Box V = Box::interval(-1, 3);
  const auto cert = check_cbounded(u, K, V).certificate;
  ASSERT_TRUE(cert);
  const auto id = compose(net1("y", "y", V), u, cert);
  const auto sq = compose(net1("y^2", "y", V), u, cert);
  for (std::size_t i : kGrid.active_indices()) {
    for (double t : {0.0, 0.3, 1.0}) {
      const double e = kGrid[i];
      EXPECT_EQ(id.scalar(e, std::span<const double>(&t, 1)), t + e);
      EXPECT_DOUBLE_EQ(sq.scalar(e, std::span<const double>(&t, 1)), (t + e) * (t + e));
    }
  }

  // g(H_eps(t)) with the certificate coming from |H_eps| <= ||rho||_L1 = 1
  const Box T = Box::interval(-1, 1);
  const auto H = net1("H(t)", "t", T);
  const auto hc = check_cbounded(H, T, Box::interval(-2, 2)).certificate;
  ASSERT_TRUE(hc);
  EXPECT_GE(hc->target.lower(0), -1.5);
  EXPECT_LE(hc->target.upper(0), 1.5);
  const auto gH = compose(net1("atan(y)", "y", Box::interval(-2, 2)), H, hc);
  for (std::size_t i : kGrid.active_indices()) {
    for (double t : {-0.5, 0.0, 1e-9, 0.5}) {
      EXPECT_DOUBLE_EQ(gH.scalar(kGrid[i], std::span<const double>(&t, 1)),
                       std::atan(dsl::heaviside_mollified(t, kGrid[i])));
    }
  }
}

TEST(ComposeSlowlyIncreasing, Examples) {
  const Box K = Box::interval(-1, 1);
  const auto u = net1("t/eps", "t", K);
  const Box R = Box::whole_space(1);
  SlowlyIncreasing cube{net1("y^3", "y", R), {{1, 3}, {3, 2}, {6, 1}, {6, 0}}};
  const auto c = compose_slowly_increasing(cube, u);
  const auto g = classify_growth(sup_on_compact(c, K), kOrders);
  EXPECT_EQ(g.kind, GrowthKind::Moderate);
  EXPECT_EQ(g.order, 3);

  SlowlyIncreasing at{net1("atan(y)", "y", R), {{2, 0}, {1, 0}, {1, 0}}};
  const auto b = compose_slowly_increasing(at, u);
  EXPECT_LE(max_active(sup_on_compact(b, K)), std::numbers::pi / 2);

  SlowlyIncreasing ex{net1("exp(y)", "y", R), {{1, 5}}};
  try {
    compose_slowly_increasing(ex, u);
    FAIL() << "exp has no polynomial witness";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::GrowthWitnessFailed);
  }
}

TEST(PointValue, Examples) {
  const auto id = net1("t", "t", Box::interval(-1, 2));
  const PointNet t0 = point_net({"0.5 + eps^2"}, kGrid);
  const PointNet v = point_value(id, t0);
  for (std::size_t i : kGrid.active_indices()) EXPECT_EQ(v[i][0], t0[i][0]);

  const EpsGrid small = EpsGrid::dyadic(0, 9, 0.5);
  const auto e = parse_net({"exp(t/eps)"}, dsl::Signature({"t"}), small, Box::interval(-1, 1));
  const PointNet p = point_net({"eps*log(1/eps)"}, small);
  const NumberNet r = point_value(e, p).component(0);
  for (std::size_t i : small.active_indices()) EXPECT_NEAR(r[i] * small[i], 1.0, 1e-12);
  const auto c = classify_growth(r, kOrders);
  EXPECT_EQ(c.kind, GrowthKind::Moderate);
  EXPECT_EQ(c.order, 1);
}

TEST(PointValue, RejectsEscapingPoints) {
  const auto id = net1("t", "t", Box::interval(-1, 1));
  EXPECT_THROW(point_value(id, point_net({"1/eps"}, kGrid)), Error);
}

TEST(EqualByPoints, Examples) {
  const Box UV({-1, -1}, {1, 1});
  const dsl::Signature sig({"x", "y"});
  const auto f = parse_net({"sin(x) * y"}, sig, kGrid, UV);
  const auto g5 = parse_net({"sin(x) * y + eps^5 * exp(-x^2)"}, sig, kGrid, UV);
  const auto g0 = parse_net({"sin(x) * y + exp(-x^2)"}, sig, kGrid, UV);
  const std::vector<PointNet> probes{point_net({"0.2 + eps"}, kGrid), point_net({"-0.5"}, kGrid)};
  EXPECT_TRUE(equal_by_points(f, f, 1, probes, 3).equal);
  EXPECT_TRUE(equal_by_points(f, g5, 1, probes, 3).equal);
  const auto r = equal_by_points(f, g0, 1, probes, 3);
  EXPECT_FALSE(r.equal);
  EXPECT_FALSE(r.coverage.empty());
}

TEST(EqualByPoints, RejectsNonNearStandardProbes) {
  const Box UV({-1, -1}, {1, 1});
  const auto f = parse_net({"x*y"}, dsl::Signature({"x", "y"}), kGrid, UV);
  const std::vector<PointNet> probes{point_net({"0.5*sin(1/eps)"}, kGrid)};
  EXPECT_THROW(equal_by_points(f, f, 1, probes, 3), Error);
}

TEST(SupOnCompactProperty, Subadditive) {
  gen::for_all(25, 21, [&](gen::Rng& rng, int c) {
    const std::string a = gen::smooth_expr(rng, {"t"}, 3) + " / eps^" + std::to_string(rng.integer(0, 2));
    const std::string b = gen::smooth_expr(rng, {"t"}, 3) + " * eps";
    SCOPED_TRACE("case " + std::to_string(c) + ": " + a + " | " + b);
    const Box D = Box::interval(-1, 1);
    const auto f = net1(a, "t", D), g = net1(b, "t", D), fg = net1("(" + a + ") + (" + b + ")", "t", D);
    const SupOptions opt{17, 8};
    const NumberNet sf = sup_on_compact(f, D, {}, opt), sg = sup_on_compact(g, D, {}, opt),
                    sfg = sup_on_compact(fg, D, {}, opt);
    for (std::size_t i : kGrid.active_indices()) {
      EXPECT_LE(sfg[i], (sf[i] + sg[i]) * (1 + 1e-14)) << "eps = " << kGrid[i];
    }
  });
}

TEST(ComposeProperty, AssociativeAndInsideTheDomain) {
  gen::for_all(15, 22, [&](gen::Rng& rng, int c) {
    // u: [0,1] -> (-2, 2), v: R -> (-2, 2), w: R -> R, all bounded by atan
    const std::string su = "atan(" + gen::smooth_expr(rng, {"t"}, 2) + " + eps)";
    const std::string sv = "atan(" + gen::smooth_expr(rng, {"y"}, 2) + ")";
    const std::string sw = gen::smooth_expr(rng, {"y"}, 2);
    SCOPED_TRACE("case " + std::to_string(c) + ": " + su + " | " + sv + " | " + sw);
    const Box K = Box::interval(0, 1), V = Box::interval(-2, 2);
    const auto u = net1(su, "t", K);
    const auto v = net1(sv, "y", V);
    const auto w = net1(sw, "y", V);
    const auto cu = check_cbounded(u, K, V);
    const auto cv = check_cbounded(v, V.exhaustion(6), V);
    ASSERT_TRUE(cu.ok());
    ASSERT_TRUE(cv.ok());
    const auto vu = compose(v, u, cu.certificate);
    const auto cvu = check_cbounded(vu, K, V);
    ASSERT_TRUE(cvu.ok());
    const auto left = compose(w, vu, cvu.certificate);
    // w o v is only certified on the exhaustion member; u lands well inside it
    ASSERT_TRUE(V.exhaustion(6).contains(cu.certificate->target));
    const auto wv = compose(w, v.with_domain(V.exhaustion(6)), cv.certificate);
    const auto cu2 = check_cbounded(u, K, V.exhaustion(6));
    ASSERT_TRUE(cu2.ok());
    const auto right = compose(wv, u, cu2.certificate);
    const double coeffs[2] = {1.0, -1.0};
    const FunctionNet nets[2] = {left, right};
    const NumberNet gap = sup_on_compact(linear_combination(coeffs, nets), K);
    EXPECT_TRUE(classify_growth(gap, std::vector<int>{1, 2, 3}, GrowthOptions{1e-14, {}, 0.1, 0.02})
                    .negligible_to(3));
  });
}

TEST(PointValueProperty, CommutesWithCompose) {
  gen::for_all(20, 23, [&](gen::Rng& rng, int c) {
    const std::string su = "atan(" + gen::smooth_expr(rng, {"t"}, 2) + ")";
    const std::string sv = gen::smooth_expr(rng, {"y"}, 3);
    SCOPED_TRACE("case " + std::to_string(c) + ": " + su + " | " + sv);
    const Box K = Box::interval(-1, 1), V = Box::interval(-2, 2);
    const auto u = net1(su, "t", K);
    const auto v = net1(sv, "y", V);
    const auto cert = check_cbounded(u, K, V).certificate;
    ASSERT_TRUE(cert);
    const PointNet p = point_net({gen::num(rng.uniform(-0.5, 0.5)) + " + eps"}, kGrid);
    const PointNet a = point_value(compose(v, u, cert), p);
    const PointNet b = point_value(v, point_value(u, p));
    for (std::size_t i : kGrid.active_indices()) EXPECT_EQ(a[i][0], b[i][0]);
  });
}
