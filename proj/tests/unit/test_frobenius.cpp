#include <cmath>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "colombeau/frobenius.hpp"
#include "colombeau/rhs_dsl.hpp"
#include "generators.hpp"

using namespace colombeau;

namespace {

FrobeniusProblem make(std::vector<std::string> F, std::size_t n, std::size_t m, std::vector<std::string> y0,
                      double L0, double L1, EpsGrid grid = EpsGrid::dyadic(0, 14)) {
  FrobeniusProblem p;
  p.U = Box(std::vector<double>(n, -2), std::vector<double>(n, 2));
  p.V = Box(std::vector<double>(m, -5), std::vector<double>(m, 5));
  p.F = parse_net(F, dsl::Signature::frobenius(n, m), grid, product(p.U, p.V));
  p.x0_net = point_net(std::vector<std::string>(n, "0"), grid);
  p.y0_net = point_net(y0, grid);
  p.alpha = 1.0;
  p.L = Box(std::vector<double>(m, L0), std::vector<double>(m, L1));
  p.beta = 1.0;
  return p;
}

std::vector<double> eval(const FunctionNet& f, double eps, std::vector<double> x) { return f(eps, x); }

std::vector<std::pair<std::vector<double>, std::vector<double>>> basis_probes(std::size_t n) {
  std::vector<std::pair<std::vector<double>, std::vector<double>>> out;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      std::vector<double> v(n, 0.0), w(n, 0.0);
      v[i] = 0.5;
      w[j] = 1.0;
      out.emplace_back(v, w);
    }
  return out;
}

}  // namespace

TEST(Integrability, ConstantMatrix) {
  const auto p = make({"1", "2", "-0.5", "0.25"}, 2, 2, {"0", "0"}, 0, 0);
  const IntegrabilityReport r = check_integrability(p);
  for (std::size_t i : p.grid().active_indices()) EXPECT_EQ(r.max_asymmetry[i], 0.0);
  EXPECT_TRUE(r.integrable);
  EXPECT_EQ(r.classification.kind, GrowthKind::Negligible);
}

TEST(Integrability, SymmetricForm) {
  // S(v1, v2) = y (v11 + v12)(v21 + v22)
  const auto p = make({"y", "y"}, 2, 1, {"1"}, 1, 1);
  const IntegrabilityReport r = check_integrability(p, 16);
  EXPECT_TRUE(r.integrable);
  const double eps = 0.01;
  for (const auto& pr : r.probes) {
    double S[1], mag = 0;
    integrability_form(p, eps, pr.x, pr.y, pr.v1, pr.v2, S, &mag);
    EXPECT_NEAR(S[0], pr.y[0] * (pr.v1[0] + pr.v1[1]) * (pr.v2[0] + pr.v2[1]), 1e-13 * (1 + mag));
  }
}

TEST(Integrability, AsymmetricForm) {
  // S(v1, v2) = v12 v21
  const auto p = make({"x2", "0"}, 2, 1, {"0"}, 0, 0);
  const IntegrabilityReport r = check_integrability(p, 16);
  EXPECT_FALSE(r.integrable);
  EXPECT_NE(r.classification.kind, GrowthKind::Negligible);
  // the asymmetry is eps-free, so it is bounded and not merely O(1/eps)
  EXPECT_EQ(r.classification.kind, GrowthKind::Moderate);
  EXPECT_EQ(r.classification.order, 0);
  double worst = 0.0;
  for (const auto& pr : r.probes) {
    const double expect = std::abs(pr.v1[1] * pr.v2[0] - pr.v1[0] * pr.v2[1]);
    worst = std::max(worst, expect);
    for (std::size_t i : p.grid().active_indices()) EXPECT_NEAR(pr.values[i], expect, 1e-12);
  }
  for (std::size_t i : p.grid().active_indices()) EXPECT_NEAR(r.max_asymmetry[i], worst, 1e-12);
  EXPECT_GE(worst, 1.0 - 1e-12);  // the basis pair (e1, e2)
}

TEST(SolveTotal, ExponentialSolution) {
  const auto p = make({"y", "y"}, 2, 1, {"1"}, 1, 1);
  const FrobeniusSolution s = solve_total(p);
  const Box& D = s.domain;
  EXPECT_NEAR(D.upper(0), s.cert.lambda * s.cert.r, 1e-15);
  for (std::size_t i : s.cert.grid.active_indices()) {
    EXPECT_LE(s.residual[i], 1e-6);
    for (double a : {-0.9, 0.0, 0.6})
      for (double b : {-0.5, 0.3, 0.95}) {
        const double x1 = a * D.upper(0), x2 = b * D.upper(1);
        EXPECT_NEAR(eval(s.u, s.cert.grid[i], {x1, x2})[0], std::exp(x1 + x2), 1e-6);
      }
  }
}

TEST(SolveTotal, ConstantMatrixIsAffine) {
  const std::vector<double> A{1, 2, -0.5, 0.25};
  const auto p = make({"1", "2", "-0.5", "0.25"}, 2, 2, {"0.5", "-0.5"}, -1, 1);
  const FrobeniusSolution s = solve_total(p);
  for (std::size_t i : s.cert.grid.active_indices()) {
    for (double a : {-0.7, 0.2})
      for (double b : {-0.4, 0.8}) {
        const double x[2] = {a * s.domain.upper(0), b * s.domain.upper(1)};
        const auto u = eval(s.u, s.cert.grid[i], {x[0], x[1]});
        EXPECT_NEAR(u[0], 0.5 + A[0] * x[0] + A[1] * x[1], 1e-12);
        EXPECT_NEAR(u[1], -0.5 + A[2] * x[0] + A[3] * x[1], 1e-12);
      }
  }
  const KNetReport k = k_net_residual(p, s, basis_probes(2));
  for (std::size_t i : s.cert.grid.active_indices()) EXPECT_LE(k.sup_k[i], 1e-12);
  EXPECT_EQ(k.label, "zero");
}

TEST(SolveTotal, RefusesAsymmetricRhs) {
  const auto p = make({"x2", "0"}, 2, 1, {"0"}, 0, 0);
  try {
    solve_total(p);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::IntegrabilityRejected);
  }
}

TEST(KNet, ToleranceLimitedForTheExponentialCase) {
  const auto p = make({"y", "y"}, 2, 1, {"1"}, 1, 1);
  const FrobeniusSolution s = solve_total(p);
  const KNetReport k = k_net_residual(p, s, basis_probes(2));
  EXPECT_TRUE(k.label == "tolerance-limited" || k.label == "zero") << k.label;
  for (std::size_t i : s.cert.grid.active_indices()) {
    EXPECT_LE(k.sup_k[i], k.tolerance_floor);
    EXPECT_LE(k.linear_defect[i], k.tolerance_floor);
  }
  EXPECT_TRUE(k.A_log_bounded);
}

TEST(KNet, NegativeControl) {
  // f = v1 v2 t^2 / 2 and k = t^2 (v1 w2 - v2 w1) / 2; the pair (e1/2, e2) gives t^2 / 4
  const auto p = make({"x2", "0"}, 2, 1, {"0"}, 0, 0);
  FrobeniusOptions o;
  o.require_integrable = false;
  const FrobeniusSolution s = solve_total(p, o);
  const KNetReport k = k_net_residual(p, s, basis_probes(2));
  const double h = s.cert.h;
  for (std::size_t i : s.cert.grid.active_indices()) {
    EXPECT_GT(k.sup_k[i], 0.9 * h * h / 4);
    EXPECT_LE(k.sup_k[i], h * h / 4 * (1 + 1e-6));
  }
  EXPECT_NE(k.label, "zero");
  EXPECT_NE(k.label, "tolerance-limited");
}

TEST(FrobeniusProperty, RayScaling) {
  const auto p = make({"y", "y"}, 2, 1, {"1"}, 1, 1);
  const FrobeniusSolution s = solve_total(p);
  const std::size_t i = s.cert.grid.active_indices().back();
  gen::for_all(40, 61, [&](gen::Rng& rng, int c) {
    SCOPED_TRACE("case " + std::to_string(c));
    const double h = s.cert.h;
    const double d[2] = {rng.uniform(-0.5, 0.5) * h, rng.uniform(-0.5, 0.5) * h};
    const double dn = std::max(std::abs(d[0]), std::abs(d[1]));
    // need |d / c| <= 0.999 and c <= h
    const double c1 = s.cert.r, c2 = rng.uniform(std::max(dn / 0.999, 1e-3), h * 0.999);
    std::vector<double> v1{d[0] / c1, d[1] / c1}, v2{d[0] / c2, d[1] / c2};
    double f1[1], f2[1];
    s.rays->f(i, v1, c1, f1);
    s.rays->f(i, v2, c2, f2);
    EXPECT_NEAR(f1[0], f2[0], 1e-6);
  });
}

TEST(FrobeniusProperty, InitialCondition) {
  gen::for_all(6, 62, [&](gen::Rng& rng, int c) {
    SCOPED_TRACE("case " + std::to_string(c));
    const double y0 = std::round(rng.uniform(-1, 1) * 16) / 16;
    auto p = make({"y", "y"}, 2, 1, {gen::num(y0) + " + eps^2"}, y0, y0 + 0.1);
    p.x0_net = point_net({gen::num(rng.uniform(-0.5, 0.5)) + "*eps", "eps^2"}, p.grid());
    const FrobeniusSolution s = solve_total(p);
    for (std::size_t i : s.cert.grid.active_indices()) {
      const auto x0 = p.x0_net[i];  // cert.grid only moves eps0
      const auto u = eval(s.u, s.cert.grid[i], {x0[0], x0[1]});
      EXPECT_NEAR(u[0], p.y0_net[i][0], 1e-14);
      EXPECT_LE(s.initial_error[i], 1e-14);
    }
  });
}

TEST(FrobeniusProperty, SchwarzAndHessianIdentity) {
  gen::for_all(4, 63, [&](gen::Rng& rng, int c) {
    // F = (a y, b y) is integrable for every a, b: u = y0 exp(a x1 + b x2)
    const double a = rng.uniform(-1, 1), b = rng.uniform(-1, 1);
    const std::string sa = gen::num(a), sb = gen::num(b);
    SCOPED_TRACE("case " + std::to_string(c) + ": a = " + sa + ", b = " + sb);
    const auto p = make({sa + "*y", sb + "*y"}, 2, 1, {"1"}, 1, 1);
    const FrobeniusSolution s = solve_total(p);
    const std::size_t i = s.cert.grid.active_indices().back();
    const double eps = s.cert.grid[i];
    const FunctionNet d0 = s.u.partial(0), d1 = s.u.partial(1);
    const double hfd = 1e-4;
    for (int k = 0; k < 6; ++k) {
      const double x[2] = {rng.uniform(-0.6, 0.6) * s.domain.upper(0), rng.uniform(-0.6, 0.6) * s.domain.upper(1)};
      auto D = [&](const FunctionNet& g, double dx, double dy) { return eval(g, eps, {x[0] + dx, x[1] + dy})[0]; };
      const double d01 = (D(d0, 0, hfd) - D(d0, 0, -hfd)) / (2 * hfd);
      const double d10 = (D(d1, hfd, 0) - D(d1, -hfd, 0)) / (2 * hfd);
      EXPECT_NEAR(d01, d10, 1e-5);
      const double d00 = (D(d0, hfd, 0) - D(d0, -hfd, 0)) / (2 * hfd);
      const double d11 = (D(d1, 0, hfd) - D(d1, 0, -hfd)) / (2 * hfd);
      const double v1[2] = {rng.uniform(-1, 1), rng.uniform(-1, 1)};
      const double v2[2] = {rng.uniform(-1, 1), rng.uniform(-1, 1)};
      const double hess = d00 * v1[0] * v2[0] + d01 * (v1[0] * v2[1] + v1[1] * v2[0]) + d11 * v1[1] * v2[1];
      const double y = eval(s.u, eps, {x[0], x[1]})[0];
      double S[1];
      integrability_form(p, eps, x, std::span<const double>(&y, 1), v1, v2, S);
      EXPECT_NEAR(hess, S[0], 1e-5 * (1 + std::abs(S[0])));
    }
  });
}
