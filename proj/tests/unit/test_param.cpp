#include <cmath>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "colombeau/param.hpp"
#include "colombeau/rhs_dsl.hpp"
#include "generators.hpp"

using namespace colombeau;

namespace {

struct Spec {
  std::string rhs;
  std::string t0 = "0";
  double t0_limit = 0.0;
  std::string x0 = "1";
  double L0 = 1, L1 = 1;
  double alpha = 1.0, beta = 0.5;
  double P0 = -1, P1 = 1;
  bool with_p = true;
  EpsGrid grid = EpsGrid::dyadic(0, 16);
};

ParamIvpProblem make(const Spec& s) {
  ParamIvpProblem q;
  IvpProblem& p = q.base;
  p.I = Box::interval(-3, 3);
  p.U = Box::interval(-10, 10);
  q.P = s.with_p ? Box::interval(s.P0, s.P1) : Box({}, {});
  Box dom = product(p.I, p.U);
  if (s.with_p) dom = product(dom, q.P);
  p.F = parse_net({s.rhs}, dsl::Signature::ode(1, s.with_p ? 1 : 0), s.grid, dom);
  p.t0 = s.t0_limit;
  p.t0_net = point_net({s.t0}, s.grid);
  p.x0_net = point_net({s.x0}, s.grid);
  p.alpha = s.alpha;
  p.L = Box::interval(s.L0, s.L1);
  p.beta = s.beta;
  return q;
}

double u_at(const FunctionNet& u, double eps, std::vector<double> in) { return u.scalar(eps, in); }

template <class F>
double gauss(F f, double a, double b, int panels) {
  static const double xs[5] = {0.0, -0.5384693101056831, 0.5384693101056831, -0.9061798459386640,
                               0.9061798459386640};
  static const double ws[5] = {0.5688888888888889, 0.4786286704993665, 0.4786286704993665,
                               0.2369268850561891, 0.2369268850561891};
  const double h = (b - a) / panels;
  double s = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double m = a + (p + 0.5) * h;
    for (int k = 0; k < 5; ++k) s += ws[k] * f(m + 0.5 * h * xs[k]);
  }
  return 0.5 * h * s;
}

}  // namespace

TEST(SolveWithParameters, LinearInP) {
  const ParamIvpProblem q = make({.rhs = "p*x"});
  const auto ps = default_p_lattice(q);
  EXPECT_EQ(ps.size(), 9u);
  const ParamSolutionNet sol = solve_with_parameters(q, ps);
  const double h = sol.cert.h;
  for (std::size_t i : {sol.cert.grid.active_indices().front(), sol.cert.grid.active_indices().back()}) {
    const double eps = sol.cert.grid[i];
    for (const auto& p : ps) {
      for (double t : {-0.9 * h, -0.3 * h, 0.0, 0.5 * h, 0.9 * h}) {
        EXPECT_NEAR(u_at(sol.base, eps, {p[0], t}), std::exp(p[0] * t), 1e-7) << p[0] << " " << t;
        double d[1];
        sol.solver->dp(i, p, 0, t, d);
        EXPECT_NEAR(d[0], t * std::exp(p[0] * t), 1e-6) << p[0] << " " << t;
      }
    }
  }
}

TEST(SolveWithParameters, ParameterFreeRhs) {
  Spec s{.rhs = "sin(t) + cos(x)"};
  const ParamIvpProblem q = make(s);
  const ParamSolutionNet sol = solve_with_parameters(q, default_p_lattice(q, 3));
  const SolutionNet ref = solve_generalized(make(Spec{.rhs = "sin(t) + cos(x)", .with_p = false}).base);
  for (std::size_t i : sol.cert.grid.active_indices()) {
    const double eps = sol.cert.grid[i];
    for (double p : {-0.5, 0.0, 0.7}) {
      for (double t : {-0.9 * sol.cert.h, 0.0, 0.6 * sol.cert.h}) {
        EXPECT_NEAR(u_at(sol.base, eps, {p, t}), u_at(ref.base, eps, {t}), 1e-9);
        double d[1];
        const double pp = p;
        sol.solver->dp(i, std::span<const double>(&pp, 1), 0, t, d);
        EXPECT_EQ(d[0], 0.0);
      }
    }
  }
  const double p0 = 0.2;
  const NumberNet r = sensitivity_residual(sol, q, std::span<const double>(&p0, 1), 0.5 * sol.cert.h);
  for (std::size_t i : sol.cert.grid.active_indices()) EXPECT_EQ(r[i], 0.0);
}

TEST(SolveWithParameters, JumpShiftedBySinP) {
  Spec s{.rhs = "sin(p) + H(t)", .t0 = "-1", .t0_limit = -1, .x0 = "0", .L0 = 0, .L1 = 0, .alpha = 1.5,
         .beta = 4};
  const ParamIvpProblem q = make(s);
  const ParamSolutionNet sol = solve_with_parameters(q, default_p_lattice(q, 3));
  ASSERT_GE(sol.cert.h, 1.5);
  for (std::size_t i : sol.cert.grid.active_indices()) {
    const double eps = sol.cert.grid[i];
    for (double p : {-0.8, 0.1, 0.9}) {
      for (double t : {-0.5, 0.0, 0.25}) {
        const double ref = std::sin(p) * (t + 1) +
                           (t <= -eps ? 0.0
                                      : gauss([&](double r) { return dsl::heaviside_mollified(r, eps); }, -eps,
                                              std::min(t, eps), 64) +
                                            std::max(0.0, t - eps));
        EXPECT_NEAR(u_at(sol.base, eps, {p, t}), ref, 1e-8) << eps << " " << p << " " << t;
      }
    }
  }
}

TEST(Sensitivity, LinearInP) {
  const ParamIvpProblem q = make({.rhs = "p*x"});
  const ParamSolutionNet sol = solve_with_parameters(q, default_p_lattice(q, 3));
  for (double p : {-0.5, 0.3}) {
    for (double tf : {-0.8, 0.5, 0.9}) {
      const NumberNet r = sensitivity_residual(sol, q, std::span<const double>(&p, 1), tf * sol.cert.h);
      for (std::size_t i : sol.cert.grid.active_indices()) EXPECT_LE(r[i], 1e-5) << p << " " << tf;
    }
  }
}

TEST(Sensitivity, GrowthStaysUnderTheEnvelope) {
  // d_x F = p + cos(x/eps) stays bounded; d_p F = x
  const ParamIvpProblem q = make({.rhs = "p*x + eps*sin(x/eps)", .L0 = 1, .L1 = 1});
  const ParamSolutionNet sol = solve_with_parameters(q, default_p_lattice(q, 3));
  ASSERT_TRUE(sol.cert.log_bound.has_value());
  const double C1 = sol.cert.log_bound->C1;
  std::vector<double> sup(sol.cert.grid.size(), std::nan(""));
  const double p = 0.4;
  for (std::size_t i : sol.cert.grid.active_indices()) {
    double m = 0.0;
    for (double t : detail::time_lattice(-0.9 * sol.cert.h, 0.9 * sol.cert.h, 33)) {
      double d[1];
      sol.solver->dp(i, std::span<const double>(&p, 1), 0, t, d);
      m = std::max(m, std::abs(d[0]));
    }
    sup[i] = m;
  }
  const LogLogFit fit = fit_loglog(NumberNet(sol.cert.grid, sup));
  // N1 = 0 since d_p F is bounded on Q
  EXPECT_GE(fit.slope, -(0.0 + sol.cert.h * C1) - 0.05);
}

TEST(Certify, NonUniformBound) {
  // every lattice slice is bounded, the joint sup over P grows like 1/eps
  Spec s{.rhs = "1/(eps^4 + (p - 0.0625)^2)", .grid = EpsGrid::dyadic()};
  try {
    certify_parameters(make(s));
    FAIL() << "joint growth not detected";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NonUniformBound) << e.what();
  }
}

TEST(Certify, MissingLogBound) {
  // |F| <= 1 but d_x F = cos(x/eps^2)/eps grows faster than log(1/eps)
  Spec s{.rhs = "eps*sin(x/eps^2)*p"};
  try {
    certify_parameters(make(s));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::MissingLogBound) << e.what();
  }
}

TEST(InitialFamily, ZeroRhs) {
  Spec s{.rhs = "0", .x0 = "0", .L0 = 0, .L1 = 0, .alpha = 1, .beta = 1, .with_p = false};
  const ParamIvpProblem q = make(s);
  const InitialValueFamily fam = solve_with_initial_data(q, 0.3);
  EXPECT_TRUE(fam.exact_at_t1);
  const EpsGrid& g = fam.v.cert.grid;
  for (std::size_t i : g.active_indices()) {
    for (double t1 : {fam.J1.lower(0) * 0.9, 0.0, fam.J1.upper(0) * 0.9})
      for (double x1 : {fam.U1.lower(0) * 0.9, 0.1 * fam.U1.upper(0)})
        for (double t : {fam.J.lower(0), fam.J.upper(0)}) EXPECT_EQ(u_at(fam.solution, g[i], {t1, x1, t}), x1);
  }
}

TEST(InitialFamily, LinearRhs) {
  Spec s{.rhs = "x", .x0 = "0", .L0 = 0, .L1 = 0, .alpha = 1, .beta = 1, .with_p = false};
  const InitialValueFamily fam = solve_with_initial_data(make(s), 0.2);
  EXPECT_GT(fam.h, 0.2 - 1e-15);
  const EpsGrid& g = fam.v.cert.grid;
  const auto act = g.active_indices();
  for (std::size_t i : {act.front(), act.back()}) {
    for (double a : {-0.9, 0.0, 0.7})
      for (double b : {-0.8, 0.3, 0.95})
        for (double c : {-1.0, -0.2, 0.6, 1.0}) {
          const double t1 = fam.J1.center()[0] + a * 0.5 * fam.J1.width(0);
          const double x1 = fam.U1.center()[0] + b * 0.5 * fam.U1.width(0);
          const double t = fam.J.center()[0] + c * 0.5 * fam.J.width(0);
          EXPECT_NEAR(u_at(fam.solution, g[i], {t1, x1, t}), x1 * std::exp(t - t1), 1e-6);
        }
  }
}

TEST(InitialFamily, FlowProperty) {
  Spec s{.rhs = "sin(t) + cos(x)", .x0 = "0", .L0 = 0, .L1 = 0, .alpha = 1, .beta = 1, .with_p = false};
  const InitialValueFamily fam = solve_with_initial_data(make(s), 0.2);
  const double eps = fam.v.cert.grid[fam.v.cert.grid.active_indices().back()];
  int checked = 0;
  for (double t1 : {-0.3, 0.0, 0.2}) {
    const double tt1 = fam.J1.center()[0] + t1 * fam.J1.width(0);
    for (double x1 : {-0.2, 0.1}) {
      const double xx1 = fam.U1.center()[0] + x1 * fam.U1.width(0);
      for (double t2 : {-0.05, 0.05}) {
        if (!fam.J1.contains_interior(std::span<const double>(&t2, 1))) continue;
        const double x2 = u_at(fam.solution, eps, {tt1, xx1, t2});
        if (!fam.U1.contains_interior(std::span<const double>(&x2, 1))) continue;
        for (double t : {-0.15, 0.0, 0.15}) {
          if (!fam.J.contains(std::span<const double>(&t, 1))) continue;
          EXPECT_NEAR(u_at(fam.solution, eps, {t2, x2, t}), u_at(fam.solution, eps, {tt1, xx1, t}), 1e-5);
          ++checked;
        }
      }
    }
  }
  EXPECT_GT(checked, 10);
}

TEST(InitialFamily, InfeasibleTarget) {
  Spec s{.rhs = "x", .x0 = "0", .L0 = 0, .L1 = 0, .alpha = 1, .beta = 1, .with_p = false};
  try {
    solve_with_initial_data(make(s), 5.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ConstantsInfeasible);
  }
}

TEST(ParamProperty, SlicesMatchTheFrozenProblem) {
  gen::for_all(6, 51, [&](gen::Rng& rng, int c) {
    const double a = rng.uniform(-0.5, 0.5), b = rng.uniform(-0.5, 0.5), w = rng.uniform(0.2, 1.5);
    const std::string tmpl = gen::num(a) + "*sin(" + gen::num(w) + "*t + x) + P*cos(x) + " + gen::num(b) + "*atan(P*x)";
    auto with = [&](const std::string& p) {
      std::string s = tmpl;
      for (std::size_t k; (k = s.find('P')) != std::string::npos;) s.replace(k, 1, p);
      return s;
    };
    SCOPED_TRACE("case " + std::to_string(c) + ": " + tmpl);
    const ParamIvpProblem q = make({.rhs = with("p"), .x0 = "0.5", .L0 = 0.5, .L1 = 0.5});
    const auto lattice = default_p_lattice(q);
    const ParamSolutionNet sol = solve_with_parameters(q, lattice);
    const double p = rng.pick(lattice)[0];
    const IvpProblem frozen = make({.rhs = with("(" + gen::num(p) + ")"), .x0 = "0.5", .L0 = 0.5, .L1 = 0.5,
                                    .with_p = false}).base;
    GeneralizedSolveOptions o;
    o.certificate = sol.cert;
    const SolutionNet ref = solve_generalized(frozen, o);
    std::vector<double> gap(sol.cert.grid.size(), std::nan(""));
    for (std::size_t i : sol.cert.grid.active_indices()) {
      double m = 0.0;
      for (double t : detail::time_lattice(-0.75 * sol.cert.h, 0.75 * sol.cert.h, 65))
        m = std::max(m, std::abs(u_at(sol.base, sol.cert.grid[i], {p, t}) - u_at(ref.base, sol.cert.grid[i], {t})));
      gap[i] = m;
    }
    GrowthOptions go;
    go.noise_floor = 1e-8;  // two independent adaptive solves at rtol = atol = 1e-9
    EXPECT_TRUE(classify_growth(NumberNet(sol.cert.grid, gap), std::vector<int>{1, 2, 3}, go).negligible_to(3));
  });
}

TEST(ParamProperty, MixedDerivativeIdentity) {
  gen::for_all(6, 52, [&](gen::Rng& rng, int c) {
    const double a = rng.uniform(-1, 1), w = rng.uniform(0.5, 2);
    const std::string rhs = "p*sin(x) + " + gen::num(a) + "*cos(" + gen::num(w) + "*t) + p^2*atan(x)";
    SCOPED_TRACE("case " + std::to_string(c) + ": " + rhs);
    const ParamIvpProblem q = make({.rhs = rhs, .x0 = "0.25", .L0 = 0.25, .L1 = 0.25});
    const ParamSolutionNet sol = solve_with_parameters(q, default_p_lattice(q, 3));
    const FunctionNet& F = q.base.F;
    const FunctionNet Fx = F.partial(1), Fp = F.partial(2);
    const std::size_t i = sol.cert.grid.active_indices().back();
    const double eps = sol.cert.grid[i];
    for (int k = 0; k < 4; ++k) {
      const double p = rng.uniform(-0.8, 0.8), t = rng.uniform(-0.6, 0.6) * sol.cert.h;
      const double ht = 1e-4;
      double dp_plus[1], dp_minus[1], dp0[1];
      sol.solver->dp(i, std::span<const double>(&p, 1), 0, t + ht, dp_plus);
      sol.solver->dp(i, std::span<const double>(&p, 1), 0, t - ht, dp_minus);
      sol.solver->dp(i, std::span<const double>(&p, 1), 0, t, dp0);
      const double lhs = (dp_plus[0] - dp_minus[0]) / (2 * ht);
      const double u = u_at(sol.base, eps, {p, t});
      const double in[3] = {t, u, p};
      const double rhs_v = Fx.scalar(eps, in) * dp0[0] + Fp.scalar(eps, in);
      EXPECT_NEAR(lhs, rhs_v, 1e-4) << "p " << p << " t " << t;
    }
  });
}

TEST(ParamProperty, FamilyGeometry) {
  gen::for_all(10, 53, [&](gen::Rng& rng, int c) {
    SCOPED_TRACE("case " + std::to_string(c));
    const double x0 = std::round(rng.uniform(-1, 1) * 8) / 8;
    Spec s{.rhs = gen::num(rng.uniform(-0.5, 0.5)) + "*sin(t + x) + " + gen::num(rng.uniform(-0.5, 0.5)) + "*p",
           .x0 = gen::num(x0), .L0 = x0, .L1 = x0, .alpha = rng.uniform(0.5, 1.5), .beta = rng.uniform(0.5, 2),
           .grid = EpsGrid::dyadic(0, 12)};
    const ParamIvpProblem q = make(s);
    const HypothesisCertificate cert = certify_parameters(q);
    const double target = rng.uniform(0.1, 0.45) * cert.h;
    const InitialValueFamily fam = solve_with_initial_data(q, target);
    EXPECT_GE(fam.h, target);
    EXPECT_GE(fam.sigma, 0.5);
    EXPECT_LT(fam.sigma, 1.0);
    EXPECT_EQ(fam.h_hat, std::min(fam.delta, fam.eta / fam.a));
    // Ihat + I1 inside I, Uhat + U1 = B_beta(x0) inside U
    EXPECT_TRUE(q.base.I.contains(Box::interval(fam.I_hat.lower(0) + fam.I1.lower(0), fam.I_hat.upper(0) + fam.I1.upper(0))));
    EXPECT_TRUE(q.base.U.contains(Box::interval(fam.U_hat.lower(0) + fam.U1.lower(0), fam.U_hat.upper(0) + fam.U1.upper(0))));
    // |t - t1| <= hhat over J1 x J
    EXPECT_LE(std::max(fam.J.upper(0) - fam.J1.lower(0), fam.J1.upper(0) - fam.J.lower(0)), fam.h_hat * (1 + 1e-12));
    EXPECT_TRUE(fam.exact_at_t1);
    const EpsGrid& g = fam.v.cert.grid;
    for (int k = 0; k < 5; ++k) {
      const double t1 = fam.J1.lower(0) + rng.uniform(0.05, 0.95) * fam.J1.width(0);
      const double x1 = fam.U1.lower(0) + rng.uniform(0.05, 0.95) * fam.U1.width(0);
      const double p = rng.uniform(-0.8, 0.8);
      for (std::size_t i : g.active_indices()) EXPECT_EQ(u_at(fam.solution, g[i], {t1, x1, p, t1}), x1);
    }
  });
}
