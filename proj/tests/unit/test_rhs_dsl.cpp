#include <cmath>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "colombeau/rhs_dsl.hpp"
#include "generators.hpp"

using namespace colombeau;
using namespace colombeau::dsl;

namespace {

const Signature kSig = Signature::ode(1);  // t, x1 (alias x)

double ev(const Expr& e, double t, double x, double eps) {
  const double v[2] = {t, x};
  return Program(e).eval(v, eps);
}

ErrorCode parse_error(const std::string& src, SourceSpan* span = nullptr) {
  try {
    parse(src, kSig);
  } catch (const ParseError& e) {
    if (span) *span = e.span();
    return e.code();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::InvalidArgument;
}

// Composite 5-point Gauss-Legendre, independent of the library's tables.
template <class F>
double integrate(F f, double a, double b, int panels) {
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

TEST(Parse, ArctanExampleRhs) {
  const Expr e = parse("(2 - 1/(1+x1^2))/eps", kSig);
  ASSERT_EQ(e->op, Op::Div);
  EXPECT_EQ(e->args[1]->op, Op::Eps);
  for (double x : {-3.0, -0.5, 0.0, 1.0, 7.0}) {
    for (double eps : {1.0, 0.125, 1e-6}) {
      EXPECT_DOUBLE_EQ(ev(e, 0.3, x, eps), (2 - 1 / (1 + x * x)) / eps);
    }
  }
}

TEST(Parse, ExponentialExampleRhs) {
  const Expr e = parse("x1/eps", kSig);
  ASSERT_EQ(e->op, Op::Div);
  EXPECT_EQ(e->args[0]->op, Op::Var);
  EXPECT_EQ(e->args[0]->index, 1);
  EXPECT_EQ(e->args[1]->op, Op::Eps);
  EXPECT_TRUE(equal(e, parse("x/eps", kSig)));
}

TEST(Parse, Errors) {
  SourceSpan span;
  EXPECT_EQ(parse_error("x1 +", &span), ErrorCode::SyntaxError);
  EXPECT_EQ(span.line, 1u);
  EXPECT_EQ(span.column, 5u);
  EXPECT_EQ(parse_error("y + 1", &span), ErrorCode::UnknownIdentifier);
  EXPECT_EQ(span.column, 1u);
  EXPECT_EQ(parse_error("sin(x, t)"), ErrorCode::ArityError);
  EXPECT_EQ(parse_error("(x + 1"), ErrorCode::SyntaxError);
  EXPECT_EQ(parse_error("x ^ 0.5"), ErrorCode::SyntaxError);
  EXPECT_EQ(parse_error("x2", &span), ErrorCode::UnknownIdentifier);
}

TEST(Parse, ErrorSpansCountLines) {
  SourceSpan span;
  EXPECT_EQ(parse_error("x +\n  * 2", &span), ErrorCode::SyntaxError);
  EXPECT_EQ(span.line, 2u);
  EXPECT_EQ(span.column, 3u);
}

TEST(Parse, Precedence) {
  EXPECT_DOUBLE_EQ(ev(parse("-x^2", kSig), 0, 3, 1), -9.0);
  EXPECT_DOUBLE_EQ(ev(parse("2*3 + 4/2 - 1", kSig), 0, 0, 1), 7.0);
  EXPECT_DOUBLE_EQ(ev(parse("2*(3 + 4)", kSig), 0, 0, 1), 14.0);
  EXPECT_DOUBLE_EQ(ev(parse("t - x - 1", kSig), 5, 2, 1), 2.0);
  EXPECT_DOUBLE_EQ(ev(parse("x^-2", kSig), 0, 2, 1), 0.25);
  EXPECT_DOUBLE_EQ(ev(parse("LogEps", kSig), 0, 0, 0.25), std::log(4.0));
  EXPECT_DOUBLE_EQ(ev(parse("abs_smooth(x)", kSig), 0, 0, 0.5), 0.5);
  EXPECT_DOUBLE_EQ(ev(parse("abs_smooth(x, 3)", kSig), 0, 4, 0.5), 5.0);
}

TEST(Parse, Definitions) {
  const Definitions defs = parse_definitions({{"g", "1/eps"}, {"h", "g^2"}});
  const Expr e = parse("-t/(x+1)*h", kSig, defs);
  EXPECT_DOUBLE_EQ(ev(e, 1, 1, 0.5), -1.0 / 2 * 4);
}

TEST(Differentiate, Examples) {
  const Expr d1 = differentiate(parse("x1/eps", kSig), 1);
  EXPECT_TRUE(equal(d1, parse("1/eps", kSig)) || ev(d1, 0, 0, 0.125) == 8.0);
  for (double eps : {1.0, 0.01}) EXPECT_DOUBLE_EQ(ev(d1, 0.2, -4, eps), 1 / eps);

  const Expr d2 = differentiate(parse("(2 - 1/(1+x1^2))/eps", kSig), 1);
  gen::Rng rng(7);
  for (int k = 0; k < 100; ++k) {
    const double x = rng.uniform(-5, 5), eps = std::pow(2.0, -rng.integer(0, 20));
    const double ref = 2 * x / ((1 + x * x) * (1 + x * x) * eps);
    EXPECT_NEAR(ev(d2, 0, x, eps), ref, 1e-13 * std::abs(ref) + 1e-300) << x << " " << eps;
  }

  const Expr dH = differentiate(parse("H(t)", kSig), 0);
  for (double eps : {0.5, 0.01})
    for (double t : {-0.02, -0.004, 0.0, 0.003, 0.3})
      EXPECT_DOUBLE_EQ(ev(dH, t, 0, eps), mollifier_scaled(t, eps)) << t << " " << eps;
}

TEST(Differentiate, ChainRuleThroughHeaviside) {
  const Expr d = differentiate(parse("H(x^2 - 1)", kSig), 1);
  for (double x : {0.99, 1.0, 1.01})
    EXPECT_DOUBLE_EQ(ev(d, 0, x, 0.1), mollifier_scaled(x * x - 1, 0.1) * 2 * x);
}

TEST(Differentiate, WithRespectToEps) {
  const Expr d = differentiate(parse("x/eps + eps^3", kSig), kEpsVar);
  EXPECT_DOUBLE_EQ(ev(d, 0, 2, 0.5), -2 / 0.25 + 3 * 0.25);
}

TEST(ToFunctionNet, Examples) {
  const EpsGrid grid = EpsGrid::dyadic();
  const Box D({-1, -2}, {1, 2});
  const FunctionNet f = parse_net({"x1/eps"}, kSig, grid, D);
  for (std::size_t i : grid.active_indices()) {
    const double p[2] = {0.5, -1.5};
    EXPECT_EQ(f.scalar(grid[i], p), -1.5 / grid[i]);
  }
  EXPECT_TRUE(f.symbolic());
  const FunctionNet fx = f.partial(1);
  const double p[2] = {0.0, 1.0};
  EXPECT_EQ(fx.scalar(0.25, p), 4.0);

  const FunctionNet H = parse_net({"H(t)"}, kSig, grid, D);
  const PointSet pts = sample_box(D, 65, 64);
  for (std::size_t i : grid.active_indices()) {
    for (std::size_t k = 0; k < pts.size(); ++k) {
      const double v = H.scalar(grid[i], pts[k]);
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, Mollifier::instance().l1_norm());
    }
  }

  try {
    parse_net({"sqrt(x1)"}, kSig, grid, D);
    FAIL() << "sqrt of negative values accepted";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DomainEvaluationError);
    EXPECT_NE(std::string(e.what()).find("eps"), std::string::npos);
  }
  EXPECT_NO_THROW(parse_net({"sqrt(x1 + 3)"}, kSig, grid, D));
}

TEST(Mollifier, MassAndRamp) {
  const Mollifier& m = Mollifier::instance();
  EXPECT_NEAR(integrate([&](double x) { return m.rho(x); }, -1, 1, 400), 1.0, 1e-12);
  EXPECT_NEAR(m.mass(), 1.0, 1e-12);
  EXPECT_EQ(m.ramp(-1.0), 0.0);
  EXPECT_EQ(m.ramp(1.0), 1.0);
  // R' = rho through R(b) - R(a) = int_a^b rho
  for (double a : {-0.95, -0.5, -0.1, 0.0, 0.3, 0.8}) {
    for (double w : {1e-3, 0.05, 0.2}) {
      const double b = std::min(a + w, 1.0);
      EXPECT_NEAR(m.ramp(b) - m.ramp(a), integrate([&](double x) { return m.rho(x); }, a, b, 40), 1e-12)
          << a << " " << b;
    }
  }
  for (double x : {-1.5, -1.0, 1.0, 2.0}) EXPECT_EQ(m.rho(x), 0.0);
  for (double x : {-0.99, -0.5, 0.0, 0.7}) EXPECT_GT(m.rho(x), 0.0);
}

TEST(DslProperty, PrintRoundTrip) {
  gen::for_all(200, 31, [&](gen::Rng& rng, int c) {
    std::string src = gen::smooth_expr(rng, {"t", "x", "eps"}, 4);
    if (rng.coin()) src = "H(" + src + ") - " + gen::smooth_expr(rng, {"t", "x"}, 2) + "/eps^2";
    if (rng.coin()) src = "M(" + src + ", " + std::to_string(rng.integer(0, 3)) + ") + LogEps";
    SCOPED_TRACE("case " + std::to_string(c) + ": " + src);
    const Expr e = parse(src, kSig);
    const std::string printed = print(e, kSig);
    const Expr back = parse(printed, kSig);
    EXPECT_TRUE(equal(e, back)) << printed;
    EXPECT_EQ(print(back, kSig), printed);
  });
}

TEST(DslProperty, DerivativeMatchesFiniteDifferences) {
  int compared = 0;
  gen::for_all(150, 32, [&](gen::Rng& rng, int c) {
    const std::string src = gen::smooth_expr(rng, {"t", "x", "eps"}, 4);
    SCOPED_TRACE("case " + std::to_string(c) + ": " + src);
    const Expr e = parse(src, kSig);
    const std::size_t var = static_cast<std::size_t>(rng.integer(0, 1));
    const Expr d = differentiate(e, var);
    for (int k = 0; k < 5; ++k) {
      double p[2] = {rng.uniform(-1, 1), rng.uniform(-1, 1)};
      const double eps = rng.uniform(0.1, 1.0);
      // fourth-order central difference
      const double h = 1e-3;
      auto at = [&](double s) {
        double q[2] = {p[0], p[1]};
        q[var] += s;
        return Program(e).eval(q, eps);
      };
      const double fd = (-at(2 * h) + 8 * at(h) - 8 * at(-h) + at(-2 * h)) / (12 * h);
      const double ex = Program(d).eval(p, eps);
      EXPECT_NEAR(ex, fd, 1e-6 * std::max(1.0, std::abs(ex))) << "at (" << p[0] << ", " << p[1] << ")";
      ++compared;
    }
  });
  EXPECT_EQ(compared, 750);
}

TEST(DslProperty, HeavisideIsConstantOutsideTheEpsBand) {
  const Expr H = parse("H(t)", kSig);
  gen::for_all(300, 33, [&](gen::Rng& rng, int c) {
    const double eps = std::pow(2.0, -rng.uniform(0, 30));
    const double s = rng.uniform(1.0, 1e3);
    SCOPED_TRACE("case " + std::to_string(c));
    EXPECT_EQ(ev(H, -s * eps, 0, eps), 0.0) << eps;
    EXPECT_EQ(ev(H, s * eps, 0, eps), 1.0) << eps;
    EXPECT_EQ(heaviside_mollified(-eps, eps), 0.0);
    EXPECT_EQ(heaviside_mollified(eps, eps), 1.0);
  });
}
