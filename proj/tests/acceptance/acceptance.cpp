// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fail.
// usage: acceptance <path to colombeau cli> <scratch dir>

#include <sys/wait.h>

#include <algorithm>
#include <cfloat>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <string>
#include <vector>

#include "app/gallery.hpp"
#include "colombeau/extension.hpp"
#include "colombeau/frobenius.hpp"
#include "colombeau/gf_core.hpp"
#include "colombeau/ivp.hpp"
#include "colombeau/param.hpp"
#include "colombeau/rhs_dsl.hpp"
#include "generators.hpp"

using namespace colombeau;
namespace fs = std::filesystem;

namespace {

std::string g_cli;
fs::path g_dir;

// Collects failed checks for one criterion.
class Check {
 public:
  void expect(bool ok, const std::string& what) {
    if (!ok && fails_.size() < 5) fails_.push_back(what);
    if (!ok) ++count_;
  }
  void note(const std::string& s) { notes_.push_back(s); }
  bool ok() const { return count_ == 0; }
  std::string summary() const {
    std::string out;
    for (const auto& n : notes_) out += (out.empty() ? "" : "; ") + n;
    if (count_ > 0) {
      out += (out.empty() ? "" : "; ") + std::to_string(count_) + " failed:";
      for (const auto& f : fails_) out += " [" + f + "]";
    }
    return out;
  }

 private:
  std::vector<std::string> fails_, notes_;
  int count_ = 0;
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t).count();
}

IvpProblem ivp(const std::vector<std::string>& rhs, double I, double U0, double U1, const std::string& t0, double t0_limit,
               const std::vector<std::string>& x0, double alpha, double L0, double L1, double beta,
               const EpsGrid& grid = EpsGrid::dyadic(), const dsl::Definitions& defs = {}) {
  const std::size_t n = rhs.size();
  IvpProblem p;
  p.I = Box::interval(-I, I);
  p.U = Box(std::vector<double>(n, U0), std::vector<double>(n, U1));
  p.F = parse_net(rhs, dsl::Signature::ode(n), grid, product(p.I, p.U), defs);
  p.t0 = t0_limit;
  p.t0_net = point_net({t0}, grid);
  p.x0_net = point_net(x0, grid, defs);
  p.alpha = alpha;
  p.L = Box(std::vector<double>(n, L0), std::vector<double>(n, L1));
  p.beta = beta;
  return p;
}

ParamIvpProblem param_ivp(const std::string& rhs, bool with_p, double x0, double alpha, double beta) {
  const EpsGrid grid = EpsGrid::dyadic();
  ParamIvpProblem q;
  IvpProblem& p = q.base;
  p.I = Box::interval(-3, 3);
  p.U = Box::interval(-10, 10);
  q.P = with_p ? Box::interval(-1, 1) : Box({}, {});
  Box dom = product(p.I, p.U);
  if (with_p) dom = product(dom, q.P);
  p.F = parse_net({rhs}, dsl::Signature::ode(1, with_p ? 1 : 0), grid, dom);
  p.t0 = 0.0;
  p.t0_net = point_net({"0"}, grid);
  p.x0_net = point_net({gen::num(x0)}, grid);
  p.alpha = alpha;
  p.L = Box::point(std::vector<double>{x0});
  p.beta = beta;
  return q;
}

double x_at(const Trajectory& u, double t) { return u(t)[0]; }

double scalar(const FunctionNet& f, double eps, std::vector<double> in) { return f.scalar(eps, in); }

// f(x) = x/2 + atan(sqrt2 x) / (2 sqrt2), inverted by Newton.
double f_inverse(double s) {
  const double r2 = std::sqrt(2.0);
  double x = 2.0 * s;
  for (int k = 0; k < 60; ++k) {
    const double step = (x / 2 + std::atan(r2 * x) / (2 * r2) - s) / (0.5 + 0.5 / (1 + 2 * x * x));
    x -= step;
    if (std::abs(step) <= 1e-15 * (1 + std::abs(x))) break;
  }
  return x;
}

void h_formula(Check& c) {
  const auto start = std::chrono::steady_clock::now();
  gen::Rng rng(101);
  for (int k = 0; k < 5; ++k) {
    IvpProblem p = gen::smooth_ivp(rng, k % 2 + 1, EpsGrid::dyadic());
    p.alpha = 1.0;
    p.beta = 0.5;
    p.L = Box::point(std::vector<double>(p.x0_net[p.grid().active_indices().front()].begin(),
                                         p.x0_net[p.grid().active_indices().front()].end()));
    const auto cert = certify_hypotheses(p);
    const double want = std::min(1.0, 0.5 / cert.a);
    c.expect(cert.h == want, "case " + std::to_string(k) + ": h " + gen::num(cert.h) + " vs " + gen::num(want));
    c.expect(cert.J.lower(0) == p.t0 - want && cert.J.upper(0) == p.t0 + want, "J endpoints");
  }
  const double secs = seconds_since(start) / 5;
  c.note("per problem " + fmt(secs) + " s");
  c.expect(secs < 1.0, "runtime");
}

void jump_ode(Check& c) {
  const auto start = std::chrono::steady_clock::now();
  const IvpProblem p = ivp({"H(t)"}, 4, -10, 10, "-1", -1, {"0"}, 2.5, 0, 0, 3);
  const SolutionNet sol = solve_generalized(p);
  const double secs = seconds_since(start);
  const double rho1 = dsl::Mollifier::instance().l1_norm();
  c.expect(sol.cert.a <= rho1, "a " + gen::num(sol.cert.a) + " > |rho|_1");
  c.expect(sol.cert.log_bound.has_value(), "log bound");
  double worst = 0.0;
  for (std::size_t i : sol.cert.grid.active_indices()) {
    const double eps = sol.cert.grid[i];
    if (eps > std::ldexp(1.0, -10)) continue;
    worst = std::max(worst, std::abs(scalar(sol.base, eps, {1.0}) - 1.0));
  }
  c.expect(worst <= 1e-6, "|u(1) - 1| = " + fmt(worst));
  c.note("a = " + fmt(sol.cert.a) + ", max |u(1) - 1| = " + fmt(worst) + ", " + fmt(secs) + " s");
  c.expect(secs < 10.0, "runtime");
}

void counterexamples(Check& c) {
  auto order_of = [](const IvpProblem& p) {
    try {
      certify_hypotheses(p);
    } catch (const UnboundedRhsError& e) {
      return e.growth_order();
    }
    return std::nan("");
  };
  const double arctan = order_of(ivp({"(2 - 1/(1+x^2))/eps"}, 2, -100, 100, "0", 0, {"0"}, 1, 0, 0, 1));
  const double linear = order_of(ivp({"x/eps"}, 2, -10, 10, "0", 0, {"1"}, 1, 1, 1, 1));
  c.expect(std::abs(arctan - 1) <= 0.1, "arctan order " + fmt(arctan));
  c.expect(std::abs(linear - 1) <= 0.1, "x/eps order " + fmt(linear));
  std::string orders = "orders arctan " + fmt(arctan) + ", x/eps " + fmt(linear);
  for (auto [g, N] : {std::pair<std::string, double>{"1/eps", 1.0}, {"eps^-2", 2.0}, {"1/sqrt(eps)", 0.5}}) {
    const auto defs = parse_definitions({{"g", g}});
    const IvpProblem p = ivp({"-t/(x+1)*g"}, 2, -1, 1, "0", 0, {"0"}, 1, 0, 0, 0.999, EpsGrid::dyadic(), defs);
    const double o = order_of(p);
    c.expect(std::abs(o - N) <= 0.1, "shrink g = " + g + ": order " + fmt(o));
    orders += ", shrink(" + g + ") " + fmt(o);
  }
  const auto defs = parse_definitions({{"g", "1/eps"}});
  const IvpProblem p = ivp({"-t/(x+1)*g"}, 2, -1, 1, "0", 0, {"0"}, 1, 0, 0, 0.999, EpsGrid::dyadic(), defs);
  double worst = 0.0;
  for (std::size_t i : p.grid().active_indices()) {
    const double eps = p.grid()[i];
    if (eps > std::ldexp(1.0, -8)) continue;
    const auto t = escape_time(p, i, 1.0);
    if (!t) {
      c.expect(false, "no escape at eps " + fmt(eps));
      continue;
    }
    worst = std::max(worst, std::abs(*t / std::sqrt(eps) - 1.0));
  }
  c.expect(worst <= 0.05, "|t* sqrt(g) - 1| = " + fmt(worst));
  c.note(orders + "; max |t* sqrt(g) - 1| = " + fmt(worst));
}

void moderateness(Check& c) {
  const auto orders = default_orders();
  // e^{1/eps} overflows a double below eps = 2^-10
  const EpsGrid small = EpsGrid::dyadic(0, 9, 1.0);
  const auto e = parse_net({"exp(t/eps)"}, dsl::Signature({"t"}), small, Box::interval(-1, 1));
  const GrowthClass ce = classify_growth(sup_on_compact(e, Box::interval(-1, 1)), orders);
  c.expect(ce.kind == GrowthKind::SuperPolynomial, "exp(t/eps): " + ce.describe());

  const auto f = FunctionNet::from_lambda(EpsGrid::dyadic(), Box::interval(-2, 2), 1,
                                          [](double eps, std::span<const double> x, std::span<double> out) {
                                            out[0] = f_inverse(x[0] / eps);
                                          });
  const GrowthClass cf = classify_growth(sup_on_compact(f, Box::interval(-1, 1)), orders);
  c.expect(cf.kind == GrowthKind::Moderate && cf.order == 1 && std::abs(cf.fit.slope + 1) <= 0.1,
           "f^-1(t/eps): " + cf.describe());
  const CBoundResult r = check_cbounded(f, Box::interval(-1, 1), Box::whole_space(1));
  c.expect(!r.ok(), "f^-1(t/eps) certified c-bounded");
  c.note("exp: " + to_string(ce.kind) + "; f^-1: " + to_string(cf.kind) + " slope " + fmt(cf.fit.slope) +
         (r.ok() ? "" : ", not c-bounded (" + r.failure->reason + ")"));
}

void ideal(Check& c) {
  const IvpProblem p = ivp({"sin(t) + cos(x)"}, 3, -10, 10, "0", 0, {"0.5"}, 1, 0.5, 0.5, 1);
  const SolutionNet s1 = solve_generalized(p);
  // eps M(eps u) = rho(u): a fixed bump around x = 0.5
  IvpProblem q = ivp({"sin(t) + cos(x) + eps^7*M(eps*(x - 0.5))"}, 3, -10, 10, "0", 0, {"0.5 + eps^6"}, 1, 0.5,
                     0.5, 1);
  q.L = p.L.expanded(0.01);
  GeneralizedSolveOptions o;
  o.replay = &s1;
  o.certificate = s1.cert;
  const SolutionNet s2 = solve_generalized(q, o);
  const GapReport g = uniqueness_gap(s1, s2, s1.cert, s1.J_dagger());
  GrowthOptions go;
  go.floor_per_eps = g.floor;
  const LogLogFit fit = fit_loglog(g.gap, go);
  const double bound = 6 - g.h * g.C4 - 0.5;
  c.expect(fit.slope >= bound, "slope " + fmt(fit.slope) + " < " + fmt(bound));
  c.expect(g.classification.negligible_to(3), "gap " + g.classification.describe());
  c.note("slope " + fmt(fit.slope) + " >= " + fmt(bound) + " (h C4 = " + fmt(g.h * g.C4) + "), " +
         g.classification.describe());
}

void picard_vs_rk(Check& c) {
  gen::Rng rng(606);
  SolveOptions pic;
  pic.method = Method::Picard;
  double worst = 0.0;
  for (int k = 0; k < 20; ++k) {
    const IvpProblem p = gen::smooth_ivp(rng, k % 2 + 1, EpsGrid::dyadic());
    const auto cert = certify_hypotheses(p);
    for (std::size_t i : cert.grid.active_indices()) {
      const auto a = solve_classical_per_eps(p, cert, i);
      const auto b = solve_classical_per_eps(p, cert, i, pic);
      double d = 0.0;
      for (double t : detail::time_lattice(a.trajectory->t_lo(), a.trajectory->t_hi(), 257)) {
        const auto ua = (*a.trajectory)(t), ub = (*b.trajectory)(t);
        for (std::size_t j = 0; j < ua.size(); ++j) d = std::max(d, std::abs(ua[j] - ub[j]));
      }
      worst = std::max(worst, d);
      c.expect(d <= 1e-6, "problem " + std::to_string(k) + " eps " + fmt(cert.grid[i]) + ": " + fmt(d));
    }
  }
  c.note("20 problems, max sup difference " + fmt(worst));
}

void extension(Check& c) {
  // a classical solution of x' = sin(3t) + cos(x) on [-0.5, 0.5], |x'| <= 2
  const IvpProblem p = ivp({"sin(3*t) + cos(x)"}, 3, -10, 10, "0", 0, {"0"}, 1, 0, 0, 1);
  const double x0 = 0.2;
  const auto sys = ode_system(p.F, 0.1, 1, {}, std::vector<double>{x0});
  const auto fwd = integrate(sys, -0.5, std::span<const double>(&x0, 1), 0.5);
  ExtensionOptions o;
  o.speed_bound = 2.0;
  const double delta = 0.05, a2 = -0.3, b2 = 0.3;
  const auto g = extend_smoothly(fwd, -1, 1, a2, b2, delta, o);
  const double eta = g->eta();
  c.expect(eta > 0.0, "eta");
  const double fa = x_at(*fwd, -0.5), fb = x_at(*fwd, 0.5);
  double lo = std::min(fa, fb), hi = std::max(fa, fb);
  for (double t : detail::time_lattice(-0.5, 0.5, 20001)) {
    lo = std::min(lo, x_at(*fwd, t));
    hi = std::max(hi, x_at(*fwd, t));
  }
  int copy_bad = 0, range_bad = 0;
  for (double t : detail::time_lattice(-1, 1, 10000)) {
    const double v = x_at(*g, t);
    if (t >= a2 && t <= b2 && v != x_at(*fwd, t)) ++copy_bad;
    // the image of an interval is an interval; its sampled hull is widened by the sampling error
    const bool in_range = v >= lo - 1e-9 && v <= hi + 1e-9;
    if (!in_range && std::abs(v - fa) >= delta && std::abs(v - fb) >= delta) ++range_bad;
  }
  c.expect(copy_bad == 0, std::to_string(copy_bad) + " lattice points differ on the inner interval");
  c.expect(range_bad == 0, std::to_string(range_bad) + " lattice points outside the range");
  double worst1 = 0.0, worst2 = 0.0;
  const double seams[4] = {-0.5 + eta, -0.5 + 2 * eta, 0.5 - 2 * eta, 0.5 - eta};
  auto d1 = [&](double t) {
    double d[1];
    g->derivative(t, d);
    return d[0];
  };
  // one-sided second-order stencils on each side of a seam
  const double hd = 1e-5;
  auto d2_left = [&](double s) { return (3 * d1(s) - 4 * d1(s - hd) + d1(s - 2 * hd)) / (2 * hd); };
  auto d2_right = [&](double s) { return (-3 * d1(s) + 4 * d1(s + hd) - d1(s + 2 * hd)) / (2 * hd); };
  for (double s : seams) {
    const double l1 = d1(s - 1e-9), r1 = d1(s + 1e-9);
    const double e1 = std::abs(l1 - r1) / std::max(1.0, std::abs(l1));
    const double l2 = d2_left(s), r2 = d2_right(s);
    const double e2 = std::abs(l2 - r2) / std::max(1.0, std::abs(l2));
    worst1 = std::max(worst1, e1);
    worst2 = std::max(worst2, e2);
    c.expect(e1 <= 1e-4, "u' jumps at " + fmt(s) + " by " + fmt(e1));
    c.expect(e2 <= 1e-4, "u'' jumps at " + fmt(s) + " by " + fmt(e2));
  }
  c.note("eta " + fmt(eta) + ", seam jumps u' " + fmt(worst1) + ", u'' " + fmt(worst2));
}

void sensitivity(Check& c) {
  const ParamIvpProblem q = param_ivp("p*x", true, 1.0, 1.0, 0.5);
  const auto ps = default_p_lattice(q);
  const ParamSolutionNet sol = solve_with_parameters(q, ps);
  const double h = sol.cert.h;
  double wr = 0.0, wd = 0.0;
  for (const auto& p : ps) {
    for (double tf : {-0.9, -0.4, 0.3, 0.9}) {
      const double t = tf * h;
      const NumberNet r = sensitivity_residual(sol, q, p, t);
      for (std::size_t i : sol.cert.grid.active_indices()) {
        wr = std::max(wr, r[i]);
        double d[1];
        sol.solver->dp(i, p, 0, t, d);
        wd = std::max(wd, std::abs(d[0] - t * std::exp(p[0] * t)));
      }
    }
  }
  c.expect(wr <= 1e-5, "sensitivity residual " + fmt(wr));
  c.expect(wd <= 1e-5, "d_p u error " + fmt(wd));
  c.note(std::to_string(ps.size()) + " p values, residual " + fmt(wr) + ", d_p u error " + fmt(wd));
}

void initial_family(Check& c) {
  const InitialValueFamily fam = solve_with_initial_data(param_ivp("x", false, 0.0, 1.0, 1.0), 0.2);
  const EpsGrid& g = fam.v.cert.grid;
  const std::vector<double> lat{-1.0, -0.5, 0.0, 0.5, 1.0};
  auto at = [](const Box& B, double s) { return B.center()[0] + s * 0.5 * B.width(0); };
  double wv = 0.0, w1 = 0.0, wf = 0.0;
  int flows = 0;
  for (std::size_t i : g.active_indices()) {
    const double eps = g[i];
    for (double a : lat)
      for (double b : lat) {
        const double t1 = at(fam.J1, a), x1 = at(fam.U1, b);
        for (double cc : lat) {
          const double t = at(fam.J, cc);
          wv = std::max(wv, std::abs(scalar(fam.solution, eps, {t1, x1, t}) - x1 * std::exp(t - t1)));
        }
        if (fam.J.contains(std::span<const double>(&t1, 1)))
          w1 = std::max(w1, std::abs(scalar(fam.solution, eps, {t1, x1, t1}) - x1));
      }
  }
  const double eps = g[g.active_indices().back()];
  for (double a : {-0.6, 0.0, 0.4})
    for (double b : {-0.4, 0.2}) {
      const double t1 = at(fam.J1, a), x1 = at(fam.U1, b);
      for (double t2 : {at(fam.J1, -0.5), at(fam.J1, 0.5)}) {
        if (!fam.J1.contains_interior(std::span<const double>(&t2, 1))) continue;
        const double x2 = scalar(fam.solution, eps, {t1, x1, t2});
        if (!fam.U1.contains_interior(std::span<const double>(&x2, 1))) continue;
        for (double t : {at(fam.J, -0.8), at(fam.J, 0.0), at(fam.J, 0.8)}) {
          if (!fam.J.contains(std::span<const double>(&t, 1))) continue;
          wf = std::max(wf, std::abs(scalar(fam.solution, eps, {t2, x2, t}) - scalar(fam.solution, eps, {t1, x1, t})));
          ++flows;
        }
      }
    }
  c.expect(wv <= 1e-6, "x1 e^(t - t1) error " + fmt(wv));
  c.expect(fam.exact_at_t1 && w1 <= 2 * DBL_EPSILON, "value at t1 off by " + fmt(w1));
  c.expect(flows > 10 && wf <= 1e-5, "flow error " + fmt(wf) + " over " + std::to_string(flows));
  c.note("h " + fmt(fam.h) + ", family error " + fmt(wv) + ", at t1 " + fmt(w1) + ", flow " + fmt(wf));
}

FrobeniusProblem frob(std::vector<std::string> F, std::size_t m, std::vector<std::string> y0, double L0, double L1) {
  const EpsGrid grid = EpsGrid::dyadic(0, 14);
  FrobeniusProblem p;
  p.U = Box(std::vector<double>(2, -2), std::vector<double>(2, 2));
  p.V = Box(std::vector<double>(m, -5), std::vector<double>(m, 5));
  p.F = parse_net(F, dsl::Signature::frobenius(2, m), grid, product(p.U, p.V));
  p.x0_net = point_net({"0", "0"}, grid);
  p.y0_net = point_net(y0, grid);
  p.alpha = 1.0;
  p.L = Box(std::vector<double>(m, L0), std::vector<double>(m, L1));
  p.beta = 1.0;
  return p;
}

void frobenius(Check& c) {
  const auto yy = frob({"y", "y"}, 1, {"1"}, 1, 1);
  const IntegrabilityReport ry = check_integrability(yy);
  c.expect(ry.integrable && ry.classification.kind == GrowthKind::Negligible,
           "(y, y): " + ry.classification.describe());
  const FrobeniusSolution s = solve_total(yy);
  double we = 0.0, wr = 0.0;
  for (std::size_t i : s.cert.grid.active_indices()) {
    wr = std::max(wr, s.residual[i]);
    for (double a : {-1.0, -0.5, 0.0, 0.5, 1.0})
      for (double b : {-1.0, -0.5, 0.0, 0.5, 1.0}) {
        const double x1 = a * s.domain.upper(0), x2 = b * s.domain.upper(1);
        we = std::max(we, std::abs(s.u(s.cert.grid[i], std::vector<double>{x1, x2})[0] - std::exp(x1 + x2)));
      }
  }
  c.expect(we <= 1e-6, "e^(x1 + x2) error " + fmt(we));
  c.expect(wr <= 1e-6, "residual " + fmt(wr));

  const auto xz = frob({"x2", "0"}, 1, {"0"}, 0, 0);
  const IntegrabilityReport rx = check_integrability(xz);
  c.expect(!rx.integrable, "(x2, 0) accepted");
  bool rejected = false;
  try {
    solve_total(xz);
  } catch (const Error& e) {
    rejected = e.code() == ErrorCode::IntegrabilityRejected;
  }
  c.expect(rejected, "solve_total did not reject (x2, 0)");
  double wp = 0.0;
  for (const auto& pr : rx.probes) {
    const double want = std::abs(pr.v1[1] * pr.v2[0] - pr.v1[0] * pr.v2[1]);
    for (std::size_t i : xz.grid().active_indices()) wp = std::max(wp, std::abs(pr.values[i] - want));
  }
  c.expect(wp <= 1e-10, "probe error " + fmt(wp));

  const auto A = frob({"1", "2", "-0.5", "0.25"}, 2, {"0.5", "-0.5"}, -1, 1);
  const FrobeniusSolution sa = solve_total(A);
  std::vector<std::pair<std::vector<double>, std::vector<double>>> probes;
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j) {
      std::vector<double> v(2, 0.0), w(2, 0.0);
      v[i] = 0.5;
      w[j] = 1.0;
      probes.emplace_back(v, w);
    }
  probes.push_back({{0.6, -0.8}, {0.28, 0.96}});
  const KNetReport k = k_net_residual(A, sa, probes);
  double wk = 0.0;
  for (std::size_t i : sa.cert.grid.active_indices()) wk = std::max(wk, k.sup_k[i]);
  c.expect(wk <= 1e-12, "k for constant A " + fmt(wk));
  c.note("e^(x1+x2) error " + fmt(we) + ", residual " + fmt(wr) + ", probe error " + fmt(wp) + ", sup k " + fmt(wk));
}

int run_cli(const std::string& args) {
  const int st = std::system((g_cli + " " + args + " > /dev/null 2>&1").c_str());
  return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

void determinism(Check& c) {
  int compared = 0;
  for (const auto& e : app::gallery()) {
    const std::string name(e.name);
    const fs::path a = g_dir / ("a-" + name), b = g_dir / ("b-" + name);
    fs::remove_all(a);
    fs::remove_all(b);
    const int ea = run_cli("run " + name + " --out " + a.string());
    const int eb = run_cli("run " + name + " --out " + b.string());
    c.expect(ea == eb && ea != 1, name + ": exit " + std::to_string(ea) + "/" + std::to_string(eb));
    if (!fs::exists(a)) continue;
    std::size_t na = 0;
    for (const auto& f : fs::directory_iterator(a)) {
      ++na;
      if (f.path().extension() != ".csv") continue;
      ++compared;
      c.expect(slurp(f.path()) == slurp(b / f.path().filename()), name + "/" + f.path().filename().string());
    }
    c.expect(na == static_cast<std::size_t>(std::distance(fs::directory_iterator(b), fs::directory_iterator())),
             name + ": file lists differ");
  }
  c.expect(compared > 0, "no CSVs written");
  c.note(std::to_string(compared) + " CSVs compared");
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 3) {
    std::fprintf(stderr, "usage: acceptance <colombeau cli> <scratch dir>\n");
    return 2;
  }
  g_cli = argv[1];
  g_dir = argv[2];
  fs::create_directories(g_dir);

  const std::vector<std::pair<std::string, std::function<void(Check&)>>> criteria = {
      {"h-formula", h_formula},
      {"jump ODE", jump_ode},
      {"counterexamples", counterexamples},
      {"moderateness classifier", moderateness},
      {"ideal property", ideal},
      {"Picard vs RK", picard_vs_rk},
      {"extension", extension},
      {"parameter sensitivity", sensitivity},
      {"initial-value family", initial_family},
      {"Frobenius", frobenius},
      {"determinism", determinism},
  };
  int failed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    Check c;
    const auto start = std::chrono::steady_clock::now();
    try {
      criteria[k].second(c);
    } catch (const std::exception& e) {
      c.expect(false, std::string("exception: ") + e.what());
    }
    std::printf("%s criterion %zu (%s): %s [%.1f s]\n", c.ok() ? "PASS" : "FAIL", k + 1, criteria[k].first.c_str(),
                c.summary().c_str(), seconds_since(start));
    std::fflush(stdout);
    if (!c.ok()) ++failed;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
