#include "colombeau/ivp.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <limits>

#include "colombeau/dsl/interval.hpp"
#include "colombeau/errors.hpp"
#include "colombeau/extension.hpp"
#include "colombeau/parallel.hpp"

namespace colombeau {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

void invalid(const std::string& what) { throw Error(ErrorCode::InvalidProblem, what); }

using detail::time_lattice;

// Evaluates a per-eps trajectory family; mode 1 gives the t-derivative.
class TrajectoryNetImpl : public NetImpl {
 public:
  using Family = std::vector<std::shared_ptr<const Trajectory>>;
  TrajectoryNetImpl(std::shared_ptr<const Family> family, EpsGrid grid, std::size_t codim, int mode)
      : NetImpl(1, codim), family_(std::move(family)), grid_(std::move(grid)), mode_(mode) {}

  void eval(double eps, std::span<const double> x, std::span<double> out) const override {
    const auto i = grid_.find(eps);
    if (!i || !(*family_)[*i]) {
      throw Error(ErrorCode::InvalidArgument, "no solution stored for eps = " + num(eps));
    }
    if (mode_ == 0) (*family_)[*i]->eval(x[0], out);
    else (*family_)[*i]->derivative(x[0], out);
  }
  std::shared_ptr<const NetImpl> partial(std::size_t var) const override {
    if (mode_ == 0 && var == 0) return std::make_shared<TrajectoryNetImpl>(family_, grid_, codim(), 1);
    return NetImpl::partial(var);
  }

 private:
  std::shared_ptr<const Family> family_;
  EpsGrid grid_;
  int mode_;
};

bool same_mesh(const Trajectory* a, const Trajectory* b) {
  const auto* ta = dynamic_cast<const TwoSidedTrajectory*>(a);
  const auto* tb = dynamic_cast<const TwoSidedTrajectory*>(b);
  if (!ta || !tb) return false;
  auto mesh = [](const Trajectory& t) {
    const auto* d = dynamic_cast<const DenseTrajectory*>(&t);
    return d ? d->mesh() : std::vector<double>{};
  };
  const auto fa = mesh(ta->forward()), fb = mesh(tb->forward());
  const auto ba = mesh(ta->backward()), bb = mesh(tb->backward());
  return !fa.empty() && fa == fb && ba == bb;
}

}  // namespace

std::string to_string(Method m) { return m == Method::Picard ? "picard" : "rk"; }

Box HypothesisCertificate::J_eps(std::size_t i) const {
  return Box::interval(t0 - h + delta_eps[i], t0 + h - delta_eps[i]);
}

Box HypothesisCertificate::J_tilde(std::size_t i) const {
  return Box::interval(t0 - h + 2 * delta_eps[i], t0 + h - 2 * delta_eps[i]);
}

void validate(const IvpProblem& p) {
  const std::size_t n = p.U.dim();
  if (p.I.dim() != 1) invalid("I must be an interval");
  if (n == 0 || !p.U.has_interior()) invalid("U must be a non-empty open box");
  if (p.F.dim() < 1 + n || p.F.codim() != n) {
    invalid("F must map I x U into R^" + std::to_string(n));
  }
  if (!(p.t0_net.grid() == p.F.grid()) || !(p.x0_net.grid() == p.F.grid())) {
    throw Error(ErrorCode::GridMismatch, "t0, x0 and F must share one eps grid");
  }
  if (p.t0_net.dim() != 1 || p.x0_net.dim() != n || p.L.dim() != n) {
    invalid("t0, x0 or L has the wrong dimension");
  }
  if (!(p.alpha > 0.0)) invalid("alpha must be positive");
  if (!(p.beta > 0.0)) invalid("beta must be positive");
  if (!(p.I.margin_of(Box::interval(p.t0 - p.alpha, p.t0 + p.alpha)) > 0.0)) {
    invalid("[t0 - alpha, t0 + alpha] is not compactly contained in I = " + p.I.to_string());
  }
  if (!(p.U.margin_of(p.L_beta()) > 0.0)) {
    invalid("L_beta = " + p.L_beta().to_string() + " is not compactly contained in U = " + p.U.to_string());
  }
  const auto& grid = p.F.grid();
  for (std::size_t i : grid.active_indices()) {
    if (!p.L.contains(p.x0_net[i])) {
      invalid("x0 at eps = " + num(grid[i]) + " is not in L = " + p.L.to_string());
    }
  }
  const auto ns = near_standard_limit(p.t0_net);
  if (!ns.limit) invalid("t0~ is not near-standard");
  if (std::abs((*ns.limit)[0] - p.t0) > 1e-6 * (1.0 + std::abs(p.t0))) {
    invalid("t0~ tends to " + num((*ns.limit)[0]) + ", not to t0 = " + num(p.t0));
  }
}

OdeSystem ode_system(const FunctionNet& F, double eps, std::size_t n, std::span<const double> params,
                     std::span<const double> x_ref) {
  OdeSystem sys;
  sys.dim = n;
  const std::vector<double> par(params.begin(), params.end());
  const std::size_t width = 1 + n + par.size();
  sys.rhs = [F, eps, n, par, width](double t, std::span<const double> x, std::span<double> dx) {
    double small[32];
    std::vector<double> big;
    double* in = small;
    if (width > 32) {
      big.resize(width);
      in = big.data();
    }
    in[0] = t;
    std::copy(x.begin(), x.begin() + n, in + 1);
    std::copy(par.begin(), par.end(), in + 1 + n);
    F.eval(eps, std::span<const double>(in, width), dx);
  };
  std::vector<double> base(width, 0.0), dir(width, 0.0);
  std::copy(x_ref.begin(), x_ref.end(), base.begin() + 1);
  std::copy(par.begin(), par.end(), base.begin() + 1 + n);
  dir[0] = 1.0;
  sys.windows = F.feature_windows(eps, base, dir);
  return sys;
}

double lipschitz_on(const FunctionNet& F, const Box& Q, double eps, std::size_t n, const SupOptions& opt) {
  std::vector<FunctionNet> d;
  for (std::size_t j = 0; j < n; ++j) d.push_back(F.partial(1 + j));
  const PointSet pts = sample_box(Q, opt.per_axis, opt.interior_probes);
  std::vector<double> rows(F.codim()), out(F.codim());
  double m = 0.0;
  for (std::size_t k = 0; k < pts.size(); ++k) {
    std::fill(rows.begin(), rows.end(), 0.0);
    for (std::size_t j = 0; j < n; ++j) {
      d[j].eval(eps, pts[k], out);
      for (std::size_t i = 0; i < rows.size(); ++i) rows[i] += std::abs(out[i]);
    }
    m = std::max(m, sup_norm(rows));
  }
  return m;
}

namespace detail {

std::vector<double> time_lattice(double lo, double hi, std::size_t n) {
  std::vector<double> t(n);
  for (std::size_t k = 0; k < n; ++k) t[k] = k + 1 == n ? hi : lo + (hi - lo) * double(k) / double(n - 1);
  return t;
}

std::shared_ptr<const Trajectory> extend_classical(const HypothesisCertificate& c, std::size_t i,
                                                   std::shared_ptr<const Trajectory> u, double* eta) {
  if (eta) *eta = 0.0;
  const double d = c.delta_eps[i];
  if (!(d > 0.0)) return u;
  const double a1 = u->t_lo(), b1 = u->t_hi();
  const double radius = std::min({c.beta / 10, 0.5 * c.W.depth((*u)(a1)), 0.5 * c.W.depth((*u)(b1))});
  ExtensionOptions eo;
  eo.speed_bound = c.a;
  auto ext = extend_smoothly(std::move(u), c.t0 - c.h, c.t0 + c.h, c.t0 - c.h + 2 * d, c.t0 + c.h - 2 * d,
                             radius, eo);
  if (eta) *eta = ext->eta();
  return ext;
}

HypothesisCertificate certify_on(const IvpProblem& prob, const std::optional<Box>& p_sup,
                                 const std::optional<Box>& p_log, const CertifyOptions& options) {
  const std::size_t n = prob.dim();
  const EpsGrid& grid = prob.grid();
  HypothesisCertificate c;
  c.t0 = prob.t0;
  c.alpha = prob.alpha;
  c.beta = prob.beta;
  c.L = prob.L;
  c.W = prob.L.expanded(prob.beta);
  c.Q = prob.Q();
  const Box Qf = p_sup ? product(c.Q, *p_sup) : c.Q;
  if (prob.F.dim() != Qf.dim()) invalid("F has " + std::to_string(prob.F.dim()) + " inputs, expected " + std::to_string(Qf.dim()));

  c.sup_F = sup_on_compact(prob.F, Qf, {}, options.sup);
  const BoundednessReport bounded = check_bounded(c.sup_F);
  if (!bounded.bounded) {
    throw UnboundedRhsError(ErrorCode::UnboundedRhs,
                            "sup over Q of |F_eps| grows like eps^-" + num(bounded.growth_order) +
                                " (max " + num(bounded.max_value) + ")",
                            bounded.growth_order);
  }
  for (std::size_t i : grid.active_indices()) c.lattice_max = std::max(c.lattice_max, c.sup_F[i]);

  // the lattice max is inflated by 5%, but never beyond a rigorous enclosure
  double a = 1.05 * c.lattice_max;
  {
    std::optional<double> iv = 0.0;
    for (std::size_t i : grid.active_indices()) {
      const auto b = interval_sup_bound(prob.F, Qf, grid[i]);
      if (!b) {
        iv.reset();
        break;
      }
      iv = std::max(*iv, *b);
    }
    c.interval_bound = iv;
    if (iv) a = std::max(c.lattice_max, std::min(a, *iv));
  }
  if (prob.a_override) {
    if (*prob.a_override < c.lattice_max * (1.0 - 1e-12)) {
      invalid("the supplied bound a = " + num(*prob.a_override) + " is below the sampled sup " +
              num(c.lattice_max));
    }
    a = *prob.a_override;
  }
  c.a = a;
  c.h = a > 0.0 ? std::min(prob.alpha, prob.beta / a) : prob.alpha;
  c.J = Box::interval(c.t0 - c.h, c.t0 + c.h);

  // shrink eps0 until |t0~_eps - t0| <= h/4
  double eps0 = grid.eps0();
  auto deviation = [&](double e0) {
    double d = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      if (grid[i] <= e0) d = std::max(d, std::abs(prob.t0_net[i][0] - prob.t0));
    }
    return d;
  };
  while (deviation(eps0) > c.h / 4) {
    double next = 0.0;
    for (double e : grid.values()) {
      if (e < eps0) {
        next = e;
        break;
      }
    }
    if (next == 0.0) invalid("no eps0 achieves |t0~_eps - t0| <= h/4");
    eps0 = next;
  }
  try {
    c.grid = grid.with_eps0(eps0);
  } catch (const Error&) {
    invalid("|t0~_eps - t0| <= h/4 needs eps0 = " + num(eps0) + ", leaving too few grid values");
  }

  c.delta_eps.assign(grid.size(), kNaN);
  for (std::size_t i : c.grid.active_indices()) {
    double d = 0.0;
    for (std::size_t k = i; k < grid.size(); ++k) d = std::max(d, std::abs(prob.t0_net[k][0] - prob.t0));
    c.delta_eps[i] = d;
  }

  // log bound on [t0 - h, t0 + h] x L_beta, skipping eps = 1
  {
    const Box K = p_log ? product(product(c.J, prob.L_beta()), *p_log) : product(c.J, prob.L_beta());
    std::vector<double> sup(grid.size(), kNaN), ratio(grid.size(), kNaN);
    const auto active = c.grid.active_indices();
    parallel_for(active.size(), [&](std::size_t a_) {
      const std::size_t i = active[a_];
      sup[i] = lipschitz_on(prob.F, K, grid[i], n, options.sup);
      if (grid[i] < 1.0) ratio[i] = sup[i] / std::log(1.0 / grid[i]);
    });
    double below_one = 0.0;
    for (double e : grid.values()) {
      if (e < 1.0 && e <= eps0) {
        below_one = e;
        break;
      }
    }
    try {
      const EpsGrid rg = grid.with_eps0(below_one);
      LogBound lb{0.0, NumberNet(rg, ratio), NumberNet(c.grid, sup)};
      if (check_bounded(lb.ratio).bounded) {
        for (std::size_t i : rg.active_indices()) lb.C1 = std::max(lb.C1, ratio[i]);
        c.log_bound = std::move(lb);
      }
    } catch (const Error&) {
      // too few eps < 1 to fit: no log bound
    }
  }
  return c;
}

}  // namespace detail

HypothesisCertificate certify_hypotheses(const IvpProblem& prob, const CertifyOptions& options) {
  validate(prob);
  if (prob.F.dim() != 1 + prob.dim()) invalid("F has parameter slots; use the parameter solver");
  return detail::certify_on(prob, std::nullopt, std::nullopt, options);
}

ClassicalSolution solve_classical_per_eps(const IvpProblem& prob, const HypothesisCertificate& cert,
                                          std::size_t i, const SolveOptions& options) {
  const EpsGrid& grid = cert.grid;
  if (i >= grid.size() || !grid.active(i)) {
    throw Error(ErrorCode::InvalidArgument, "eps index " + std::to_string(i) + " is not active");
  }
  const std::size_t n = prob.dim();
  const double eps = grid[i];
  const double ts = prob.t0_net[i][0];
  const auto x0 = prob.x0_net[i];
  const Box Je = cert.J_eps(i);
  const OdeSystem sys = ode_system(prob.F, eps, n, {}, x0);

  ClassicalSolution out;
  out.t_start = ts;
  if (options.method == Method::Picard) {
    if (n > 3) throw Error(ErrorCode::InvalidArgument, "Picard mode is limited to n <= 3");
    const auto res = picard_solve(sys, ts, x0, Je.lower(0), Je.upper(0), options.picard);
    const Box Lb = prob.L_beta().expanded(1e-12 * (1.0 + sup_norm(prob.L_beta().upper())));
    for (double t : time_lattice(Je.lower(0), Je.upper(0))) {
      const auto u = (*res.trajectory)(t);
      if (!Lb.contains(u)) {
        throw EscapeError(eps, t, "Picard fixed point leaves L_beta at t = " + num(t));
      }
    }
    out.trajectory = res.trajectory;
    out.picard_iterations = res.iterations;
    out.lipschitz = lipschitz_on(prob.F, cert.Q, eps, n);
    out.picard_budget = std::exp(cert.h * out.lipschitz);
  } else {
    IntegratorOptions io = options.integrator;
    io.stay_in = prob.L_beta();
    try {
      auto traj = integrate_both_ways(sys, ts, x0, Je.lower(0), Je.upper(0), io);
      for (const Trajectory* side : {&traj->forward(), &traj->backward()}) {
        const auto* d = dynamic_cast<const DenseTrajectory*>(side);
        out.steps += d->steps();
        out.rejected += d->rejected();
      }
      out.trajectory = traj;
    } catch (const EscapeError& e) {
      throw EscapeError(eps, e.time(), "at eps = " + num(eps) + ": " + e.what());
    }
  }
  for (double t : time_lattice(Je.lower(0), Je.upper(0))) {
    const auto u = (*out.trajectory)(t);
    out.cone_excess = std::max(out.cone_excess, sup_distance(u, x0) - cert.a * std::abs(t - ts));
  }
  return out;
}

std::optional<double> escape_time(const IvpProblem& prob, std::size_t i, double t_end,
                                  const IntegratorOptions& options) {
  const auto& grid = prob.grid();
  const auto x0 = prob.x0_net[i];
  const OdeSystem sys = ode_system(prob.F, grid[i], prob.dim(), {}, x0);
  IntegratorOptions io = options;
  io.stay_in = prob.L_beta();
  try {
    integrate(sys, prob.t0_net[i][0], x0, t_end, io);
  } catch (const EscapeError& e) {
    return e.time();
  }
  return std::nullopt;
}

SolutionNet solve_generalized(const IvpProblem& prob, const GeneralizedSolveOptions& options) {
  SolutionNet sol;
  sol.cert = options.certificate ? *options.certificate : certify_hypotheses(prob);
  sol.method = options.replay ? Method::AdaptiveRK : options.method;
  sol.rhs = prob.F;
  const HypothesisCertificate& c = sol.cert;
  const EpsGrid& grid = c.grid;
  const std::size_t n = prob.dim();
  const auto active = grid.active_indices();

  sol.per_eps.assign(grid.size(), nullptr);
  sol.classical.assign(grid.size(), nullptr);
  sol.t_start.assign(grid.size(), kNaN);
  sol.inner_intervals.assign(grid.size(), Box::interval(0, 0));
  std::vector<double> cone(grid.size(), kNaN);
  std::vector<std::size_t> steps(grid.size(), 0);

  parallel_for(active.size(), [&](std::size_t a_) {
    const std::size_t i = active[a_];
    const double ts = prob.t0_net[i][0];
    const auto x0 = prob.x0_net[i];
    std::shared_ptr<const Trajectory> u;
    if (options.replay) {
      const auto* ref = dynamic_cast<const TwoSidedTrajectory*>(options.replay->classical.at(i).get());
      if (!ref || options.replay->t_start[i] != ts) {
        throw Error(ErrorCode::InvalidArgument, "replay needs an RK reference with the same t0~");
      }
      const OdeSystem sys = ode_system(prob.F, grid[i], n, {}, x0);
      u = integrate_both_ways_on_mesh(sys, x0, *ref);
      cone[i] = 0.0;
      for (double t : time_lattice(u->t_lo(), u->t_hi())) {
        cone[i] = std::max(cone[i], sup_distance((*u)(t), x0) - c.a * std::abs(t - ts));
      }
    } else {
      const ClassicalSolution cs = solve_classical_per_eps(prob, c, i, options);
      u = cs.trajectory;
      cone[i] = std::max(0.0, cs.cone_excess);
      steps[i] = cs.steps;
    }
    cone[i] = std::max(0.0, cone[i]);
    sol.classical[i] = u;
    sol.t_start[i] = ts;
    sol.inner_intervals[i] = c.J_tilde(i);
    sol.per_eps[i] = detail::extend_classical(c, i, u);
  });
  for (std::size_t s : steps) sol.total_steps += s;
  sol.cone_excess = NumberNet(grid, cone);

  auto family = std::make_shared<const TrajectoryNetImpl::Family>(sol.per_eps);
  sol.base = FunctionNet(grid, c.J, std::make_shared<TrajectoryNetImpl>(family, grid, n, 0));
  if (!options.diagnostics) return sol;

  // residual |u' - F(t, u)| on J~_eps
  std::vector<double> res(grid.size(), kNaN);
  parallel_for(active.size(), [&](std::size_t a_) {
    const std::size_t i = active[a_];
    const auto& u = *sol.per_eps[i];
    const Box Jt = sol.inner_intervals[i];
    std::vector<double> x(n), du(n), f(n), in(1 + n);
    double m = 0.0;
    for (double t : time_lattice(Jt.lower(0), Jt.upper(0))) {
      u.eval(t, x);
      u.derivative(t, du);
      in[0] = t;
      std::copy(x.begin(), x.end(), in.begin() + 1);
      prob.F.eval(grid[i], in, f);
      m = std::max(m, sup_distance(du, f));
    }
    res[i] = m;
  });
  sol.residual = NumberNet(grid, res);

  // c-boundedness into W through J dagger
  const Box Jd = sol.J_dagger();
  const auto cb = check_cbounded(sol.base, Jd, c.W);
  if (cb.ok()) sol.cbound_cert = cb.certificate;
  else sol.warnings.push_back("c-bound into W not certified: " + cb.failure->reason);
  sol.jdagger_containment = true;
  const double hp = sol.h_dagger();
  for (std::size_t i : active) {
    if (2 * c.delta_eps[i] > c.h - hp) continue;
    const Box cone_box = c.L.expanded(c.a * (hp + c.delta_eps[i]) + 1e-9 * (1.0 + c.beta));
    for (double t : time_lattice(Jd.lower(0), Jd.upper(0))) {
      if (!cone_box.contains((*sol.per_eps[i])(t))) {
        sol.jdagger_containment = false;
        sol.warnings.push_back("u(J dagger) leaves L + B(a(h' + delta)) at eps = " + num(grid[i]));
        break;
      }
    }
  }

  // moderateness of u, u' and u'' = d_t F + d_x F F on J dagger
  const auto orders = default_orders();
  sol.value_growth = classify_growth(sup_on_compact(sol.base, Jd), orders);
  sol.d1_growth = classify_growth(sup_on_compact(sol.base.partial(0), Jd), orders);
  {
    std::vector<FunctionNet> dF;
    for (std::size_t j = 0; j <= n; ++j) dF.push_back(prob.F.partial(j));
    std::vector<double> sup2(grid.size(), kNaN);
    const auto ts = time_lattice(Jd.lower(0), Jd.upper(0));
    parallel_for(active.size(), [&](std::size_t a_) {
      const std::size_t i = active[a_];
      std::vector<double> in(1 + n), f(n), g(n), acc(n);
      double m = 0.0;
      for (double t : ts) {
        in[0] = t;
        sol.per_eps[i]->eval(t, std::span<double>(in.data() + 1, n));
        prob.F.eval(grid[i], in, f);
        dF[0].eval(grid[i], in, acc);
        for (std::size_t j = 0; j < n; ++j) {
          dF[1 + j].eval(grid[i], in, g);
          for (std::size_t k = 0; k < n; ++k) acc[k] += g[k] * f[j];
        }
        m = std::max(m, sup_norm(acc));
      }
      sup2[i] = m;
    });
    sol.d2_growth = classify_growth(NumberNet(grid, sup2), orders);
  }
  for (const GrowthClass* g : {&sol.value_growth, &sol.d1_growth, &sol.d2_growth}) {
    if (!g->moderate()) sol.moderateness_uncertified = true;
  }
  if (sol.moderateness_uncertified) sol.warnings.push_back("ModeratenessUncertified");
  return sol;
}

GapReport uniqueness_gap(const SolutionNet& s1, const SolutionNet& s2, const HypothesisCertificate& cert,
                         const Box& K, int m_test) {
  if (!cert.log_bound) {
    throw Error(ErrorCode::MissingLogBound, "uniqueness needs sup |d_x F_eps| = O(log 1/eps)");
  }
  if (!(s1.cert.grid == s2.cert.grid)) throw Error(ErrorCode::GridMismatch, "solutions on different grids");
  if (!s1.cert.J.contains(K) || !s2.cert.J.contains(K)) {
    throw Error(ErrorCode::InvalidArgument, "K = " + K.to_string() + " is not inside J");
  }
  const EpsGrid& grid = s1.cert.grid;
  const std::size_t n = s1.base.codim();
  const auto active = grid.active_indices();
  GapReport rep;
  rep.C1 = cert.log_bound->C1;
  rep.C4 = rep.C1;  // C' = 1
  rep.h = cert.h;
  rep.note = "C' = 1 and C3 = 0 are surrogates for the existential constants; C4 = C' C1 with the fitted C1";

  std::vector<double> gap(grid.size(), kNaN), env(grid.size(), kNaN), data(grid.size(), kNaN);
  rep.floor.assign(grid.size(), 0.0);
  const auto ts_lattice = time_lattice(K.lower(0), K.upper(0));
  parallel_for(active.size(), [&](std::size_t a_) {
    const std::size_t i = active[a_];
    const double eps = grid[i];
    const auto& u1 = *s1.per_eps[i];
    const auto& u2 = *s2.per_eps[i];
    const bool replayed = same_mesh(s1.classical[i].get(), s2.classical[i].get());
    std::vector<double> x1(n), x2(n), d1(n), d2(n), f(n), f1(n), in(1 + n);
    double g = 0.0, size = 0.0, defect = 0.0, T = 0.0;
    const double ts = s1.t_start[i];
    const Box Jt = s2.inner_intervals[i];
    for (double t : ts_lattice) {
      u1.eval(t, x1);
      u2.eval(t, x2);
      g = std::max(g, sup_distance(x1, x2));
      size = std::max({size, sup_norm(x1), sup_norm(x2)});
      T = std::max(T, std::abs(t - ts));
      if (Jt.contains(std::span<const double>(&t, 1))) {
        u2.derivative(t, d2);
        in[0] = t;
        std::copy(x2.begin(), x2.end(), in.begin() + 1);
        s1.rhs.eval(eps, in, f);
        if (replayed) {
          // on a shared mesh the interpolation error of u1' cancels against u2'
          u1.derivative(t, d1);
          std::copy(x1.begin(), x1.end(), in.begin() + 1);
          s1.rhs.eval(eps, in, f1);
          for (std::size_t c = 0; c < n; ++c) defect = std::max(defect, std::abs((d2[c] - d1[c]) - (f[c] - f1[c])));
        } else {
          defect = std::max(defect, sup_distance(d2, f));
        }
      }
    }
    const double n0 = sup_distance(u1(ts), u2(ts));
    double floor = 1e3 * DBL_EPSILON * (1.0 + size);
    if (!replayed) {
      // independent adaptive meshes: the global errors do not cancel
      floor += 10.0 * (1e-9 + 1e-9 * size);
    }
    // the dense-output derivative carries its own truncation error; only the
    // part of the defect above it is data
    const double defect_floor = replayed ? 0.0 : floor;
    const double nn = std::max(0.0, defect - defect_floor);
    gap[i] = g;
    data[i] = n0 + T * nn;
    rep.floor[i] = floor;
    env[i] = (n0 + T * nn + 2 * floor) * std::exp(rep.C4 * std::log(1.0 / eps) * T);
  });
  rep.gap = NumberNet(grid, gap);
  rep.envelope = NumberNet(grid, env);
  rep.within_envelope = true;
  for (std::size_t i : active) {
    if (!(gap[i] <= env[i] * (1.0 + 1e-9))) rep.within_envelope = false;
  }
  GrowthOptions go;
  go.floor_per_eps = rep.floor;
  std::vector<int> orders;
  for (int m = 0; m <= m_test; ++m) orders.push_back(m);
  rep.classification = classify_growth(rep.gap, orders, go);
  const LogLogFit df = fit_loglog(NumberNet(grid, data), go);
  rep.data_order = df.points >= 2 ? df.slope : 0.0;
  rep.envelope_exponent = rep.data_order - cert.h * rep.C4;
  return rep;
}

}  // namespace colombeau
