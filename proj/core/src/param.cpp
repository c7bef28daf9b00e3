#include "colombeau/param.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "colombeau/errors.hpp"
#include "colombeau/extension.hpp"
#include "colombeau/parallel.hpp"
#include "colombeau/quadrature.hpp"

namespace colombeau {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

void invalid(const std::string& what) { throw Error(ErrorCode::InvalidProblem, what); }

std::vector<std::vector<double>> lattice_points(const Box& B, std::size_t per_axis) {
  std::vector<std::vector<double>> out;
  if (B.dim() == 0) {
    out.emplace_back();
    return out;
  }
  const PointSet pts = sample_box(B, per_axis, 0);
  for (std::size_t k = 0; k < pts.size(); ++k) out.emplace_back(pts[k].begin(), pts[k].end());
  return out;
}

// y -> F(y, p) for a fixed parameter.
FunctionNet p_slice(const FunctionNet& F, std::size_t m, std::span<const double> p) {
  const std::size_t d = F.dim();
  std::vector<double> A(d * m, 0.0);
  for (std::size_t r = 0; r < m; ++r) A[r * m + r] = 1.0;
  std::vector<double> off(d, 0.0);
  std::copy(p.begin(), p.end(), off.begin() + m);
  auto impl = std::make_shared<AffineReparamImpl>(
      F.impl(), m, std::move(A), [off](double, std::span<double> b) { std::copy(off.begin(), off.end(), b.begin()); });
  std::vector<double> lo(F.domain().lower().begin(), F.domain().lower().begin() + m);
  std::vector<double> hi(F.domain().upper().begin(), F.domain().upper().begin() + m);
  return FunctionNet(F.grid(), Box(std::move(lo), std::move(hi)), impl);
}

// u(p, t) and its partials in p (by replayed differences) and t.
class ParamNetImpl : public NetImpl {
 public:
  ParamNetImpl(std::shared_ptr<const ParamSolver> solver, int mode, std::size_t k)
      : NetImpl(solver->problem().pdim() + 1, solver->problem().dim()),
        solver_(std::move(solver)),
        mode_(mode),
        k_(k) {}

  void eval(double eps, std::span<const double> y, std::span<double> out) const override {
    const std::size_t l = dim() - 1;
    const auto i = solver_->certificate().grid.find(eps);
    if (!i || !solver_->certificate().grid.active(*i)) {
      throw Error(ErrorCode::InvalidArgument, "no solution for eps = " + num(eps));
    }
    const auto p = y.first(l);
    const double t = y[l];
    if (mode_ == 0) solver_->get(*i, p)->extended->eval(t, out);
    else if (mode_ == 1) solver_->get(*i, p)->extended->derivative(t, out);
    else solver_->dp(*i, p, k_, t, out);
  }
  std::shared_ptr<const NetImpl> partial(std::size_t var) const override {
    const std::size_t l = dim() - 1;
    if (mode_ == 0 && var == l) return std::make_shared<ParamNetImpl>(solver_, 1, 0);
    if (mode_ == 0 && var < l) return std::make_shared<ParamNetImpl>(solver_, 2, var);
    return NetImpl::partial(var);
  }

 private:
  std::shared_ptr<const ParamSolver> solver_;
  int mode_;
  std::size_t k_;
};

}  // namespace

std::vector<std::vector<double>> default_p_lattice(const ParamIvpProblem& prob, std::size_t per_axis) {
  return lattice_points(prob.P.dim() ? prob.P_compact() : prob.P, per_axis);
}

HypothesisCertificate certify_parameters(const ParamIvpProblem& prob, const CertifyOptions& options) {
  const IvpProblem& b = prob.base;
  validate(b);
  const std::size_t n = b.dim(), l = prob.pdim();
  if (b.F.dim() != 1 + n + l) {
    invalid("F has " + std::to_string(b.F.dim()) + " inputs, expected 1 + n + l = " + std::to_string(1 + n + l));
  }
  if (l > 0 && (!prob.P.bounded() || !prob.P.has_interior())) invalid("P must be a bounded open box");
  const std::optional<Box> P = l ? std::optional<Box>(prob.P) : std::nullopt;
  const std::optional<Box> K = l ? std::optional<Box>(prob.P_compact()) : std::nullopt;
  HypothesisCertificate c;
  try {
    c = detail::certify_on(b, P, K, options);
  } catch (const UnboundedRhsError& e) {
    if (l == 0) throw;
    // bounded for every fixed p but not uniformly over P?
    const auto ps = lattice_points(prob.P, l <= 2 ? 9 : 3);
    for (const auto& p : ps) {
      const NumberNet s = sup_on_compact(p_slice(b.F, 1 + n, p), b.Q(), {}, options.sup);
      if (!check_bounded(s).bounded) throw;
    }
    throw UnboundedRhsError(ErrorCode::NonUniformBound,
                            "every sampled p-slice is bounded but the sup over Q x P is not (" +
                                std::string(e.what()) + ")",
                            e.growth_order());
  }
  if (!c.log_bound) {
    throw Error(ErrorCode::MissingLogBound,
                "sup |d_x F_eps| over [t0 - h, t0 + h] x L_beta x K_P is not O(log 1/eps)");
  }
  return c;
}

ParamSolver::ParamSolver(ParamIvpProblem prob, HypothesisCertificate cert, IntegratorOptions integrator)
    : prob_(std::move(prob)), cert_(std::move(cert)), integrator_(std::move(integrator)) {}

double ParamSolver::fd_step(std::span<const double> p, std::size_t k) {
  return 1e-4 * std::max(1.0, std::abs(p[k]));
}

std::size_t ParamSolver::solves() const {
  std::lock_guard lock(mu_);
  return solves_;
}

std::shared_ptr<const ParamSolver::Entry> ParamSolver::solve(std::size_t i, std::span<const double> p) const {
  const IvpProblem& b = prob_.base;
  const double eps = cert_.grid[i];
  const auto x0 = b.x0_net[i];
  const Box Je = cert_.J_eps(i);
  const OdeSystem sys = ode_system(b.F, eps, b.dim(), p, x0);
  IntegratorOptions io = integrator_;
  io.stay_in = b.L_beta();
  auto e = std::make_shared<Entry>();
  try {
    e->classical = integrate_both_ways(sys, b.t0_net[i][0], x0, Je.lower(0), Je.upper(0), io);
  } catch (const EscapeError& err) {
    throw EscapeError(eps, err.time(), "at eps = " + num(eps) + ", p = " + (p.empty() ? "()" : num(p[0])) + ": " + err.what());
  }
  e->extended = detail::extend_classical(cert_, i, e->classical, &e->eta);
  return e;
}

std::shared_ptr<const ParamSolver::Entry> ParamSolver::get(std::size_t i, std::span<const double> p) const {
  auto key = std::make_pair(i, std::vector<double>(p.begin(), p.end()));
  {
    std::lock_guard lock(mu_);
    if (auto it = cache_.find(key); it != cache_.end()) return it->second;
  }
  auto e = solve(i, p);
  std::lock_guard lock(mu_);
  ++solves_;
  if (cache_.size() >= kCacheLimit) cache_.clear();
  return cache_.emplace(std::move(key), std::move(e)).first->second;
}

std::shared_ptr<const TwoSidedTrajectory> ParamSolver::replay_classical(std::size_t i, std::span<const double> p,
                                                                        std::span<const double> q) const {
  const auto ref = get(i, p);
  const IvpProblem& b = prob_.base;
  const auto x0 = b.x0_net[i];
  const OdeSystem sys = ode_system(b.F, cert_.grid[i], b.dim(), q, x0);
  return integrate_both_ways_on_mesh(sys, x0, *ref->classical);
}

std::shared_ptr<const Trajectory> ParamSolver::replay(std::size_t i, std::span<const double> p,
                                                      std::span<const double> q) const {
  const auto ref = get(i, p);
  auto u = replay_classical(i, p, q);
  if (!(ref->eta > 0.0)) return u;
  return std::make_shared<ExtendedTrajectory>(u, cert_.t0 - cert_.h, cert_.t0 + cert_.h, ref->eta);
}

void ParamSolver::dp(std::size_t i, std::span<const double> p, std::size_t k, double t, std::span<double> out) const {
  const double h = fd_step(p, k);
  std::vector<double> q(p.begin(), p.end());
  q[k] = p[k] + h;
  const auto up = replay(i, p, q);
  q[k] = p[k] - h;
  const auto um = replay(i, p, q);
  std::vector<double> a(out.size()), b(out.size());
  up->eval(t, a);
  um->eval(t, b);
  for (std::size_t c = 0; c < out.size(); ++c) out[c] = (a[c] - b[c]) / (2 * h);
}

ParamSolutionNet solve_with_parameters(const ParamIvpProblem& prob, const std::vector<std::vector<double>>& p_samples,
                                       const ParamSolveOptions& options) {
  const std::size_t n = prob.dim(), l = prob.pdim();
  ParamSolutionNet sol;
  sol.cert = options.certificate ? *options.certificate : certify_parameters(prob, options.certify);
  const HypothesisCertificate& c = sol.cert;
  for (const auto& p : p_samples) {
    if (p.size() != l) throw Error(ErrorCode::InvalidArgument, "p sample has the wrong dimension");
    if (l && !prob.P.contains(p)) throw Error(ErrorCode::InvalidArgument, "p sample outside closure(P)");
  }
  sol.p_samples = p_samples.empty() ? default_p_lattice(prob) : p_samples;
  auto solver = std::make_shared<ParamSolver>(prob, c, options.integrator);
  sol.solver = solver;
  sol.base = FunctionNet(c.grid, product(prob.P, c.J), std::make_shared<ParamNetImpl>(solver, 0, 0));

  const EpsGrid& grid = c.grid;
  const auto active = grid.active_indices();
  const std::size_t S = sol.p_samples.size();
  // the (eps, p) solves are independent
  parallel_for(active.size() * S, [&](std::size_t j) { solver->get(active[j / S], sol.p_samples[j % S]); });
  if (!options.diagnostics) return sol;

  std::vector<double> res(grid.size(), kNaN), init(grid.size(), kNaN);
  parallel_for(active.size(), [&](std::size_t a_) {
    const std::size_t i = active[a_];
    const Box Jt = c.J_tilde(i);
    std::vector<double> x(n), du(n), f(n), in(1 + n + l);
    double r = 0.0, e0 = 0.0;
    for (const auto& p : sol.p_samples) {
      const auto& u = *solver->get(i, p)->extended;
      std::copy(p.begin(), p.end(), in.begin() + 1 + n);
      for (double t : detail::time_lattice(Jt.lower(0), Jt.upper(0))) {
        u.eval(t, x);
        u.derivative(t, du);
        in[0] = t;
        std::copy(x.begin(), x.end(), in.begin() + 1);
        prob.base.F.eval(grid[i], in, f);
        r = std::max(r, sup_distance(du, f));
      }
      u.eval(prob.base.t0_net[i][0], x);
      e0 = std::max(e0, sup_distance(x, prob.base.x0_net[i]));
    }
    res[i] = r;
    init[i] = e0;
  });
  sol.residual = NumberNet(grid, res);
  sol.initial_error = NumberNet(grid, init);
  if (l > 0) sol.sensitivity_check = sensitivity_residual(sol, prob, sol.p_samples.front(), c.t0 + 0.5 * c.h);
  return sol;
}

NumberNet sensitivity_residual(const ParamSolutionNet& sol, const ParamIvpProblem& prob, std::span<const double> p,
                               double t) {
  const ParamSolver& solver = *sol.solver;
  const HypothesisCertificate& c = sol.cert;
  const std::size_t n = prob.dim(), l = prob.pdim();
  if (p.size() != l) throw Error(ErrorCode::InvalidArgument, "p has the wrong dimension");
  const FunctionNet& F = prob.base.F;
  std::vector<FunctionNet> dx, dpF;
  for (std::size_t j = 0; j < n; ++j) dx.push_back(F.partial(1 + j));
  for (std::size_t k = 0; k < l; ++k) dpF.push_back(F.partial(1 + n + k));

  const EpsGrid& grid = c.grid;
  const auto active = grid.active_indices();
  for (std::size_t i : active) {
    if (!c.J_eps(i).contains(std::span<const double>(&t, 1))) {
      throw Error(ErrorCode::InvalidArgument, "t = " + num(t) + " is outside J_eps at eps = " + num(grid[i]));
    }
  }
  const GaussRule& gl = gauss_legendre(10);
  std::vector<double> out(grid.size(), kNaN);
  parallel_for(active.size(), [&](std::size_t a_) {
    const std::size_t i = active[a_];
    const double eps = grid[i];
    const double ts = prob.base.t0_net[i][0];
    const auto u = solver.get(i, p)->classical;
    // quadrature breakpoints at the sharp features of F along the path
    const OdeSystem sys = ode_system(F, eps, n, p, prob.base.x0_net[i]);
    const double lo = std::min(ts, t), hi = std::max(ts, t);
    std::vector<double> cuts{lo, hi};
    for (const Window& w : sys.windows) {
      for (double s : {w.lo, w.hi}) {
        if (s > lo && s < hi) cuts.push_back(s);
      }
    }
    std::sort(cuts.begin(), cuts.end());
    const double sign = t >= ts ? 1.0 : -1.0;

    std::vector<double> x(n), a(n), b(n), g(n), dpu(n), in(1 + n + l), lhs(n), rhs(n);
    double worst = 0.0;
    for (std::size_t k = 0; k < l; ++k) {
      const double h = ParamSolver::fd_step(p, k);
      std::vector<double> q(p.begin(), p.end());
      q[k] = p[k] + h;
      const auto up = solver.replay_classical(i, p, q);
      q[k] = p[k] - h;
      const auto um = solver.replay_classical(i, p, q);
      auto dpu_at = [&](double s) {
        up->eval(s, a);
        um->eval(s, b);
        for (std::size_t m = 0; m < n; ++m) dpu[m] = (a[m] - b[m]) / (2 * h);
      };
      dpu_at(t);
      lhs = dpu;
      std::fill(rhs.begin(), rhs.end(), 0.0);
      std::copy(p.begin(), p.end(), in.begin() + 1 + n);
      for (std::size_t seg = 0; seg + 1 < cuts.size(); ++seg) {
        const double s0 = cuts[seg], s1 = cuts[seg + 1];
        constexpr std::size_t panels = 16;
        for (std::size_t pn = 0; pn < panels; ++pn) {
          const double pa = s0 + (s1 - s0) * double(pn) / panels;
          const double pb = s0 + (s1 - s0) * double(pn + 1) / panels;
          for (std::size_t q_ = 0; q_ < gl.nodes.size(); ++q_) {
            const double s = 0.5 * (pa + pb) + 0.5 * (pb - pa) * gl.nodes[q_];
            const double w = 0.5 * (pb - pa) * gl.weights[q_] * sign;
            u->eval(s, x);
            dpu_at(s);
            in[0] = s;
            std::copy(x.begin(), x.end(), in.begin() + 1);
            dpF[k].eval(eps, in, g);
            for (std::size_t m = 0; m < n; ++m) rhs[m] += w * g[m];
            for (std::size_t j = 0; j < n; ++j) {
              dx[j].eval(eps, in, g);
              for (std::size_t m = 0; m < n; ++m) rhs[m] += w * g[m] * dpu[j];
            }
          }
        }
      }
      for (std::size_t m = 0; m < n; ++m) {
        if (!std::isfinite(lhs[m]) || !std::isfinite(rhs[m])) {
          throw Error(ErrorCode::DerivativeUnavailable,
                      "non-finite sensitivity at eps = " + num(eps) + ", t = " + num(t));
        }
        worst = std::max(worst, std::abs(lhs[m] - rhs[m]));
      }
    }
    out[i] = worst;
  });
  return NumberNet(grid, out);
}

InitialValueFamily solve_with_initial_data(const ParamIvpProblem& prob, double h_target,
                                           const ParamSolveOptions& options) {
  const IvpProblem& b = prob.base;
  validate(b);
  const std::size_t n = b.dim(), l = prob.pdim();
  if (b.F.dim() != 1 + n + l) invalid("F must take (t, x, p) with p of dimension " + std::to_string(l));
  const auto xs = near_standard_limit(b.x0_net);
  if (!xs.limit) invalid("x0~ is not near-standard");

  InitialValueFamily fam;
  fam.t0 = b.t0;
  fam.x0 = *xs.limit;
  const double alpha = b.alpha, beta = b.beta;

  // the bound a over [t0 - alpha, t0 + alpha] x closed B_beta(x0) x P
  {
    IvpProblem q = b;
    q.L = Box::point(fam.x0);
    q.t0_net = PointNet::constant(b.grid(), std::vector<double>{b.t0});
    q.x0_net = PointNet::constant(b.grid(), fam.x0);
    ParamIvpProblem pq{q, prob.P};
    fam.a = certify_parameters(pq, options.certify).a;
  }
  const double a = fam.a;
  const double hmax = a > 0.0 ? std::min(alpha, beta / a) : alpha;
  if (!(h_target > 0.0) || !(h_target < hmax)) {
    throw Error(ErrorCode::ConstantsInfeasible, "h = " + num(h_target) + " is not in (0, min(alpha, beta/a)) = (0, " +
                                                    num(hmax) + ")");
  }

  // lambda = 1 - 2^-k, mu = beta/3 2^-k, delta and eta at the fraction 1 - 2^-k
  // of their ranges; k = 1 gives the defaults
  bool found = false;
  for (int k = 1; k <= 52 && !found; ++k) {
    const double f = 1.0 - std::ldexp(1.0, -k);
    fam.lambda = f;
    fam.mu = beta / 3 * std::ldexp(1.0, -k);
    fam.gamma = beta - 2 * fam.mu;
    fam.delta = f * fam.lambda * alpha;
    fam.eta = f * (fam.gamma - fam.mu);
    fam.h_hat = a > 0.0 ? std::min(fam.delta, fam.eta / a) : fam.delta;
    fam.binding = (a > 0.0 && fam.eta / a < fam.delta) ? "eta / a" : "delta";
    if (h_target < fam.h_hat) found = true;
  }
  if (!found) {
    throw Error(ErrorCode::ConstantsInfeasible,
                "h_hat = min(delta, eta/a) stays below h = " + num(h_target) + "; binding: " + fam.binding);
  }
  if (h_target < 0.5 * fam.h_hat) {
    fam.delta = std::min(fam.delta, 2 * h_target);
    fam.eta = std::min(fam.eta, 2 * h_target * a);
    fam.h_hat = 2 * h_target;
    if (a > 0.0 && fam.eta / a < fam.delta) fam.binding = "eta / a";
    else fam.binding = "delta";
  }
  fam.sigma = h_target / fam.h_hat;
  fam.h = h_target;
  fam.h1 = std::min(fam.h_hat - fam.h, (1.0 - fam.lambda) * alpha);
  fam.r = 0.5 * fam.h;
  fam.rho = 0.5 * (fam.h - fam.r);
  if (!(fam.h + fam.h1 <= fam.h_hat)) {
    throw Error(ErrorCode::ConstantsInfeasible, "h + h1 exceeds h_hat");
  }

  fam.I_hat = Box::interval(-fam.lambda * alpha, fam.lambda * alpha);
  fam.I1 = Box::interval(b.t0 - (1 - fam.lambda) * alpha, b.t0 + (1 - fam.lambda) * alpha);
  const std::vector<double> zero(n, 0.0);
  fam.U_hat = Box::cube(zero, fam.gamma + fam.mu);
  fam.U1 = Box::cube(fam.x0, fam.mu);
  fam.J = Box::interval(b.t0 - fam.h, b.t0 + fam.h);
  fam.J1 = Box::interval(b.t0 - fam.h1, b.t0 + fam.h1);
  if (!b.I.contains(Box::interval(b.t0 - alpha, b.t0 + alpha)) || !b.U.contains(Box::cube(fam.x0, beta))) {
    invalid("I_hat + I1 or U_hat + U1 is not inside I x U");
  }
  if (!fam.I1.contains(fam.J1) || !fam.J.contains(fam.J1)) invalid("J1 is not inside I1 and J");

  // G(t, x, (t1, x1, p)) = F(t + t1, x + x1, p)
  const std::size_t dF = 1 + n + l, dG = 2 + 2 * n + l;
  std::vector<double> A(dF * dG, 0.0);
  A[0 * dG + 0] = 1.0;
  A[0 * dG + 1 + n] = 1.0;
  for (std::size_t j = 0; j < n; ++j) {
    A[(1 + j) * dG + 1 + j] = 1.0;
    A[(1 + j) * dG + 2 + n + j] = 1.0;
  }
  for (std::size_t k = 0; k < l; ++k) A[(1 + n + k) * dG + 2 + 2 * n + k] = 1.0;
  auto gimpl = std::make_shared<AffineReparamImpl>(b.F.impl(), dG, std::move(A), [](double, std::span<double> off) {
    std::fill(off.begin(), off.end(), 0.0);
  });
  const Box PG = product(product(fam.I1, fam.U1), prob.P);
  const EpsGrid& grid = b.grid();

  ParamIvpProblem& g = fam.translated;
  g.base.I = fam.I_hat;
  g.base.U = fam.U_hat;
  g.base.F = FunctionNet(grid, product(product(fam.I_hat, fam.U_hat), PG), gimpl);
  g.base.t0 = 0.0;
  g.base.t0_net = PointNet::constant(grid, std::vector<double>{0.0});
  g.base.x0_net = PointNet::constant(grid, zero);
  g.base.alpha = fam.delta;
  g.base.L = Box::point(zero);
  g.base.beta = fam.eta;
  g.base.a_override = a;
  g.P = PG;

  ParamSolveOptions vo = options;
  vo.certificate.reset();
  fam.v = solve_with_parameters(g, default_p_lattice(g, 3), vo);

  const FunctionNet vbase = fam.v.base;
  const Box dom = product(product(product(fam.J1, fam.U1), prob.P), fam.J);
  fam.solution = FunctionNet::from_lambda(grid.with_eps0(fam.v.cert.grid.eps0()), dom, n,
                                          [vbase, n](double eps, std::span<const double> y, std::span<double> out) {
                                            // y = (t1, x1, p, t)
                                            std::vector<double> z(y.begin(), y.end());
                                            z.back() = y.back() - y[0];
                                            vbase.eval(eps, z, out);
                                            for (std::size_t j = 0; j < n; ++j) out[j] += y[1 + j];
                                          });

  // u(t1, x1, p, t1) == x1 on the corners of J1 x U1 and the centre
  fam.exact_at_t1 = true;
  const double eps = grid[fam.v.cert.grid.active_indices().back()];
  for (const auto& pt : lattice_points(product(product(fam.J1, fam.U1), prob.P.dim() ? prob.P_compact() : prob.P), 2)) {
    std::vector<double> y(pt);
    y.push_back(pt[0]);
    const auto u = fam.solution(eps, y);
    for (std::size_t j = 0; j < n; ++j) {
      if (u[j] != pt[1 + j]) fam.exact_at_t1 = false;
    }
  }
  return fam;
}

}  // namespace colombeau
