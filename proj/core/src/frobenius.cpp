#include "colombeau/frobenius.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <limits>
#include <random>

#include "colombeau/errors.hpp"
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

std::span<const double> at(const PointNet& net, double eps) {
  const auto i = net.grid().find(eps);
  if (!i) throw Error(ErrorCode::InvalidArgument, "eps = " + num(eps) + " is not on the grid");
  return net[*i];
}

double row_sum_norm(std::span<const double> M, std::size_t m, std::size_t n) {
  double s = 0.0;
  for (std::size_t r = 0; r < m; ++r) {
    double row = 0.0;
    for (std::size_t c = 0; c < n; ++c) row += std::abs(M[r * n + c]);
    s = std::max(s, row);
  }
  return s;
}

// G(t, y, v) = F(x0~ + t v, y) v
class RayImpl : public NetImpl {
 public:
  RayImpl(std::shared_ptr<const NetImpl> F, std::shared_ptr<const PointNet> x0, std::size_t n, std::size_t m)
      : NetImpl(1 + m + n, m), F_(std::move(F)), x0_(std::move(x0)), n_(n), m_(m) {}

  void eval(double eps, std::span<const double> z, std::span<double> out) const override {
    std::vector<double> in(n_ + m_), M(n_ * m_);
    const auto x0 = at(*x0_, eps);
    const double t = z[0];
    const auto y = z.subspan(1, m_), v = z.subspan(1 + m_, n_);
    for (std::size_t k = 0; k < n_; ++k) in[k] = x0[k] + t * v[k];
    std::copy(y.begin(), y.end(), in.begin() + n_);
    F_->eval(eps, in, M);
    contract(M, m_, n_, v, out);
  }
  std::shared_ptr<const NetImpl> partial(std::size_t var) const override {
    if (var >= 1 && var <= m_) return std::make_shared<RayImpl>(F_->partial(n_ + var - 1), x0_, n_, m_);
    return NetImpl::partial(var);
  }
  std::vector<Window> feature_windows(double eps, std::span<const double> base,
                                      std::span<const double> dir) const override {
    const auto x0 = at(*x0_, eps);
    std::vector<double> b(n_ + m_), d(n_ + m_);
    const double t = base[0], dt = dir[0];
    for (std::size_t k = 0; k < n_; ++k) {
      const double v = base[1 + m_ + k], dv = dir[1 + m_ + k];
      b[k] = x0[k] + t * v;
      d[k] = dt * v + t * dv;
    }
    for (std::size_t j = 0; j < m_; ++j) {
      b[n_ + j] = base[1 + j];
      d[n_ + j] = dir[1 + j];
    }
    return F_->feature_windows(eps, b, d);
  }

 private:
  std::shared_ptr<const NetImpl> F_;
  std::shared_ptr<const PointNet> x0_;
  std::size_t n_, m_;
};

// u(x) = f((x - x0~) / r, r); mode k >= 0 gives d u / d x_k.
class TotalNetImpl : public NetImpl {
 public:
  TotalNetImpl(std::shared_ptr<const RaySolver> rays, int mode)
      : NetImpl(rays->problem().n(), rays->problem().m()), rays_(std::move(rays)), mode_(mode) {}

  void eval(double eps, std::span<const double> x, std::span<double> out) const override {
    const auto& c = rays_->certificate();
    const auto i = c.grid.find(eps);
    if (!i || !c.grid.active(*i)) throw Error(ErrorCode::InvalidArgument, "no solution for eps = " + num(eps));
    const std::size_t n = dim(), m = codim();
    const auto x0 = rays_->problem().x0_net[*i];
    std::vector<double> v(n);
    for (std::size_t k = 0; k < n; ++k) v[k] = (x[k] - x0[k]) / c.r;
    if (mode_ < 0) {
      rays_->f(*i, v, c.r, out);
      return;
    }
    std::vector<double> phi(m * n);
    rays_->dfdv(*i, v, c.r, phi);
    for (std::size_t r = 0; r < m; ++r) out[r] = phi[r * n + std::size_t(mode_)] / c.r;
  }
  std::shared_ptr<const NetImpl> partial(std::size_t var) const override {
    if (mode_ < 0) return std::make_shared<TotalNetImpl>(rays_, int(var));
    return NetImpl::partial(var);
  }

 private:
  std::shared_ptr<const RaySolver> rays_;
  int mode_;
};

struct Partials {
  std::vector<FunctionNet> dx, dy;
  Partials(const FunctionNet& F, std::size_t n, std::size_t m) {
    for (std::size_t k = 0; k < n; ++k) dx.push_back(F.partial(k));
    for (std::size_t j = 0; j < m; ++j) dy.push_back(F.partial(n + j));
  }
};

void form(const FunctionNet& F, const Partials& P, std::size_t n, std::size_t m, double eps, std::span<const double> x,
          std::span<const double> y, std::span<const double> v1, std::span<const double> v2, std::span<double> out,
          double* magnitude) {
  std::vector<double> in(n + m), M(m * n), D(m * n), Fv(m), acc(m * n, 0.0), mag(m * n, 0.0);
  std::copy(x.begin(), x.end(), in.begin());
  std::copy(y.begin(), y.end(), in.begin() + n);
  F.eval(eps, in, M);
  contract(M, m, n, v1, Fv);
  auto add = [&](const FunctionNet& d, double w) {
    d.eval(eps, in, D);
    for (std::size_t q = 0; q < m * n; ++q) {
      acc[q] += D[q] * w;
      mag[q] += std::abs(D[q] * w);
    }
  };
  for (std::size_t k = 0; k < n; ++k) add(P.dx[k], v1[k]);
  for (std::size_t j = 0; j < m; ++j) add(P.dy[j], Fv[j]);
  double total = 0.0;
  for (std::size_t r = 0; r < m; ++r) {
    out[r] = 0.0;
    for (std::size_t c = 0; c < n; ++c) {
      out[r] += acc[r * n + c] * v2[c];
      total += mag[r * n + c] * std::abs(v2[c]);
    }
  }
  if (magnitude) *magnitude = total;
}

}  // namespace

void contract(std::span<const double> F, std::size_t m, std::size_t n, std::span<const double> v, std::span<double> out) {
  for (std::size_t r = 0; r < m; ++r) {
    double s = 0.0;
    for (std::size_t c = 0; c < n; ++c) s += F[r * n + c] * v[c];
    out[r] = s;
  }
}

std::vector<double> frobenius_x0(const FrobeniusProblem& prob) {
  const auto ns = near_standard_limit(prob.x0_net);
  if (!ns.limit) invalid("x0~ is not near-standard");
  return *ns.limit;
}

void validate(const FrobeniusProblem& p) {
  const std::size_t n = p.n(), m = p.m();
  if (n == 0 || m == 0 || !p.U.has_interior() || !p.V.has_interior()) invalid("U and V must be non-empty open boxes");
  if (p.F.dim() != n + m || p.F.codim() != m * n) {
    invalid("F must map U x V into m x n matrices (" + std::to_string(m * n) + " components)");
  }
  if (!(p.x0_net.grid() == p.F.grid()) || !(p.y0_net.grid() == p.F.grid())) {
    throw Error(ErrorCode::GridMismatch, "x0, y0 and F must share one eps grid");
  }
  if (p.x0_net.dim() != n || p.y0_net.dim() != m || p.L.dim() != m) invalid("x0, y0 or L has the wrong dimension");
  if (!(p.alpha > 0.0) || !(p.beta > 0.0)) invalid("alpha and beta must be positive");
  if (!(p.lambda > 0.0 && p.lambda < 1.0) || !(p.r_fraction > 0.0 && p.r_fraction < 1.0)) {
    invalid("lambda and r_fraction must lie in (0, 1)");
  }
  const auto x0 = frobenius_x0(p);
  if (!(p.U.margin_of(Box::cube(x0, p.alpha)) > 0.0)) invalid("closed B_alpha(x0) is not compactly contained in U");
  if (!(p.V.margin_of(p.L_beta()) > 0.0)) invalid("L_beta is not compactly contained in V");
  for (std::size_t i : p.grid().active_indices()) {
    if (!p.L.contains(p.y0_net[i])) invalid("y0 at eps = " + num(p.grid()[i]) + " is not in L");
  }
}

void integrability_form(const FrobeniusProblem& prob, double eps, std::span<const double> x, std::span<const double> y,
                        std::span<const double> v1, std::span<const double> v2, std::span<double> out,
                        double* magnitude) {
  const Partials P(prob.F, prob.n(), prob.m());
  form(prob.F, P, prob.n(), prob.m(), eps, x, y, v1, v2, out, magnitude);
}

IntegrabilityReport check_integrability(const FrobeniusProblem& prob, std::size_t probe_count,
                                        std::size_t random_pairs, std::uint64_t seed) {
  validate(prob);
  const std::size_t n = prob.n(), m = prob.m();
  const auto x0 = frobenius_x0(prob);
  const Box Q = product(Box::cube(x0, prob.alpha), prob.L_beta());
  const Partials P(prob.F, n, m);

  std::vector<std::pair<std::vector<double>, std::vector<double>>> pairs;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      std::vector<double> a(n, 0.0), b(n, 0.0);
      a[i] = b[j] = 1.0;
      pairs.emplace_back(a, b);
    }
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  auto unit = [&] {
    std::vector<double> v(n);
    double s = 0.0;
    for (double& c : v) {
      c = normal(rng);
      s += c * c;
    }
    for (double& c : v) c /= std::sqrt(s);
    return v;
  };
  for (std::size_t k = 0; k < random_pairs; ++k) {
    auto a = unit();
    auto b = unit();
    pairs.emplace_back(std::move(a), std::move(b));
  }

  const EpsGrid& grid = prob.grid();
  IntegrabilityReport rep;
  for (std::size_t k = 1; k <= probe_count; ++k) {
    std::vector<double> z(n + m);
    for (std::size_t d = 0; d < n + m; ++d) z[d] = Q.lower(d) + Q.width(d) * halton(k, nth_prime(d));
    for (const auto& [a, b] : pairs) {
      rep.probes.push_back({std::vector<double>(z.begin(), z.begin() + n), std::vector<double>(z.begin() + n, z.end()),
                            a, b, std::vector<double>(grid.size(), kNaN)});
    }
  }
  std::vector<double> worst(grid.size(), kNaN);
  rep.floor.assign(grid.size(), 0.0);
  const auto active = grid.active_indices();
  parallel_for(active.size(), [&](std::size_t a_) {
    const std::size_t i = active[a_];
    std::vector<double> s12(m), s21(m);
    double w = 0.0, scale = 0.0;
    for (auto& pr : rep.probes) {
      double m1 = 0.0, m2 = 0.0;
      form(prob.F, P, n, m, grid[i], pr.x, pr.y, pr.v1, pr.v2, s12, &m1);
      form(prob.F, P, n, m, grid[i], pr.x, pr.y, pr.v2, pr.v1, s21, &m2);
      double d = 0.0;
      for (std::size_t r = 0; r < m; ++r) {
        if (!std::isfinite(s12[r]) || !std::isfinite(s21[r])) {
          throw Error(ErrorCode::DerivativeUnavailable, "non-finite DF at eps = " + num(grid[i]));
        }
        d = std::max(d, std::abs(s12[r] - s21[r]));
      }
      pr.values[i] = d;
      w = std::max(w, d);
      scale = std::max({scale, m1, m2});
    }
    worst[i] = w;
    rep.floor[i] = 64 * DBL_EPSILON * scale;
  });
  rep.max_asymmetry = NumberNet(grid, worst);
  GrowthOptions go;
  go.floor_per_eps = rep.floor;
  const std::vector<int> orders{0, 1, 2, 3};
  rep.classification = classify_growth(rep.max_asymmetry, orders, go);
  rep.integrable = rep.classification.negligible_to(3);
  return rep;
}

FrobeniusCertificate certify_frobenius(const FrobeniusProblem& prob, const CertifyOptions& options) {
  validate(prob);
  const std::size_t n = prob.n(), m = prob.m();
  const EpsGrid& grid = prob.grid();
  FrobeniusCertificate c;
  c.x0 = frobenius_x0(prob);
  c.Q = product(Box::cube(c.x0, prob.alpha), prob.L_beta());
  const PointSet pts = sample_box(c.Q, options.sup.per_axis, options.sup.interior_probes);
  const Partials P(prob.F, n, m);

  const auto active = grid.active_indices();
  std::vector<double> sup(grid.size(), kNaN), dsup(grid.size(), kNaN);
  parallel_for(active.size(), [&](std::size_t a_) {
    const std::size_t i = active[a_];
    std::vector<double> M(m * n), acc(m * n);
    double s = 0.0, d = 0.0;
    for (std::size_t k = 0; k < pts.size(); ++k) {
      prob.F.eval(grid[i], pts[k], M);
      s = std::max(s, row_sum_norm(M, m, n));
      std::fill(acc.begin(), acc.end(), 0.0);
      for (const auto& dy : P.dy) {
        dy.eval(grid[i], pts[k], M);
        for (std::size_t q = 0; q < M.size(); ++q) acc[q] += std::abs(M[q]);
      }
      d = std::max(d, sup_norm(acc));
    }
    sup[i] = s;
    dsup[i] = d;
  });
  c.sup_F = NumberNet(grid, sup);
  const BoundednessReport b = check_bounded(c.sup_F);
  if (!b.bounded) {
    throw UnboundedRhsError(ErrorCode::UnboundedRhs, "sup over Q of |F_eps| grows like eps^-" + num(b.growth_order),
                            b.growth_order);
  }
  for (std::size_t i : active) c.lattice_max = std::max(c.lattice_max, sup[i]);
  c.a = 1.05 * c.lattice_max;

  std::vector<double> ratio(grid.size(), kNaN);
  double below_one = 0.0;
  for (std::size_t i : active) {
    if (grid[i] < 1.0) {
      ratio[i] = dsup[i] / std::log(1.0 / grid[i]);
      if (below_one == 0.0) below_one = grid[i];
    }
  }
  bool log_ok = false;
  try {
    const EpsGrid rg = grid.with_eps0(below_one);
    c.log_bound = LogBound{0.0, NumberNet(rg, ratio), NumberNet(grid, dsup)};
    if (check_bounded(c.log_bound.ratio).bounded) {
      log_ok = true;
      for (std::size_t i : rg.active_indices()) c.log_bound.C1 = std::max(c.log_bound.C1, ratio[i]);
    }
  } catch (const Error&) {
  }
  if (!log_ok) throw Error(ErrorCode::MissingLogBound, "sup over Q of |d_y F_eps| is not O(log 1/eps)");

  c.delta = prob.alpha / 2;
  c.gamma = prob.alpha - c.delta;
  c.eta = c.gamma / 2;
  c.h = c.a > 0.0 ? std::min(c.eta, prob.beta / c.a) : c.eta;
  c.r = prob.r_fraction * c.h;
  c.lambda = prob.lambda;

  // eps0 such that x0~ stays within min(delta, (1 - lambda) r) of x0
  const double tol = std::min(c.delta, (1.0 - c.lambda) * c.r);
  double eps0 = grid.eps0();
  for (std::size_t i = grid.size(); i-- > 0;) {
    if (grid[i] > grid.eps0()) break;
    if (!(sup_distance(prob.x0_net[i], c.x0) < tol)) {
      eps0 = i + 1 < grid.size() ? grid[i + 1] : 0.0;
      break;
    }
  }
  try {
    c.grid = grid.with_eps0(eps0);
  } catch (const Error&) {
    invalid("x0~ approaches x0 too slowly: |x0~ - x0| < " + num(tol) + " leaves too few grid values");
  }
  return c;
}

RaySolver::RaySolver(FrobeniusProblem prob, FrobeniusCertificate cert, IntegratorOptions integrator)
    : prob_(std::move(prob)), cert_(std::move(cert)), integrator_(std::move(integrator)) {
  for (std::size_t k = 0; k < prob_.n(); ++k) dx_.push_back(prob_.F.partial(k));
  for (std::size_t j = 0; j < prob_.m(); ++j) dy_.push_back(prob_.F.partial(prob_.n() + j));
}

std::shared_ptr<const TwoSidedTrajectory> RaySolver::get(std::size_t i, std::span<const double> v) const {
  auto key = std::make_pair(i, std::vector<double>(v.begin(), v.end()));
  {
    std::lock_guard lock(mu_);
    if (auto it = cache_.find(key); it != cache_.end()) return it->second;
  }
  const std::size_t n = prob_.n(), m = prob_.m();
  const double eps = cert_.grid[i];
  const std::vector<double> x0(prob_.x0_net[i].begin(), prob_.x0_net[i].end());
  const std::vector<double> vv(v.begin(), v.end());
  OdeSystem sys;
  sys.dim = m + m * n;
  sys.rhs = [this, eps, x0, vv, n, m, in = std::vector<double>(n + m), M = std::vector<double>(m * n),
             D = std::vector<double>(m * n), A = std::vector<double>(m * m)](
                double t, std::span<const double> s, std::span<double> ds) mutable {
    for (std::size_t k = 0; k < n; ++k) in[k] = x0[k] + t * vv[k];
    std::copy(s.begin(), s.begin() + m, in.begin() + n);
    const auto phi = s.subspan(m, m * n);
    auto dphi = ds.subspan(m, m * n);
    prob_.F.eval(eps, in, M);
    contract(M, m, n, vv, ds.first(m));
    std::copy(M.begin(), M.end(), dphi.begin());
    for (std::size_t k = 0; k < n; ++k) {
      dx_[k].eval(eps, in, D);
      for (std::size_t r = 0; r < m; ++r) {
        double w = 0.0;
        for (std::size_t c = 0; c < n; ++c) w += D[r * n + c] * vv[c];
        dphi[r * n + k] += t * w;
      }
    }
    for (std::size_t j = 0; j < m; ++j) {
      dy_[j].eval(eps, in, D);
      for (std::size_t r = 0; r < m; ++r) {
        double w = 0.0;
        for (std::size_t c = 0; c < n; ++c) w += D[r * n + c] * vv[c];
        A[r * m + j] = w;
      }
    }
    for (std::size_t r = 0; r < m; ++r) {
      for (std::size_t k = 0; k < n; ++k) {
        double w = 0.0;
        for (std::size_t j = 0; j < m; ++j) w += A[r * m + j] * phi[j * n + k];
        dphi[r * n + k] += w;
      }
    }
  };
  {
    std::vector<double> base(n + m), dir(n + m, 0.0);
    std::copy(x0.begin(), x0.end(), base.begin());
    const auto y0 = prob_.y0_net[i];
    std::copy(y0.begin(), y0.end(), base.begin() + n);
    std::copy(vv.begin(), vv.end(), dir.begin());
    sys.windows = prob_.F.feature_windows(eps, base, dir);
  }
  std::vector<double> lo(sys.dim, -std::numeric_limits<double>::infinity());
  std::vector<double> hi(sys.dim, std::numeric_limits<double>::infinity());
  const Box Lb = prob_.L_beta();
  for (std::size_t j = 0; j < m; ++j) {
    lo[j] = Lb.lower(j);
    hi[j] = Lb.upper(j);
  }
  IntegratorOptions io = integrator_;
  io.stay_in = Box(lo, hi);
  std::vector<double> s0(sys.dim, 0.0);
  std::copy(prob_.y0_net[i].begin(), prob_.y0_net[i].end(), s0.begin());
  std::shared_ptr<const TwoSidedTrajectory> traj;
  try {
    traj = integrate_both_ways(sys, 0.0, s0, -cert_.h, cert_.h, io);
  } catch (const EscapeError& e) {
    throw EscapeError(eps, e.time(), "ray at eps = " + num(eps) + ": " + e.what());
  }
  std::lock_guard lock(mu_);
  if (cache_.size() >= kCacheLimit) cache_.clear();
  return cache_.emplace(std::move(key), traj).first->second;
}

void RaySolver::f(std::size_t i, std::span<const double> v, double t, std::span<double> out) const {
  const auto traj = get(i, v);
  std::vector<double> s(traj->dim());
  traj->eval(t, s);
  std::copy(s.begin(), s.begin() + prob_.m(), out.begin());
}

void RaySolver::dfdv(std::size_t i, std::span<const double> v, double t, std::span<double> out) const {
  const auto traj = get(i, v);
  std::vector<double> s(traj->dim());
  traj->eval(t, s);
  std::copy(s.begin() + prob_.m(), s.end(), out.begin());
}

FrobeniusSolution solve_total(const FrobeniusProblem& prob, const FrobeniusOptions& options) {
  FrobeniusSolution sol;
  sol.integrability = check_integrability(prob, options.probe_count);
  if (!sol.integrability.integrable && options.require_integrable) {
    throw Error(ErrorCode::IntegrabilityRejected,
                "DF(x, y)(v1, F v1)(v2) is not symmetric: max asymmetry classifies " +
                    sol.integrability.classification.describe());
  }
  sol.cert = certify_frobenius(prob, options.certify);
  const FrobeniusCertificate& c = sol.cert;
  const std::size_t n = prob.n(), m = prob.m();
  const EpsGrid& grid = c.grid;

  // the ray problem with parameter v
  {
    auto x0net = std::make_shared<const PointNet>(prob.x0_net);
    const Box I = Box::interval(-c.gamma, c.gamma);
    const Box P = Box::cube(std::vector<double>(n, 0.0), 0.999);
    IvpProblem& b = sol.ray_problem.base;
    b.I = I;
    b.U = prob.V;
    b.F = FunctionNet(grid, product(product(I, prob.V), P), std::make_shared<RayImpl>(prob.F.impl(), x0net, n, m));
    b.t0 = 0.0;
    b.t0_net = PointNet::constant(grid, std::vector<double>{0.0});
    b.x0_net = PointNet::from(grid, m, [&](double eps, std::span<double> y) {
      const auto y0 = at(prob.y0_net, eps);
      std::copy(y0.begin(), y0.end(), y.begin());
    });
    b.alpha = c.eta;
    b.L = prob.L;
    b.beta = prob.beta;
    b.a_override = c.a;
    sol.ray_problem.P = P;
    ParamSolveOptions po;
    po.integrator = options.integrator;
    po.certify = options.certify;
    po.diagnostics = options.diagnostics;
    sol.f = solve_with_parameters(sol.ray_problem, default_p_lattice(sol.ray_problem, 3), po);
  }

  auto rays = std::make_shared<RaySolver>(prob, c, options.integrator);
  sol.rays = rays;
  sol.domain = Box::cube(c.x0, c.lambda * c.r);
  sol.u = FunctionNet(grid, sol.domain, std::make_shared<TotalNetImpl>(rays, -1));
  if (!options.diagnostics) return sol;

  const PointSet pts = sample_box(sol.domain, n <= 2 ? 9 : 5, 16);
  const auto active = grid.active_indices();
  std::vector<double> res(grid.size(), kNaN), init(grid.size(), kNaN), floor(grid.size(), 0.0);
  parallel_for(active.size(), [&](std::size_t a_) {
    const std::size_t i = active[a_];
    const auto x0 = prob.x0_net[i];
    std::vector<double> v(n), y(m), phi(m * n), in(n + m), M(m * n);
    double r_ = 0.0, scale = 0.0;
    for (std::size_t k = 0; k < pts.size(); ++k) {
      for (std::size_t d = 0; d < n; ++d) v[d] = (pts[k][d] - x0[d]) / c.r;
      rays->f(i, v, c.r, y);
      rays->dfdv(i, v, c.r, phi);
      std::copy(pts[k].begin(), pts[k].end(), in.begin());
      std::copy(y.begin(), y.end(), in.begin() + n);
      prob.F.eval(grid[i], in, M);
      for (std::size_t q = 0; q < m * n; ++q) r_ = std::max(r_, std::abs(phi[q] / c.r - M[q]));
      scale = std::max({scale, sup_norm(y), sup_norm(M)});
    }
    res[i] = r_;
    floor[i] = 1e3 * std::max(options.integrator.rtol, options.integrator.atol) * (1.0 + scale);
    std::vector<double> u0(m);
    sol.u.eval(grid[i], x0, u0);
    init[i] = sup_distance(u0, prob.y0_net[i]);
  });
  sol.residual = NumberNet(grid, res);
  sol.initial_error = NumberNet(grid, init);
  GrowthOptions go;
  go.floor_per_eps = floor;
  const std::vector<int> orders{0, 1, 2, 3};
  sol.residual_class = classify_growth(sol.residual, orders, go);
  return sol;
}

KNetReport k_net_residual(const FrobeniusProblem& prob, const FrobeniusSolution& sol,
                          const std::vector<std::pair<std::vector<double>, std::vector<double>>>& probes) {
  const std::size_t n = prob.n(), m = prob.m();
  const FrobeniusCertificate& c = sol.cert;
  const EpsGrid& grid = c.grid;
  const RaySolver& rays = *sol.rays;
  for (const auto& [v, w] : probes) {
    if (v.size() != n || w.size() != n) throw Error(ErrorCode::InvalidArgument, "probe has the wrong dimension");
    if (sup_norm(v) >= 1.0) throw Error(ErrorCode::InvalidArgument, "probe v must lie in B_1(0)");
  }
  std::vector<FunctionNet> dy;
  for (std::size_t j = 0; j < m; ++j) dy.push_back(prob.F.partial(n + j));
  const double tol = 1e3 * std::max(rays.integrator().rtol, rays.integrator().atol);

  const auto active = grid.active_indices();
  std::vector<double> supk(grid.size(), kNaN), defect(grid.size(), kNaN), supA(grid.size(), kNaN);
  std::vector<double> floor(grid.size(), 0.0);
  const GaussRule& gl = gauss_legendre(10);
  parallel_for(active.size(), [&](std::size_t a_) {
    const std::size_t i = active[a_];
    const double eps = grid[i];
    const auto x0 = prob.x0_net[i];
    double sk = 0.0, sd = 0.0, sa = 0.0, scale = 0.0;
    for (const auto& [v, w] : probes) {
      const auto traj = rays.get(i, v);
      std::vector<double> s(traj->dim()), in(n + m), M(m * n), D(m * n), Fw(m), A(m * m), k(m), tw(n);
      // k(t) and A_v(t)
      auto eval_at = [&](double t) {
        traj->eval(t, s);
        for (std::size_t d = 0; d < n; ++d) {
          in[d] = x0[d] + t * v[d];
          tw[d] = t * w[d];
        }
        std::copy(s.begin(), s.begin() + m, in.begin() + n);
        prob.F.eval(eps, in, M);
        contract(M, m, n, tw, Fw);
        contract(std::span<const double>(s).subspan(m), m, n, w, k);
        for (std::size_t r = 0; r < m; ++r) {
          scale = std::max({scale, std::abs(k[r]), std::abs(Fw[r])});
          k[r] -= Fw[r];
        }
        for (std::size_t j = 0; j < m; ++j) {
          dy[j].eval(eps, in, D);
          std::vector<double> col(m);
          contract(D, m, n, v, col);
          for (std::size_t r = 0; r < m; ++r) A[r * m + j] = col[r];
        }
      };
      for (double t : detail::time_lattice(-c.h, c.h, 129)) {
        eval_at(t);
        sk = std::max(sk, sup_norm(k));
        sa = std::max(sa, row_sum_norm(A, m, m));
      }
      for (double t : detail::time_lattice(-c.h, c.h, 9)) {
        eval_at(t);
        const std::vector<double> kt = k;
        std::vector<double> integral(m, 0.0);
        constexpr std::size_t panels = 8;
        for (std::size_t p = 0; p < panels; ++p) {
          const double pa = t * double(p) / panels, pb = t * double(p + 1) / panels;
          for (std::size_t q = 0; q < gl.nodes.size(); ++q) {
            const double sq = 0.5 * (pa + pb) + 0.5 * (pb - pa) * gl.nodes[q];
            eval_at(sq);
            for (std::size_t r = 0; r < m; ++r) {
              double ak = 0.0;
              for (std::size_t j = 0; j < m; ++j) ak += A[r * m + j] * k[j];
              integral[r] += 0.5 * (pb - pa) * gl.weights[q] * ak;
            }
          }
        }
        for (std::size_t r = 0; r < m; ++r) sd = std::max(sd, std::abs(kt[r] - integral[r]));
      }
    }
    supk[i] = sk;
    defect[i] = sd;
    supA[i] = sa;
    floor[i] = tol * (1.0 + scale);
  });

  KNetReport rep;
  rep.sup_k = NumberNet(grid, supk);
  rep.linear_defect = NumberNet(grid, defect);
  rep.sup_A = NumberNet(grid, supA);
  rep.tolerance_floor = *std::max_element(floor.begin(), floor.end());
  GrowthOptions go;
  go.floor_per_eps = floor;
  const std::vector<int> orders{0, 1, 2, 3};
  rep.classification = classify_growth(rep.sup_k, orders, go);

  std::vector<double> ratio(grid.size(), kNaN);
  double below_one = 0.0, amax = 0.0;
  for (std::size_t i : active) {
    amax = std::max(amax, supA[i]);
    if (grid[i] < 1.0) {
      ratio[i] = supA[i] / std::log(1.0 / grid[i]);
      if (below_one == 0.0) below_one = grid[i];
    }
  }
  try {
    rep.A_log_bounded = amax == 0.0 || check_bounded(NumberNet(grid.with_eps0(below_one), ratio)).bounded;
  } catch (const Error&) {
    rep.A_log_bounded = false;
  }

  double kmax = 0.0;
  for (std::size_t i : active) kmax = std::max(kmax, supk[i]);
  if (kmax <= 1e-12) rep.label = "zero";
  else if (rep.classification.negligible_to(3)) rep.label = "tolerance-limited";
  else rep.label = rep.classification.describe();
  return rep;
}

}  // namespace colombeau
