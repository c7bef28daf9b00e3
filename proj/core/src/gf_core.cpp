#include "colombeau/gf_core.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <limits>

#include "colombeau/errors.hpp"
#include "colombeau/parallel.hpp"

namespace colombeau {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void require_inside(const FunctionNet& f, const Box& K) {
  if (K.dim() != f.dim() || !f.domain().contains(K)) {
    throw Error(ErrorCode::KOutsideDomain,
                "compact " + K.to_string() + " is not inside the domain " + f.domain().to_string());
  }
}

class ComposeImpl : public NetImpl {
 public:
  ComposeImpl(std::shared_ptr<const NetImpl> v, std::shared_ptr<const NetImpl> u,
              std::optional<Box> v_domain)
      : NetImpl(u->dim(), v->codim()), v_(std::move(v)), u_(std::move(u)), v_domain_(std::move(v_domain)) {}

  void eval(double eps, std::span<const double> x, std::span<double> out) const override {
    std::vector<double> y(u_->codim());
    u_->eval(eps, x, y);
    check(eps, y);
    v_->eval(eps, y, out);
  }

  std::shared_ptr<const NetImpl> partial(std::size_t var) const override;

  std::vector<Window> feature_windows(double eps, std::span<const double> base,
                                      std::span<const double> dir) const override {
    return u_->feature_windows(eps, base, dir);
  }

  void check(double eps, std::span<const double> y) const {
    if (v_domain_ && !v_domain_->contains(y)) {
      throw Error(ErrorCode::PointEscapesDomain,
                  "inner net leaves " + v_domain_->to_string() + " at eps = " + std::to_string(eps));
    }
  }

  std::shared_ptr<const NetImpl> v_, u_;
  std::optional<Box> v_domain_;
};

// d/dx_var (v o u) = sum_k (d_k v o u) * d_var u_k
class ComposePartialImpl : public NetImpl {
 public:
  ComposePartialImpl(std::shared_ptr<const ComposeImpl> parent, std::size_t var)
      : NetImpl(parent->dim(), parent->codim()), parent_(std::move(parent)) {
    du_ = parent_->u_->partial(var);
    for (std::size_t k = 0; k < parent_->v_->dim(); ++k) dv_.push_back(parent_->v_->partial(k));
  }

  void eval(double eps, std::span<const double> x, std::span<double> out) const override {
    const std::size_t m = parent_->u_->codim();
    std::vector<double> y(m), dy(m), tmp(codim());
    parent_->u_->eval(eps, x, y);
    parent_->check(eps, y);
    du_->eval(eps, x, dy);
    for (std::size_t i = 0; i < codim(); ++i) out[i] = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
      if (dy[k] == 0.0) continue;
      dv_[k]->eval(eps, y, tmp);
      for (std::size_t i = 0; i < codim(); ++i) out[i] += tmp[i] * dy[k];
    }
  }

 private:
  std::shared_ptr<const ComposeImpl> parent_;
  std::shared_ptr<const NetImpl> du_;
  std::vector<std::shared_ptr<const NetImpl>> dv_;
};

std::shared_ptr<const NetImpl> ComposeImpl::partial(std::size_t var) const {
  return std::make_shared<ComposePartialImpl>(
      std::static_pointer_cast<const ComposeImpl>(shared_from_this()), var);
}

}  // namespace

NumberNet sup_on_compact(const FunctionNet& f, const Box& K, std::span<const std::size_t> deriv_vars,
                         const SupOptions& opt) {
  require_inside(f, K);
  const FunctionNet g = deriv_vars.empty() ? f : f.partial(deriv_vars);
  const PointSet pts = sample_box(K, opt.per_axis, opt.interior_probes);
  const EpsGrid& grid = f.grid();
  const auto active = grid.active_indices();
  std::vector<double> sup(grid.size(), kNaN);
  parallel_for(active.size(), [&](std::size_t a) {
    const std::size_t i = active[a];
    std::vector<double> out(g.codim());
    double m = 0.0;
    for (std::size_t k = 0; k < pts.size(); ++k) {
      g.eval(grid[i], pts[k], out);
      m = std::max(m, sup_norm(out));
    }
    sup[i] = m;
  });
  return NumberNet(grid, std::move(sup));
}

CBoundResult check_cbounded(const FunctionNet& f, const Box& K, const Box& V, const SupOptions& opt) {
  require_inside(f, K);
  if (V.dim() != f.codim()) throw Error(ErrorCode::InvalidArgument, "target box has wrong dimension");
  const PointSet pts = sample_box(K, opt.per_axis, opt.interior_probes);
  const EpsGrid& grid = f.grid();
  const auto active = grid.active_indices();
  const std::size_t m = f.codim();

  struct PerEps {
    std::vector<double> lo, hi;
    double sup = 0.0;
    double depth = std::numeric_limits<double>::infinity();
    std::size_t argmax = 0, argshallow = 0;
  };
  std::vector<PerEps> per(active.size());
  parallel_for(active.size(), [&](std::size_t a) {
    PerEps& p = per[a];
    p.lo.assign(m, std::numeric_limits<double>::infinity());
    p.hi.assign(m, -std::numeric_limits<double>::infinity());
    std::vector<double> out(m);
    for (std::size_t k = 0; k < pts.size(); ++k) {
      f.eval(grid[active[a]], pts[k], out);
      for (std::size_t c = 0; c < m; ++c) {
        p.lo[c] = std::min(p.lo[c], out[c]);
        p.hi[c] = std::max(p.hi[c], out[c]);
      }
      const double s = sup_norm(out);
      if (s > p.sup || k == 0) {
        p.sup = s;
        p.argmax = k;
      }
      const double d = V.depth(out);
      if (d < p.depth) {
        p.depth = d;
        p.argshallow = k;
      }
    }
  });

  std::vector<double> sup(grid.size(), kNaN);
  for (std::size_t a = 0; a < active.size(); ++a) sup[active[a]] = per[a].sup;
  CBoundResult res{std::nullopt, std::nullopt, NumberNet(grid, sup)};

  auto fail = [&](std::size_t a, std::size_t k, std::string reason) {
    CBoundFailure fl;
    fl.eps = grid[active[a]];
    fl.point.assign(pts[k].begin(), pts[k].end());
    fl.value = f(fl.eps, pts[k]);
    for (int j = 1; j <= 12; ++j) {
      if (!V.exhaustion(j).contains(fl.value)) ++fl.escaped_levels;
    }
    fl.reason = std::move(reason);
    res.failure = std::move(fl);
    return res;
  };

  for (std::size_t a = 0; a < active.size(); ++a) {
    if (!(per[a].depth > 0.0)) return fail(a, per[a].argshallow, "values leave the target set");
  }
  const BoundednessReport bounded = check_bounded(res.sup_norm);
  if (!bounded.bounded) {
    return fail(active.size() - 1, per.back().argmax,
                "values diverge as eps -> 0 (fitted growth order " +
                    std::to_string(bounded.growth_order) + ")");
  }
  bool finite_sides = false;
  for (std::size_t c = 0; c < m; ++c) {
    finite_sides = finite_sides || std::isfinite(V.lower(c)) || std::isfinite(V.upper(c));
  }
  if (finite_sides) {
    std::vector<double> inv(grid.size(), kNaN);
    for (std::size_t a = 0; a < active.size(); ++a) inv[active[a]] = 1.0 / per[a].depth;
    if (!check_bounded(NumberNet(grid, inv)).bounded) {
      return fail(active.size() - 1, per.back().argshallow,
                  "values approach the boundary of the target set as eps -> 0");
    }
  }

  std::vector<double> lo(m, std::numeric_limits<double>::infinity());
  std::vector<double> hi(m, -std::numeric_limits<double>::infinity());
  for (const auto& p : per) {
    for (std::size_t c = 0; c < m; ++c) {
      lo[c] = std::min(lo[c], p.lo[c]);
      hi[c] = std::max(hi[c], p.hi[c]);
    }
  }
  const Box hull(lo, hi);
  std::vector<double> Llo = lo, Lhi = hi;
  for (std::size_t c = 0; c < m; ++c) {
    const double pad = 0.05 * (hi[c] - lo[c]) + 1e-9 * (1.0 + std::abs(0.5 * (lo[c] + hi[c])));
    Llo[c] = lo[c] - std::min(pad, 0.5 * (lo[c] - V.lower(c)));
    Lhi[c] = hi[c] + std::min(pad, 0.5 * (V.upper(c) - hi[c]));
  }
  CBoundCertificate cert;
  cert.source = K;
  cert.target = Box(Llo, Lhi);
  cert.eps0_used = grid.eps0();
  cert.margin = std::max(0.0, cert.target.margin_of(hull));
  if (!V.compactly_contains(cert.target)) {
    return fail(0, per[0].argshallow, "image hull is not compactly contained in the target set");
  }
  res.certificate = std::move(cert);
  return res;
}

FunctionNet compose(const FunctionNet& v, const FunctionNet& u,
                    const std::optional<CBoundCertificate>& cert) {
  if (!cert) {
    throw Error(ErrorCode::MissingCertificate,
                "composition needs a c-bound certificate for the inner net");
  }
  if (u.codim() != v.dim()) throw Error(ErrorCode::InvalidArgument, "compose: dimension mismatch");
  if (!v.domain().contains(cert->target)) {
    throw Error(ErrorCode::InvalidArgument,
                "certificate target " + cert->target.to_string() + " is not inside the domain of v");
  }
  if (!u.domain().contains(cert->source)) {
    throw Error(ErrorCode::InvalidArgument, "certificate source is not inside the domain of u");
  }
  return FunctionNet(u.grid(), u.domain(), std::make_shared<ComposeImpl>(v.impl(), u.impl(), v.domain()));
}

void check_growth_witnesses(const SlowlyIncreasing& s, double probe_radius) {
  const std::size_t d = s.v.dim();
  std::vector<double> centre(d, 0.0);
  const Box cube = Box::cube(centre, probe_radius);
  const PointSet pts = sample_box(cube, d == 1 ? 4001 : 0, 64);
  // derivative multi-indices of each order, as non-decreasing variable lists
  for (std::size_t order = 0; order < s.witnesses.size(); ++order) {
    std::vector<std::size_t> vars(order, 0);
    while (true) {
      const FunctionNet g = s.v.partial(vars);
      const auto& w = s.witnesses[order];
      std::vector<double> out(g.codim());
      for (std::size_t k = 0; k < pts.size(); ++k) {
        double value;
        try {
          g.eval(1.0, pts[k], out);
          value = sup_norm(out);
        } catch (const Error&) {
          value = std::numeric_limits<double>::infinity();
        }
        const double bound = w.C * std::pow(1.0 + sup_norm(pts[k]), w.N);
        if (!(value <= bound * (1.0 + 1e-9))) {
          throw Error(ErrorCode::GrowthWitnessFailed,
                      "derivative of order " + std::to_string(order) + " exceeds C(1+|x|)^N with C = " +
                          std::to_string(w.C) + ", N = " + std::to_string(w.N));
        }
      }
      std::size_t i = order;
      while (i > 0 && vars[i - 1] == d - 1) --i;
      if (i == 0) break;
      const std::size_t next = vars[i - 1] + 1;
      for (std::size_t j = i - 1; j < order; ++j) vars[j] = next;
    }
  }
}

FunctionNet compose_slowly_increasing(const SlowlyIncreasing& s, const FunctionNet& u,
                                      double probe_radius) {
  if (u.codim() != s.v.dim()) throw Error(ErrorCode::InvalidArgument, "compose: dimension mismatch");
  if (s.witnesses.empty()) throw Error(ErrorCode::GrowthWitnessFailed, "no growth witnesses supplied");
  check_growth_witnesses(s, probe_radius);
  return FunctionNet(u.grid(), u.domain(), std::make_shared<ComposeImpl>(s.v.impl(), u.impl(), std::nullopt));
}

PointNet point_value(const FunctionNet& f, const PointNet& p) {
  if (p.dim() != f.dim()) throw Error(ErrorCode::InvalidArgument, "point has the wrong dimension");
  const EpsGrid& grid = p.grid();
  const std::size_t m = f.codim();
  std::vector<double> s(grid.size() * m, kNaN);
  for (std::size_t i : grid.active_indices()) {
    if (!f.domain().contains(p[i])) {
      throw Error(ErrorCode::PointEscapesDomain,
                  "point sample at eps = " + std::to_string(grid[i]) + " leaves " + f.domain().to_string());
    }
    f.eval(grid[i], p[i], std::span<double>(s.data() + i * m, m));
  }
  return PointNet(grid, m, std::move(s));
}

PointEqualityReport equal_by_points(const FunctionNet& f, const FunctionNet& g, std::size_t u_dim,
                                    const std::vector<PointNet>& probes, int m_test,
                                    const SupOptions& opt) {
  if (f.dim() != g.dim() || f.codim() != g.codim() || u_dim > f.dim()) {
    throw Error(ErrorCode::InvalidArgument, "equal_by_points: shape mismatch");
  }
  const std::size_t v_dim = f.dim() - u_dim;
  const Box& D = f.domain();
  const Box U(std::vector<double>(D.lower().begin(), D.lower().begin() + u_dim),
              std::vector<double>(D.upper().begin(), D.upper().begin() + u_dim));

  PointEqualityReport rep;
  rep.equal = true;
  std::vector<int> orders;
  for (int m = 0; m <= m_test; ++m) orders.push_back(m);

  for (const PointNet& probe : probes) {
    if (probe.dim() != v_dim) throw Error(ErrorCode::InvalidArgument, "probe has the wrong dimension");
    const auto lim = near_standard_limit(probe);
    if (!lim.limit) throw Error(ErrorCode::ProbeNotNearStandard, "probe has no limit as eps -> 0");
    rep.probe_limits.push_back(*lim.limit);

    const EpsGrid& grid = f.grid();
    auto slice = [&](const FunctionNet& h) {
      return FunctionNet::from_lambda(grid, U, h.codim(),
                                      [h, probe, u_dim](double e, std::span<const double> x, std::span<double> out) {
                                        const auto y = probe[probe.grid().index_of(e)];
                                        std::vector<double> z(x.begin(), x.end());
                                        z.insert(z.end(), y.begin(), y.end());
                                        h.eval(e, z, out);
                                      });
    };
    const std::vector<FunctionNet> pair{slice(f), slice(g)};
    const double coeffs[] = {1.0, -1.0};
    const FunctionNet diff = linear_combination(coeffs, pair);

    GrowthClass worst;
    bool first = true;
    for (int j = 1; j <= 3; ++j) {
      const Box K = U.exhaustion(j);
      const NumberNet d = sup_on_compact(diff, K, {}, opt);
      const NumberNet sf = sup_on_compact(pair[0], K, {}, opt);
      const NumberNet sg = sup_on_compact(pair[1], K, {}, opt);
      GrowthOptions go;
      go.floor_per_eps.resize(grid.size());
      for (std::size_t i = 0; i < grid.size(); ++i) {
        go.floor_per_eps[i] = 8.0 * DBL_EPSILON * std::max(sf[i], sg[i]);
        if (std::isnan(go.floor_per_eps[i])) go.floor_per_eps[i] = 0.0;
      }
      const GrowthClass c = classify_growth(d, orders, go);
      const bool ok = c.negligible_to(m_test);
      if (first || !ok) worst = c;
      first = false;
      if (!ok) {
        rep.equal = false;
        break;
      }
    }
    rep.per_probe.push_back(worst);
  }
  rep.coverage = std::to_string(probes.size()) +
                 " near-standard probe(s), compacts V_1..V_3 of the exhaustion; a finite sample, "
                 "not a statement about every near-standard point";
  return rep;
}

}  // namespace colombeau
