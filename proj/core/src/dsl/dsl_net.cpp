#include <cmath>
#include <cstdio>

#include "colombeau/rhs_dsl.hpp"

namespace colombeau {

namespace {

std::string format_point(std::span<const double> x) {
  std::string s = "(";
  for (std::size_t i = 0; i < x.size(); ++i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%s%.6g", i ? ", " : "", x[i]);
    s += buf;
  }
  return s + ")";
}

}  // namespace

DslNetImpl::DslNetImpl(dsl::Signature sig, std::vector<dsl::Expr> components)
    : NetImpl(sig.size(), components.size()), sig_(std::move(sig)), exprs_(std::move(components)) {
  if (exprs_.empty()) throw Error(ErrorCode::InvalidArgument, "net needs at least one component");
  for (const auto& e : exprs_) {
    if (dsl::arity(e) > sig_.size()) {
      throw Error(ErrorCode::InvalidArgument, "expression uses variables outside its signature");
    }
    programs_.emplace_back(e);
    std::vector<dsl::Expr> feats;
    dsl::collect_features(e, feats);
    for (const auto& f : feats) features_.emplace_back(f);
  }
}

void DslNetImpl::eval(double eps, std::span<const double> x, std::span<double> out) const {
  for (std::size_t i = 0; i < programs_.size(); ++i) {
    const double v = programs_[i].eval(x, eps);
    if (!std::isfinite(v)) {
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.6g", eps);
      throw Error(ErrorCode::DomainEvaluationError,
                  "'" + dsl::print(exprs_[i], sig_) + "' is not finite at eps = " + buf +
                      ", point " + format_point(x));
    }
    out[i] = v;
  }
}

std::shared_ptr<const NetImpl> DslNetImpl::partial(std::size_t var) const {
  if (var >= dim()) throw Error(ErrorCode::InvalidArgument, "partial: variable out of range");
  std::lock_guard lock(mu_);
  auto& slot = partials_[var];
  if (!slot) {
    std::vector<dsl::Expr> d;
    for (const auto& e : exprs_) d.push_back(dsl::differentiate(e, var));
    slot = std::make_shared<DslNetImpl>(sig_, std::move(d));
  }
  return slot;
}

std::shared_ptr<const DslNetImpl> DslNetImpl::eps_partial() const {
  std::vector<dsl::Expr> d;
  for (const auto& e : exprs_) d.push_back(dsl::differentiate(e, dsl::kEpsVar));
  return std::make_shared<DslNetImpl>(sig_, std::move(d));
}

std::vector<Window> DslNetImpl::feature_windows(double eps, std::span<const double> base,
                                                std::span<const double> dir) const {
  std::vector<Window> out;
  if (features_.empty()) return out;
  const std::size_t n = base.size();
  std::vector<double> p(n);
  auto at = [&](const dsl::Program& prog, double s, double shift) {
    for (std::size_t i = 0; i < n; ++i) {
      p[i] = base[i] + s * dir[i];
      // move the coordinates transverse to the line
      if (dir[i] == 0.0) p[i] += shift * (0.37 + 0.11 * static_cast<double>(i)) * (1.0 + std::abs(base[i]));
    }
    return prog.eval(p, eps);
  };
  for (const auto& prog : features_) {
    const double g0 = at(prog, 0.0, 0.0);
    const double g1 = at(prog, 1.0, 0.0);
    const double gm = at(prog, -1.0, 0.0);
    const double g2 = at(prog, 2.0, 0.0);
    const double gs = at(prog, 0.0, 0.1);
    if (!std::isfinite(g0 + g1 + gm + g2 + gs)) continue;
    const double scale = 1.0 + std::abs(g0) + std::abs(g1) + std::abs(g2);
    const double tol = 1e-10 * scale;
    const bool affine = std::abs(g1 - 2 * g0 + gm) <= tol && std::abs(g2 - 2 * g1 + g0) <= tol;
    const bool transverse_free = std::abs(gs - g0) <= tol;
    const double slope = g1 - g0;
    if (!affine || !transverse_free || slope == 0.0) continue;
    const double centre = -g0 / slope;
    const double half = eps / std::abs(slope);
    out.push_back({centre - half, centre + half});
  }
  return out;
}

FunctionNet to_function_net(const std::vector<dsl::Expr>& components, const dsl::Signature& sig,
                            const EpsGrid& grid, const Box& domain) {
  if (domain.dim() != sig.size()) {
    throw Error(ErrorCode::InvalidArgument,
                "domain dimension " + std::to_string(domain.dim()) + " does not match the " +
                    std::to_string(sig.size()) + " variables of the signature");
  }
  auto impl = std::make_shared<DslNetImpl>(sig, components);
  FunctionNet net(grid, domain, impl);

  // Probe a coarse lattice of a compact of the open domain (poles may sit
  // on the boundary, e.g. 1/(x+1) on (-1, 1)).
  const Box probe_box = domain.exhaustion(4);
  const std::size_t dim = domain.dim();
  std::size_t per_axis = 9;
  while (per_axis > 2 && std::pow(static_cast<double>(per_axis), static_cast<double>(dim)) > 4096.0) {
    --per_axis;
  }
  const PointSet pts = sample_box(probe_box, per_axis, 16);
  std::vector<double> out(components.size());
  for (std::size_t i : grid.active_indices()) {
    for (std::size_t k = 0; k < pts.size(); ++k) impl->eval(grid[i], pts[k], out);
  }
  return net;
}

FunctionNet to_function_net(const dsl::Expr& e, const dsl::Signature& sig, const EpsGrid& grid,
                            const Box& domain) {
  return to_function_net(std::vector<dsl::Expr>{e}, sig, grid, domain);
}

FunctionNet parse_net(const std::vector<std::string>& sources, const dsl::Signature& sig,
                      const EpsGrid& grid, const Box& domain, const dsl::Definitions& defs) {
  std::vector<dsl::Expr> exprs;
  for (const auto& s : sources) exprs.push_back(dsl::parse(s, sig, defs));
  return to_function_net(exprs, sig, grid, domain);
}

dsl::Definitions parse_definitions(const std::vector<std::pair<std::string, std::string>>& defs) {
  dsl::Definitions out;
  for (const auto& [name, src] : defs) out[name] = dsl::parse(src, dsl::Signature::eps_only(), out);
  return out;
}

NumberNet number_net(const std::string& source, const EpsGrid& grid, const dsl::Definitions& defs) {
  const dsl::Expr e = dsl::parse(source, dsl::Signature::eps_only(), defs);
  const dsl::Program prog(e);
  std::vector<double> s(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) s[i] = prog.eval({}, grid[i]);
  return NumberNet(grid, std::move(s));
}

PointNet point_net(const std::vector<std::string>& sources, const EpsGrid& grid,
                   const dsl::Definitions& defs, std::optional<Box> ambient) {
  std::vector<dsl::Program> progs;
  for (const auto& src : sources) progs.emplace_back(dsl::parse(src, dsl::Signature::eps_only(), defs));
  return PointNet::from(
      grid, sources.size(),
      [&](double e, std::span<double> out) {
        for (std::size_t c = 0; c < progs.size(); ++c) out[c] = progs[c].eval({}, e);
      },
      std::move(ambient));
}

}  // namespace colombeau
