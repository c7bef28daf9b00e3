#include "colombeau/eps_calculus.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <cstdio>
#include <limits>

#include "colombeau/errors.hpp"

namespace colombeau {

// ---------------------------------------------------------------- EpsGrid

EpsGrid::EpsGrid(std::vector<double> values, double eps0)
    : values_(std::move(values)), eps0_(eps0) {
  if (values_.empty()) throw Error(ErrorCode::EmptyGrid, "eps grid has no values");
  if (!(eps0_ > 0.0 && eps0_ <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "eps0 must lie in (0, 1]");
  }
  for (std::size_t i = 0; i < values_.size(); ++i) {
    const double e = values_[i];
    if (!(e > 0.0 && e <= 1.0)) {
      throw Error(ErrorCode::InvalidArgument, "eps values must lie in (0, 1]");
    }
    if (i > 0 && !(e < values_[i - 1])) {
      throw Error(ErrorCode::InvalidArgument, "eps values must be strictly decreasing");
    }
  }
  if (active_count() < kMinActivePoints) {
    throw Error(ErrorCode::EmptyGrid, "eps grid needs at least " +
                                          std::to_string(kMinActivePoints) +
                                          " values <= eps0 for stable fits");
  }
}

EpsGrid EpsGrid::dyadic(int k0, int k1, double eps0) {
  if (k0 < 0 || k1 < k0) throw Error(ErrorCode::InvalidArgument, "dyadic grid needs 0 <= k0 <= k1");
  std::vector<double> v;
  for (int k = k0; k <= k1; ++k) v.push_back(std::ldexp(1.0, -k));
  return EpsGrid(std::move(v), eps0);
}

std::vector<std::size_t> EpsGrid::active_indices() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (values_[i] <= eps0_) out.push_back(i);
  }
  return out;
}

std::size_t EpsGrid::active_count() const {
  return static_cast<std::size_t>(
      std::count_if(values_.begin(), values_.end(), [&](double e) { return e <= eps0_; }));
}

std::optional<std::size_t> EpsGrid::find(double eps) const {
  // values_ is strictly decreasing
  auto it = std::lower_bound(values_.begin(), values_.end(), eps, std::greater<>());
  if (it != values_.end() && *it == eps) return static_cast<std::size_t>(it - values_.begin());
  return std::nullopt;
}

std::size_t EpsGrid::index_of(double eps) const {
  if (auto i = find(eps)) return *i;
  throw Error(ErrorCode::GridMismatch, "eps = " + std::to_string(eps) + " is not a grid value");
}

EpsGrid EpsGrid::restricted() const {
  std::vector<double> v;
  for (double e : values_) {
    if (e <= eps0_) v.push_back(e);
  }
  return EpsGrid(std::move(v), eps0_);
}

// -------------------------------------------------------------- NumberNet

NumberNet::NumberNet(EpsGrid grid, std::vector<double> samples)
    : grid_(std::move(grid)), samples_(std::move(samples)) {
  if (samples_.size() != grid_.size()) {
    throw Error(ErrorCode::GridMismatch, "number net needs one sample per grid value");
  }
  for (std::size_t i = 0; i < samples_.size(); ++i) {
    if (grid_.active(i) && !std::isfinite(samples_[i])) {
      throw Error(ErrorCode::NonFiniteSample,
                  "sample at eps = " + std::to_string(grid_[i]) + " is not finite");
    }
  }
}

NumberNet NumberNet::from(const EpsGrid& grid, const std::function<double(double)>& f) {
  std::vector<double> s(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) s[i] = f(grid[i]);
  return NumberNet(grid, std::move(s));
}

NumberNet NumberNet::constant(const EpsGrid& grid, double c) {
  return NumberNet(grid, std::vector<double>(grid.size(), c));
}

NumberNet abs_difference(const NumberNet& a, const NumberNet& b) {
  if (!(a.grid() == b.grid())) throw Error(ErrorCode::GridMismatch, "nets live on different grids");
  std::vector<double> s(a.size());
  for (std::size_t i = 0; i < s.size(); ++i) s[i] = std::abs(a[i] - b[i]);
  return NumberNet(a.grid(), std::move(s));
}

NumberNet operator+(const NumberNet& a, const NumberNet& b) {
  if (!(a.grid() == b.grid())) throw Error(ErrorCode::GridMismatch, "nets live on different grids");
  std::vector<double> s(a.size());
  for (std::size_t i = 0; i < s.size(); ++i) s[i] = a[i] + b[i];
  return NumberNet(a.grid(), std::move(s));
}

// --------------------------------------------------------------- PointNet

PointNet::PointNet(EpsGrid grid, std::size_t dim, std::vector<double> samples,
                   std::optional<Box> ambient)
    : grid_(std::move(grid)), dim_(dim), samples_(std::move(samples)), ambient_(std::move(ambient)) {
  if (samples_.size() != grid_.size() * dim_) {
    throw Error(ErrorCode::GridMismatch, "point net needs one vector per grid value");
  }
  if (ambient_ && ambient_->dim() != dim_) {
    throw Error(ErrorCode::InvalidArgument, "ambient box has the wrong dimension");
  }
  for (std::size_t i = 0; i < grid_.size(); ++i) {
    if (!grid_.active(i)) continue;
    for (double v : (*this)[i]) {
      if (!std::isfinite(v)) {
        throw Error(ErrorCode::NonFiniteSample,
                    "point sample at eps = " + std::to_string(grid_[i]) + " is not finite");
      }
    }
    if (ambient_ && !ambient_->contains((*this)[i])) {
      throw Error(ErrorCode::PointEscapesDomain,
                  "point sample at eps = " + std::to_string(grid_[i]) + " leaves " +
                      ambient_->to_string());
    }
  }
}

PointNet PointNet::from(const EpsGrid& grid, std::size_t dim,
                        const std::function<void(double, std::span<double>)>& f,
                        std::optional<Box> ambient) {
  std::vector<double> s(grid.size() * dim);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    f(grid[i], std::span<double>(s.data() + i * dim, dim));
  }
  return PointNet(grid, dim, std::move(s), std::move(ambient));
}

PointNet PointNet::constant(const EpsGrid& grid, std::span<const double> x) {
  std::vector<double> s;
  s.reserve(grid.size() * x.size());
  for (std::size_t i = 0; i < grid.size(); ++i) s.insert(s.end(), x.begin(), x.end());
  return PointNet(grid, x.size(), std::move(s));
}

NumberNet PointNet::component(std::size_t c) const {
  std::vector<double> s(grid_.size());
  for (std::size_t i = 0; i < grid_.size(); ++i) s[i] = (*this)[i][c];
  return NumberNet(grid_, std::move(s));
}

Box PointNet::active_hull() const {
  std::vector<double> lo(dim_, std::numeric_limits<double>::infinity());
  std::vector<double> hi(dim_, -std::numeric_limits<double>::infinity());
  for (std::size_t i : grid_.active_indices()) {
    for (std::size_t c = 0; c < dim_; ++c) {
      lo[c] = std::min(lo[c], (*this)[i][c]);
      hi[c] = std::max(hi[c], (*this)[i][c]);
    }
  }
  return Box(std::move(lo), std::move(hi));
}

// ---------------------------------------------------------------- growth

std::string to_string(GrowthKind kind) {
  switch (kind) {
    case GrowthKind::Moderate: return "Moderate";
    case GrowthKind::Negligible: return "Negligible";
    case GrowthKind::SuperPolynomial: return "SuperPolynomial";
    case GrowthKind::Inconclusive: return "Inconclusive";
  }
  return "?";
}

std::string GrowthClass::describe() const {
  char buf[160];
  switch (kind) {
    case GrowthKind::Moderate:
      std::snprintf(buf, sizeof buf, "Moderate(%d), slope %.4g, residual %.3g", order, fit.slope,
                    fit.residual);
      break;
    case GrowthKind::Negligible:
      std::snprintf(buf, sizeof buf, "Negligible(%d), slope %.4g, %zu floor samples", order,
                    fit.slope, floor_points);
      break;
    default:
      std::snprintf(buf, sizeof buf, "%s, slope %.4g, residual %.3g", to_string(kind).c_str(),
                    fit.slope, fit.residual);
  }
  return buf;
}

std::vector<int> default_orders(int max_order) {
  std::vector<int> v;
  for (int k = 0; k <= max_order; ++k) v.push_back(k);
  return v;
}

namespace {

struct Sample {
  double log_eps;
  double log_abs;
  double eps;
  double abs;
};

double floor_at(const GrowthOptions& o, std::size_t i) {
  double f = o.noise_floor;
  if (i < o.floor_per_eps.size()) f = std::max(f, o.floor_per_eps[i]);
  return f;
}

LogLogFit regress(const std::vector<Sample>& s) {
  LogLogFit fit;
  fit.points = s.size();
  if (s.size() < 2) {
    if (s.size() == 1) fit.intercept = s[0].log_abs;
    return fit;
  }
  double mx = 0, my = 0;
  for (const auto& p : s) {
    mx += p.log_eps;
    my += p.log_abs;
  }
  mx /= s.size();
  my /= s.size();
  double sxx = 0, sxy = 0;
  for (const auto& p : s) {
    sxx += (p.log_eps - mx) * (p.log_eps - mx);
    sxy += (p.log_eps - mx) * (p.log_abs - my);
  }
  fit.slope = sxx > 0 ? sxy / sxx : 0.0;
  fit.intercept = my - fit.slope * mx;
  double ss = 0;
  for (const auto& p : s) {
    const double r = p.log_abs - (fit.intercept + fit.slope * p.log_eps);
    ss += r * r;
  }
  fit.residual = std::sqrt(ss / s.size());
  return fit;
}

// Consecutive log-log slopes, ordered from large to small eps.
std::vector<double> local_slopes(const std::vector<Sample>& s) {
  std::vector<double> out;
  for (std::size_t k = 0; k + 1 < s.size(); ++k) {
    const double dx = s[k + 1].log_eps - s[k].log_eps;
    if (dx != 0.0) out.push_back((s[k + 1].log_abs - s[k].log_abs) / dx);
  }
  return out;
}

// Local slopes never decrease towards small eps: growth decelerates or
// decay accelerates. Either only strengthens a bound that already holds.
bool favourable_trend(const std::vector<Sample>& s) {
  const auto ls = local_slopes(s);
  if (ls.size() < 2) return false;
  for (std::size_t k = 0; k + 1 < ls.size(); ++k) {
    if (ls[k + 1] < ls[k] - 1e-6 * (1.0 + std::abs(ls[k]))) return false;
  }
  return true;
}

// Growth accelerates towards small eps: the later half of the local slopes
// is markedly steeper than the earlier half.
bool accelerating_growth(const std::vector<Sample>& s) {
  const auto ls = local_slopes(s);
  if (ls.size() < 3) return false;
  const std::size_t half = ls.size() / 2;
  double early = 0, late = 0;
  for (std::size_t k = 0; k < half; ++k) early += ls[k];
  for (std::size_t k = half; k < ls.size(); ++k) late += ls[k];
  early /= static_cast<double>(half);
  late /= static_cast<double>(ls.size() - half);
  return late < 0.0 && late < 1.2 * early;
}

struct Prepared {
  std::vector<std::size_t> active;
  std::vector<Sample> above;           // above the floor, large eps first
  std::vector<double> abs_all;         // |r| for active, same order as active
  std::vector<bool> at_floor;          // per active entry
  std::vector<double> floor;           // per active entry
  LogLogFit fit;
};

Prepared prepare(const NumberNet& net, const GrowthOptions& options) {
  Prepared p;
  p.active = net.grid().active_indices();
  if (p.active.empty()) throw Error(ErrorCode::EmptyGrid, "no grid values at or below eps0");
  for (std::size_t i : p.active) {
    const double v = net[i];
    if (!std::isfinite(v)) {
      throw Error(ErrorCode::NonFiniteSample, "sample at eps = " + std::to_string(net.grid()[i]));
    }
    const double a = std::abs(v);
    const double fl = floor_at(options, i);
    const bool floor = a <= fl;
    p.floor.push_back(fl);
    p.abs_all.push_back(a);
    p.at_floor.push_back(floor);
    if (!floor) {
      const double e = net.grid()[i];
      p.above.push_back({std::log(e), std::log(a), e, a});
    }
  }
  p.fit = regress(p.above);
  return p;
}

// |r_eps| eps^power <= C on every above-floor sample, C the max over the three
// largest eps. power = N for moderate checks, -m for negligible checks. The
// floor doubles as the absolute uncertainty of a sample, so a sample only
// fails when it exceeds the bound by more than that.
bool bound_holds(const NumberNet& net, const Prepared& p, double power, double slack,
                 double* constant) {
  double c = 0.0;
  for (std::size_t k = 0; k < std::min<std::size_t>(3, p.active.size()); ++k) {
    const double e = net.grid()[p.active[k]];
    c = std::max(c, p.abs_all[k] * std::pow(e, power));
  }
  if (constant) *constant = c;
  for (std::size_t k = 0; k < p.active.size(); ++k) {
    if (p.at_floor[k]) continue;
    const double e = net.grid()[p.active[k]];
    const double v = (p.abs_all[k] - p.floor[k]) * std::pow(e, power);
    if (!(v <= c * (1.0 + slack) + std::numeric_limits<double>::min())) return false;
  }
  return true;
}

}  // namespace

LogLogFit fit_loglog(const NumberNet& net, const GrowthOptions& options) {
  return prepare(net, options).fit;
}

GrowthClass classify_growth(const NumberNet& net, std::span<const int> orders_to_test,
                            const GrowthOptions& options) {
  if (orders_to_test.empty()) throw Error(ErrorCode::InvalidArgument, "no orders to test");
  const Prepared p = prepare(net, options);

  GrowthClass out;
  out.fit = p.fit;
  out.floor_points = p.active.size() - p.above.size();

  std::vector<int> orders(orders_to_test.begin(), orders_to_test.end());
  std::sort(orders.begin(), orders.end());
  orders.erase(std::unique(orders.begin(), orders.end()), orders.end());
  const int max_order = orders.back();

  const bool shape_ok = p.above.size() < 3 || p.fit.residual < options.max_residual ||
                        favourable_trend(p.above);

  if (shape_ok) {
    int m_max = 0;
    bool any = false;
    for (int m : orders) {
      if (m < 1) continue;
      if (!bound_holds(net, p, -static_cast<double>(m), options.relative_slack, nullptr)) break;
      m_max = m;
      any = true;
    }
    if (any) {
      out.kind = GrowthKind::Negligible;
      out.order = m_max;
      return out;
    }
    for (int n : orders) {
      if (n < 0) continue;
      double c = 0.0;
      if (bound_holds(net, p, static_cast<double>(n), options.relative_slack, &c)) {
        out.kind = GrowthKind::Moderate;
        out.order = n;
        out.constant = c;
        return out;
      }
    }
  }

  if (p.above.size() >= 4 && p.fit.slope < -(max_order + 1.0) && accelerating_growth(p.above)) {
    out.kind = GrowthKind::SuperPolynomial;
    return out;
  }
  out.kind = GrowthKind::Inconclusive;
  return out;
}

LinearFit fit_vs_log_inverse(const NumberNet& net) {
  LinearFit fit;
  const auto active = net.grid().active_indices();
  std::vector<std::pair<double, double>> pts;
  for (std::size_t i : active) pts.emplace_back(std::log(1.0 / net.grid()[i]), net[i]);
  fit.points = pts.size();
  double mx = 0, my = 0;
  for (auto [x, y] : pts) {
    mx += x;
    my += y;
  }
  mx /= pts.size();
  my /= pts.size();
  double sxx = 0, sxy = 0;
  for (auto [x, y] : pts) {
    sxx += (x - mx) * (x - mx);
    sxy += (x - mx) * (y - my);
  }
  fit.slope = sxx > 0 ? sxy / sxx : 0.0;
  fit.intercept = my - fit.slope * mx;
  double ss = 0;
  for (auto [x, y] : pts) {
    const double r = y - (fit.intercept + fit.slope * x);
    ss += r * r;
  }
  fit.residual = std::sqrt(ss / pts.size());
  return fit;
}

BoundednessReport check_bounded(const NumberNet& net) {
  BoundednessReport rep;
  const Prepared p = prepare(net, {});
  rep.fit = p.fit;
  for (double a : p.abs_all) rep.max_value = std::max(rep.max_value, a);
  if (p.above.empty()) {
    rep.bounded = true;
    return rep;
  }
  rep.growth_order = std::max(0.0, -p.fit.slope);
  const std::size_t half = p.abs_all.size() / 2;
  double early = 0, late = 0;
  for (std::size_t k = 0; k < p.abs_all.size(); ++k) {
    (k < half ? early : late) = std::max(k < half ? early : late, p.abs_all[k]);
  }
  const bool no_trend = p.fit.slope >= -0.05;
  const bool no_late_rise = late <= 1.05 * early + std::numeric_limits<double>::min();
  rep.bounded = no_trend && no_late_rise;
  if (rep.bounded) rep.growth_order = 0.0;
  return rep;
}

EquivalenceReport nets_equivalent(const NumberNet& a, const NumberNet& b, int m_test) {
  if (!(a.grid() == b.grid())) throw Error(ErrorCode::GridMismatch, "nets live on different grids");
  if (m_test < 1) throw Error(ErrorCode::InvalidArgument, "m_test must be positive");
  GrowthOptions opt;
  opt.floor_per_eps.resize(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    opt.floor_per_eps[i] = 4.0 * DBL_EPSILON * std::max(std::abs(a[i]), std::abs(b[i]));
  }
  std::vector<int> orders;
  for (int m = 0; m <= m_test; ++m) orders.push_back(m);
  EquivalenceReport rep;
  rep.difference = classify_growth(abs_difference(a, b), orders, opt);
  rep.equivalent = rep.difference.negligible_to(m_test);
  return rep;
}

std::vector<double> default_tolerance_schedule() { return {1e-1, 1e-2, 1e-3}; }

NearStandardResult near_standard_limit(const PointNet& p, std::span<const double> tol_schedule) {
  NearStandardResult res;
  const auto active = p.grid().active_indices();
  if (active.empty()) return res;

  const auto last = p[active.back()];
  res.standard = std::all_of(active.begin(), active.end(), [&](std::size_t i) {
    return sup_distance(p[i], last) == 0.0;
  });
  if (res.standard) {
    res.limit.emplace(last.begin(), last.end());
    return res;
  }

  // Each tolerance must be met by a tail of at least three samples; tails
  // shrink as the tolerances decrease.
  std::size_t start = 0;
  for (double tol : tol_schedule) {
    std::size_t tail = active.size();
    while (tail > 0 && sup_distance(p[active[tail - 1]], last) <= tol) --tail;
    if (active.size() - tail < 3 || tail < start) return res;
    start = tail;
  }
  res.limit.emplace(last.begin(), last.end());
  return res;
}

}  // namespace colombeau
