#include "colombeau/dsl/interval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "colombeau/dsl/mollifier.hpp"
#include "colombeau/rhs_dsl.hpp"

namespace colombeau::dsl {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr Interval kWhole{-kInf, kInf};

Interval widen(Interval a) {
  if (std::isnan(a.lo) || std::isnan(a.hi)) return kWhole;
  // one ulp-ish outward step per operation
  const double s = 4 * std::numeric_limits<double>::epsilon();
  return {a.lo - s * std::abs(a.lo), a.hi + s * std::abs(a.hi)};
}

Interval mul(Interval a, Interval b) {
  const double p[] = {a.lo * b.lo, a.lo * b.hi, a.hi * b.lo, a.hi * b.hi};
  for (double v : p) {
    if (std::isnan(v)) return kWhole;  // 0 * inf
  }
  return {*std::min_element(p, p + 4), *std::max_element(p, p + 4)};
}

Interval recip(Interval a) {
  if (a.lo <= 0.0 && a.hi >= 0.0) return kWhole;
  return {1.0 / a.hi, 1.0 / a.lo};
}

Interval ipow(Interval a, int k) {
  if (k == 0) return {1.0, 1.0};
  if (k < 0) return recip(ipow(a, -k));
  const double l = std::pow(a.lo, k), h = std::pow(a.hi, k);
  if (k % 2 == 1) return {l, h};
  if (a.lo <= 0.0 && a.hi >= 0.0) return {0.0, std::max(l, h)};
  return {std::min(l, h), std::max(l, h)};
}

// sin over [lo, hi]
Interval sin_range(Interval a) {
  if (!std::isfinite(a.lo) || !std::isfinite(a.hi) || a.hi - a.lo >= 2 * std::numbers::pi) return {-1.0, 1.0};
  double lo = std::min(std::sin(a.lo), std::sin(a.hi));
  double hi = std::max(std::sin(a.lo), std::sin(a.hi));
  const double two_pi = 2 * std::numbers::pi;
  // peaks at pi/2 + 2k pi, troughs at -pi/2 + 2k pi
  const double kmax = std::ceil((a.lo - std::numbers::pi / 2) / two_pi);
  if (std::numbers::pi / 2 + kmax * two_pi <= a.hi) hi = 1.0;
  const double kmin = std::ceil((a.lo + std::numbers::pi / 2) / two_pi);
  if (-std::numbers::pi / 2 + kmin * two_pi <= a.hi) lo = -1.0;
  return {lo, hi};
}

}  // namespace

Interval eval_interval(const Expr& e, std::span<const Interval> vars, double eps) {
  auto arg = [&](std::size_t i) { return eval_interval(e->args[i], vars, eps); };
  Interval r;
  switch (e->op) {
    case Op::Const: return {e->value, e->value};
    case Op::Var: return vars[static_cast<std::size_t>(e->index)];
    case Op::Eps: return {eps, eps};
    case Op::LogEps: return {-std::log(eps), -std::log(eps)};
    case Op::Add: {
      const Interval a = arg(0), b = arg(1);
      r = {a.lo + b.lo, a.hi + b.hi};
      break;
    }
    case Op::Sub: {
      const Interval a = arg(0), b = arg(1);
      r = {a.lo - b.hi, a.hi - b.lo};
      break;
    }
    case Op::Mul: r = mul(arg(0), arg(1)); break;
    case Op::Div: r = mul(arg(0), recip(arg(1))); break;
    case Op::Neg: {
      const Interval a = arg(0);
      return {-a.hi, -a.lo};
    }
    case Op::Pow: r = ipow(arg(0), e->index); break;
    case Op::Exp: {
      const Interval a = arg(0);
      r = {std::exp(a.lo), std::exp(a.hi)};
      break;
    }
    case Op::Log: {
      const Interval a = arg(0);
      if (!(a.hi > 0.0)) return kWhole;
      r = {a.lo > 0.0 ? std::log(a.lo) : -kInf, std::log(a.hi)};
      break;
    }
    case Op::Sin: r = sin_range(arg(0)); break;
    case Op::Cos: {
      const Interval a = arg(0);
      r = sin_range({a.lo + std::numbers::pi / 2, a.hi + std::numbers::pi / 2});
      break;
    }
    case Op::Atan: {
      const Interval a = arg(0);
      r = {std::atan(a.lo), std::atan(a.hi)};
      break;
    }
    case Op::Sqrt: {
      const Interval a = arg(0);
      if (a.hi < 0.0) return kWhole;
      r = {std::sqrt(std::max(a.lo, 0.0)), std::sqrt(a.hi)};
      break;
    }
    case Op::AbsSmooth: {
      const Interval u = ipow(arg(0), 2), t = ipow(arg(1), 2);
      r = {std::sqrt(u.lo + t.lo), std::sqrt(u.hi + t.hi)};
      break;
    }
    case Op::Heaviside: {
      const Interval a = arg(0);
      const auto& m = Mollifier::instance();
      // the ramp is monotone with values in [0, 1]
      return {std::max(0.0, m.ramp(a.lo / eps) - 1e-15), std::min(1.0, m.ramp(a.hi / eps) + 1e-15)};
    }
    case Op::Mollifier: {
      const Interval a = arg(0);
      if (a.hi <= -eps || a.lo >= eps) return {0.0, 0.0};
      if (e->index == 0) return {0.0, Mollifier::instance().max_value() / eps * (1 + 1e-12)};
      return kWhole;
    }
  }
  return widen(r);
}

}  // namespace colombeau::dsl

namespace colombeau {

std::optional<double> interval_sup_bound(const FunctionNet& f, const Box& K, double eps) {
  const auto* impl = dynamic_cast<const DslNetImpl*>(f.impl().get());
  if (!impl || !K.bounded()) return std::nullopt;
  const std::size_t d = K.dim();
  std::size_t pieces = 4;
  switch (d) {
    case 1: pieces = 4096; break;
    case 2: pieces = 64; break;
    case 3: pieces = 16; break;
    case 4: pieces = 8; break;
    default: break;
  }
  std::vector<std::size_t> counts(d), idx(d, 0);
  for (std::size_t i = 0; i < d; ++i) counts[i] = K.width(i) > 0.0 ? pieces : 1;
  std::vector<dsl::Interval> box(d);
  double bound = 0.0;
  while (true) {
    for (std::size_t i = 0; i < d; ++i) {
      const double w = K.width(i) / double(counts[i]);
      box[i] = {K.lower(i) + w * double(idx[i]), idx[i] + 1 == counts[i] ? K.upper(i) : K.lower(i) + w * double(idx[i] + 1)};
    }
    for (const auto& c : impl->components()) {
      const dsl::Interval r = dsl::eval_interval(c, box, eps);
      const double m = std::max(std::abs(r.lo), std::abs(r.hi));
      if (!std::isfinite(m)) return std::nullopt;
      bound = std::max(bound, m);
    }
    std::size_t k = 0;
    while (k < d && ++idx[k] == counts[k]) idx[k++] = 0;
    if (k == d || d == 0) break;
  }
  return bound;
}

}  // namespace colombeau
