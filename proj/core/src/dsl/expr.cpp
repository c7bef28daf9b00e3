#include "colombeau/dsl/expr.hpp"

#include <cmath>
#include <cstdio>

namespace colombeau::dsl {

Signature::Signature(std::vector<std::string> names, std::map<std::string, std::size_t> aliases)
    : names_(std::move(names)), aliases_(std::move(aliases)) {}

Signature Signature::ode(std::size_t n, std::size_t l) {
  std::vector<std::string> names{"t"};
  std::map<std::string, std::size_t> aliases;
  for (std::size_t i = 1; i <= n; ++i) names.push_back("x" + std::to_string(i));
  for (std::size_t i = 1; i <= l; ++i) names.push_back("p" + std::to_string(i));
  if (n == 1) aliases["x"] = 1;
  if (l == 1) aliases["p"] = 1 + n;
  return Signature(std::move(names), std::move(aliases));
}

Signature Signature::frobenius(std::size_t n, std::size_t m) {
  std::vector<std::string> names;
  std::map<std::string, std::size_t> aliases;
  for (std::size_t i = 1; i <= n; ++i) names.push_back("x" + std::to_string(i));
  for (std::size_t i = 1; i <= m; ++i) names.push_back("y" + std::to_string(i));
  if (n == 1) aliases["x"] = 0;
  if (m == 1) aliases["y"] = n;
  return Signature(std::move(names), std::move(aliases));
}

std::optional<std::size_t> Signature::lookup(const std::string& name) const {
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (names_[i] == name) return i;
  }
  if (auto it = aliases_.find(name); it != aliases_.end()) return it->second;
  return std::nullopt;
}

Expr raw(Op op, std::vector<Expr> args, double value, int index, SourceSpan span) {
  auto n = std::make_shared<Node>();
  n->op = op;
  n->args = std::move(args);
  n->value = value;
  n->index = index;
  n->span = span;
  return n;
}

bool is_const(const Expr& e) { return e->op == Op::Const; }
bool is_const(const Expr& e, double v) { return e->op == Op::Const && e->value == v; }

Expr constant(double v) { return raw(Op::Const, {}, v); }
Expr variable(std::size_t i) { return raw(Op::Var, {}, 0.0, static_cast<int>(i)); }
Expr eps() { return raw(Op::Eps, {}); }
Expr log_eps() { return raw(Op::LogEps, {}); }

Expr add(Expr a, Expr b) {
  if (is_const(a, 0.0)) return b;
  if (is_const(b, 0.0)) return a;
  if (is_const(a) && is_const(b)) return constant(a->value + b->value);
  if (b->op == Op::Neg) return sub(a, b->args[0]);
  return raw(Op::Add, {a, b});
}

Expr sub(Expr a, Expr b) {
  if (is_const(b, 0.0)) return a;
  if (is_const(a, 0.0)) return neg(b);
  if (is_const(a) && is_const(b)) return constant(a->value - b->value);
  if (equal(a, b)) return constant(0.0);
  return raw(Op::Sub, {a, b});
}

Expr mul(Expr a, Expr b) {
  if (is_const(a, 0.0) || is_const(b, 0.0)) return constant(0.0);
  if (is_const(a, 1.0)) return b;
  if (is_const(b, 1.0)) return a;
  if (is_const(a, -1.0)) return neg(b);
  if (is_const(b, -1.0)) return neg(a);
  if (is_const(a) && is_const(b)) return constant(a->value * b->value);
  if (is_const(b)) std::swap(a, b);
  return raw(Op::Mul, {a, b});
}

Expr div(Expr a, Expr b) {
  if (is_const(a, 0.0) && !is_const(b, 0.0)) return constant(0.0);
  if (is_const(b, 1.0)) return a;
  if (is_const(a) && is_const(b) && b->value != 0.0) return constant(a->value / b->value);
  return raw(Op::Div, {a, b});
}

Expr neg(Expr a) {
  if (is_const(a)) return constant(-a->value);
  if (a->op == Op::Neg) return a->args[0];
  return raw(Op::Neg, {a});
}

Expr pow(Expr a, int k) {
  if (k == 0) return constant(1.0);
  if (k == 1) return a;
  if (is_const(a) && (k > 0 || a->value != 0.0)) return constant(std::pow(a->value, k));
  return raw(Op::Pow, {a}, 0.0, k);
}

namespace {
double apply(Op op, double v) {
  switch (op) {
    case Op::Exp: return std::exp(v);
    case Op::Log: return std::log(v);
    case Op::Sin: return std::sin(v);
    case Op::Cos: return std::cos(v);
    case Op::Atan: return std::atan(v);
    case Op::Sqrt: return std::sqrt(v);
    default: return NAN;
  }
}
}  // namespace

Expr unary(Op op, Expr a) {
  if (is_const(a)) {
    const double v = apply(op, a->value);
    if (std::isfinite(v)) return constant(v);
  }
  return raw(op, {a});
}

Expr abs_smooth(Expr u, Expr tau) { return raw(Op::AbsSmooth, {u, tau}); }
Expr heaviside(Expr u) { return raw(Op::Heaviside, {u}); }
Expr mollifier(Expr u, int k) { return raw(Op::Mollifier, {u}, 0.0, k); }

bool equal(const Expr& a, const Expr& b) {
  if (a.get() == b.get()) return true;
  if (a->op != b->op || a->index != b->index || a->args.size() != b->args.size()) return false;
  if (a->op == Op::Const && !(a->value == b->value)) return false;
  for (std::size_t i = 0; i < a->args.size(); ++i) {
    if (!equal(a->args[i], b->args[i])) return false;
  }
  return true;
}

Expr differentiate(const Expr& e, std::size_t var) {
  const bool wrt_eps = var == kEpsVar;
  auto d = [&](const Expr& x) { return differentiate(x, var); };
  const auto& A = e->args;
  switch (e->op) {
    case Op::Const: return constant(0.0);
    case Op::Var: return constant(!wrt_eps && static_cast<std::size_t>(e->index) == var ? 1.0 : 0.0);
    case Op::Eps: return constant(wrt_eps ? 1.0 : 0.0);
    case Op::LogEps: return wrt_eps ? neg(div(constant(1.0), eps())) : constant(0.0);
    case Op::Add: return add(d(A[0]), d(A[1]));
    case Op::Sub: return sub(d(A[0]), d(A[1]));
    case Op::Mul: return add(mul(d(A[0]), A[1]), mul(A[0], d(A[1])));
    case Op::Div: {
      const Expr da = d(A[0]), db = d(A[1]);
      if (is_const(db, 0.0)) return div(da, A[1]);
      return div(sub(mul(da, A[1]), mul(A[0], db)), pow(A[1], 2));
    }
    case Op::Neg: return neg(d(A[0]));
    case Op::Pow: {
      const int k = e->index;
      return mul(mul(constant(k), pow(A[0], k - 1)), d(A[0]));
    }
    case Op::Exp: return mul(e, d(A[0]));
    case Op::Log: return div(d(A[0]), A[0]);
    case Op::Sin: return mul(unary(Op::Cos, A[0]), d(A[0]));
    case Op::Cos: return neg(mul(unary(Op::Sin, A[0]), d(A[0])));
    case Op::Atan: return div(d(A[0]), add(constant(1.0), pow(A[0], 2)));
    case Op::Sqrt: return div(d(A[0]), mul(constant(2.0), e));
    case Op::AbsSmooth:
      return div(add(mul(A[0], d(A[0])), mul(A[1], d(A[1]))), e);
    case Op::Heaviside: {
      // total derivative: M_0(u) u' plus, for eps, the explicit dependence
      Expr du = d(A[0]);
      if (wrt_eps) du = sub(du, div(A[0], eps()));
      return mul(mollifier(A[0], 0), du);
    }
    case Op::Mollifier: {
      const int k = e->index;
      Expr du = d(A[0]);
      if (!wrt_eps) return mul(mollifier(A[0], k + 1), du);
      du = sub(du, div(A[0], eps()));
      return add(neg(mul(div(constant(k + 1.0), eps()), e)), mul(mollifier(A[0], k + 1), du));
    }
  }
  return constant(0.0);
}

namespace {

std::string number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", std::abs(v));
  if (std::signbit(v) && v != 0.0) return std::string("(-") + buf + ")";
  return buf;
}

std::string var_name(int i, const Signature& sig) {
  if (i >= 0 && static_cast<std::size_t>(i) < sig.size()) return sig.name(i);
  return "v" + std::to_string(i);
}

}  // namespace

std::string print(const Expr& e, const Signature& sig) {
  auto p = [&](const Expr& x) { return print(x, sig); };
  const auto& A = e->args;
  switch (e->op) {
    case Op::Const: return number(e->value);
    case Op::Var: return var_name(e->index, sig);
    case Op::Eps: return "eps";
    case Op::LogEps: return "logeps";
    case Op::Add: return "(" + p(A[0]) + " + " + p(A[1]) + ")";
    case Op::Sub: return "(" + p(A[0]) + " - " + p(A[1]) + ")";
    case Op::Mul: return "(" + p(A[0]) + " * " + p(A[1]) + ")";
    case Op::Div: return "(" + p(A[0]) + " / " + p(A[1]) + ")";
    case Op::Neg: return "(-" + p(A[0]) + ")";
    case Op::Pow: return "(" + p(A[0]) + "^" + std::to_string(e->index) + ")";
    case Op::Exp: return "exp(" + p(A[0]) + ")";
    case Op::Log: return "log(" + p(A[0]) + ")";
    case Op::Sin: return "sin(" + p(A[0]) + ")";
    case Op::Cos: return "cos(" + p(A[0]) + ")";
    case Op::Atan: return "atan(" + p(A[0]) + ")";
    case Op::Sqrt: return "sqrt(" + p(A[0]) + ")";
    case Op::AbsSmooth: return "abs_smooth(" + p(A[0]) + ", " + p(A[1]) + ")";
    case Op::Heaviside: return "HeavisideMollified(" + p(A[0]) + ")";
    case Op::Mollifier:
      if (e->index == 0) return "MollifierScaled(" + p(A[0]) + ")";
      return "MollifierScaled(" + p(A[0]) + ", " + std::to_string(e->index) + ")";
  }
  return "?";
}

std::size_t arity(const Expr& e) {
  std::size_t a = e->op == Op::Var ? static_cast<std::size_t>(e->index) + 1 : 0;
  for (const auto& c : e->args) a = std::max(a, arity(c));
  return a;
}

bool depends_on_eps(const Expr& e) {
  switch (e->op) {
    case Op::Eps:
    case Op::LogEps:
    case Op::Heaviside:
    case Op::Mollifier:
      return true;
    default:
      break;
  }
  for (const auto& c : e->args) {
    if (depends_on_eps(c)) return true;
  }
  return false;
}

void collect_features(const Expr& e, std::vector<Expr>& out) {
  if (e->op == Op::Heaviside || e->op == Op::Mollifier) out.push_back(e->args[0]);
  for (const auto& c : e->args) collect_features(c, out);
}

Expr substitute(const Expr& e, const std::vector<Expr>& subs) {
  if (e->op == Op::Var) {
    const auto i = static_cast<std::size_t>(e->index);
    if (i < subs.size() && subs[i]) return subs[i];
    return e;
  }
  if (e->args.empty()) return e;
  std::vector<Expr> args;
  bool changed = false;
  for (const auto& c : e->args) {
    args.push_back(substitute(c, subs));
    changed = changed || args.back() != c;
  }
  if (!changed) return e;
  return raw(e->op, std::move(args), e->value, e->index, e->span);
}

}  // namespace colombeau::dsl
