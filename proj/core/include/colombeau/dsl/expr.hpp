#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "colombeau/errors.hpp"

namespace colombeau::dsl {

enum class Op {
  Const,
  Var,
  Eps,
  LogEps,  // log(1/eps)
  Add,
  Sub,
  Mul,
  Div,
  Neg,
  Pow,  // integer exponent in Node::index
  Exp,
  Log,
  Sin,
  Cos,
  Atan,
  Sqrt,
  AbsSmooth,  // sqrt(u^2 + tau^2), args (u, tau)
  Heaviside,  // R(u/eps), R the antiderivative of the bump
  Mollifier,  // eps^-(k+1) rho^(k)(u/eps), k in Node::index
};

struct Node;
using Expr = std::shared_ptr<const Node>;

struct Node {
  Op op = Op::Const;
  double value = 0.0;
  int index = 0;
  std::vector<Expr> args;
  SourceSpan span;
};

/// Ordered variable names; index in the list is the input slot.
class Signature {
 public:
  Signature() = default;
  explicit Signature(std::vector<std::string> names, std::map<std::string, std::size_t> aliases = {});

  /// t, x1..xn, p1..pl; "x" and "p" alias the single component when n or l is 1.
  static Signature ode(std::size_t n, std::size_t l = 0);
  /// x1..xn, y1..ym with the same aliasing.
  static Signature frobenius(std::size_t n, std::size_t m);
  /// No variables: expressions in eps only.
  static Signature eps_only() { return Signature(); }

  std::size_t size() const noexcept { return names_.size(); }
  const std::vector<std::string>& names() const noexcept { return names_; }
  const std::string& name(std::size_t i) const { return names_.at(i); }
  std::optional<std::size_t> lookup(const std::string& name) const;

 private:
  std::vector<std::string> names_;
  std::map<std::string, std::size_t> aliases_;
};

/// Named sub-expressions substituted at parse time, e.g. g = "1/eps".
using Definitions = std::map<std::string, Expr>;

// Simplifying constructors.
Expr constant(double v);
Expr variable(std::size_t i);
Expr eps();
Expr log_eps();
Expr add(Expr a, Expr b);
Expr sub(Expr a, Expr b);
Expr mul(Expr a, Expr b);
Expr div(Expr a, Expr b);
Expr neg(Expr a);
Expr pow(Expr a, int k);
Expr unary(Op op, Expr a);
Expr abs_smooth(Expr u, Expr tau);
Expr heaviside(Expr u);
Expr mollifier(Expr u, int k = 0);

/// Unsimplified node, used by the parser so printing round-trips.
Expr raw(Op op, std::vector<Expr> args, double value = 0.0, int index = 0, SourceSpan span = {});

bool is_const(const Expr& e, double v);
bool is_const(const Expr& e);

/// Structural equality ignoring source spans.
bool equal(const Expr& a, const Expr& b);

/// Sentinel for differentiation with respect to eps.
inline constexpr std::size_t kEpsVar = static_cast<std::size_t>(-1);

/// Symbolic partial derivative with respect to variable slot `var` (or eps).
Expr differentiate(const Expr& e, std::size_t var);

/// Re-parseable text. Variables print with the signature's names.
std::string print(const Expr& e, const Signature& sig);

/// Largest variable slot used plus one (0 if none).
std::size_t arity(const Expr& e);
bool depends_on_eps(const Expr& e);

/// Every Heaviside/Mollifier argument in the tree.
void collect_features(const Expr& e, std::vector<Expr>& out);

/// Replace variable i by subs[i] (null keeps the variable).
Expr substitute(const Expr& e, const std::vector<Expr>& subs);

Expr parse(const std::string& src, const Signature& sig, const Definitions& defs = {});

}  // namespace colombeau::dsl
