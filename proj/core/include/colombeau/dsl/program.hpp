#pragma once

#include <span>
#include <vector>

#include "colombeau/dsl/expr.hpp"

namespace colombeau::dsl {

/// Postfix bytecode for fast repeated evaluation of an expression.
class Program {
 public:
  Program() = default;
  explicit Program(const Expr& e);

  /// May return a non-finite value (log of a negative number, overflow).
  double eval(std::span<const double> vars, double eps) const;

 private:
  struct Instr {
    Op op;
    int index;
    double value;
  };
  void emit(const Expr& e, std::size_t depth);
  std::vector<Instr> code_;
  std::size_t max_stack_ = 0;
};

}  // namespace colombeau::dsl
