#include "colombeau/dsl/program.hpp"

#include <array>
#include <cmath>

#include "colombeau/dsl/mollifier.hpp"

namespace colombeau::dsl {

Program::Program(const Expr& e) { emit(e, 1); }

void Program::emit(const Expr& e, std::size_t depth) {
  max_stack_ = std::max(max_stack_, depth);
  for (std::size_t i = 0; i < e->args.size(); ++i) emit(e->args[i], depth + i);
  code_.push_back({e->op, e->index, e->value});
}

namespace {

double ipow(double x, int k) {
  if (k < 0) return 1.0 / ipow(x, -k);
  double r = 1.0;
  while (k) {
    if (k & 1) r *= x;
    x *= x;
    k >>= 1;
  }
  return r;
}

}  // namespace

double Program::eval(std::span<const double> vars, double eps) const {
  std::array<double, 64> small{};
  std::vector<double> big;
  double* st = small.data();
  if (max_stack_ > small.size()) {
    big.resize(max_stack_);
    st = big.data();
  }
  std::size_t sp = 0;
  for (const Instr& in : code_) {
    switch (in.op) {
      case Op::Const: st[sp++] = in.value; break;
      case Op::Var: st[sp++] = vars[static_cast<std::size_t>(in.index)]; break;
      case Op::Eps: st[sp++] = eps; break;
      case Op::LogEps: st[sp++] = -std::log(eps); break;
      case Op::Add: --sp; st[sp - 1] += st[sp]; break;
      case Op::Sub: --sp; st[sp - 1] -= st[sp]; break;
      case Op::Mul: --sp; st[sp - 1] *= st[sp]; break;
      case Op::Div: --sp; st[sp - 1] /= st[sp]; break;
      case Op::Neg: st[sp - 1] = -st[sp - 1]; break;
      case Op::Pow: st[sp - 1] = ipow(st[sp - 1], in.index); break;
      case Op::Exp: st[sp - 1] = std::exp(st[sp - 1]); break;
      case Op::Log: st[sp - 1] = st[sp - 1] > 0.0 ? std::log(st[sp - 1]) : NAN; break;
      case Op::Sin: st[sp - 1] = std::sin(st[sp - 1]); break;
      case Op::Cos: st[sp - 1] = std::cos(st[sp - 1]); break;
      case Op::Atan: st[sp - 1] = std::atan(st[sp - 1]); break;
      case Op::Sqrt: st[sp - 1] = st[sp - 1] >= 0.0 ? std::sqrt(st[sp - 1]) : NAN; break;
      case Op::AbsSmooth:
        --sp;
        st[sp - 1] = std::sqrt(st[sp - 1] * st[sp - 1] + st[sp] * st[sp]);
        break;
      case Op::Heaviside: st[sp - 1] = heaviside_mollified(st[sp - 1], eps); break;
      case Op::Mollifier: st[sp - 1] = mollifier_scaled(st[sp - 1], eps, in.index); break;
    }
  }
  return st[0];
}

}  // namespace colombeau::dsl
