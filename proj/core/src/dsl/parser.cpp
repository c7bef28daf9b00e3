#include <cctype>
#include <cmath>
#include <cstdlib>
#include <numbers>

#include "colombeau/dsl/expr.hpp"

namespace colombeau::dsl {

namespace {

enum class Tok { Number, Ident, Plus, Minus, Star, Slash, Caret, LParen, RParen, Comma, End };

struct Token {
  Tok kind;
  std::string text;
  double number = 0.0;
  SourceSpan span;
};

std::string describe(const Token& t) {
  if (t.kind == Tok::End) return "end of input";
  return "'" + t.text + "'";
}

class Lexer {
 public:
  explicit Lexer(const std::string& src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (true) {
      skip_space();
      Token t;
      t.span = {line_, col_, 1};
      if (pos_ >= src_.size()) {
        t.kind = Tok::End;
        t.span.length = 0;
        out.push_back(t);
        return out;
      }
      const char c = src_[pos_];
      if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
        lex_number(t);
      } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        const std::size_t start = pos_;
        while (pos_ < src_.size() &&
               (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) {
          advance();
        }
        t.kind = Tok::Ident;
        t.text = src_.substr(start, pos_ - start);
        t.span.length = t.text.size();
      } else {
        t.text = std::string(1, c);
        switch (c) {
          case '+': t.kind = Tok::Plus; break;
          case '-': t.kind = Tok::Minus; break;
          case '*': t.kind = Tok::Star; break;
          case '/': t.kind = Tok::Slash; break;
          case '^': t.kind = Tok::Caret; break;
          case '(': t.kind = Tok::LParen; break;
          case ')': t.kind = Tok::RParen; break;
          case ',': t.kind = Tok::Comma; break;
          default:
            throw ParseError(ErrorCode::SyntaxError, t.span,
                             "unexpected character '" + t.text + "'");
        }
        advance();
      }
      out.push_back(t);
    }
  }

 private:
  void advance() {
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }
  void skip_space() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) advance();
  }
  void lex_number(Token& t) {
    const std::size_t start = pos_;
    auto digits = [&] {
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) advance();
    };
    digits();
    if (pos_ < src_.size() && src_[pos_] == '.') {
      advance();
      digits();
    }
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      std::size_t look = pos_ + 1;
      if (look < src_.size() && (src_[look] == '+' || src_[look] == '-')) ++look;
      if (look < src_.size() && std::isdigit(static_cast<unsigned char>(src_[look]))) {
        while (pos_ < look) advance();
        digits();
      }
    }
    t.kind = Tok::Number;
    t.text = src_.substr(start, pos_ - start);
    t.span.length = t.text.size();
    if (t.text == ".") throw ParseError(ErrorCode::SyntaxError, t.span, "malformed number '.'");
    t.number = std::strtod(t.text.c_str(), nullptr);
  }

  const std::string& src_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t col_ = 1;
};

struct FunctionInfo {
  Op op;
  std::size_t min_args;
  std::size_t max_args;
};

std::optional<FunctionInfo> lookup_function(const std::string& name) {
  static const std::map<std::string, FunctionInfo> table = {
      {"exp", {Op::Exp, 1, 1}},
      {"log", {Op::Log, 1, 1}},
      {"sin", {Op::Sin, 1, 1}},
      {"cos", {Op::Cos, 1, 1}},
      {"atan", {Op::Atan, 1, 1}},
      {"sqrt", {Op::Sqrt, 1, 1}},
      {"abs_smooth", {Op::AbsSmooth, 1, 2}},
      {"HeavisideMollified", {Op::Heaviside, 1, 1}},
      {"H", {Op::Heaviside, 1, 1}},
      {"MollifierScaled", {Op::Mollifier, 1, 2}},
      {"M", {Op::Mollifier, 1, 2}},
      {"LogEps", {Op::LogEps, 0, 0}},
      {"logeps", {Op::LogEps, 0, 0}},
  };
  if (auto it = table.find(name); it != table.end()) return it->second;
  return std::nullopt;
}

class Parser {
 public:
  Parser(std::vector<Token> toks, const Signature& sig, const Definitions& defs)
      : toks_(std::move(toks)), sig_(sig), defs_(defs) {}

  Expr run() {
    Expr e = expression();
    if (peek().kind != Tok::End) {
      throw ParseError(ErrorCode::SyntaxError, peek().span,
                       "unexpected " + describe(peek()) + " after expression");
    }
    return e;
  }

 private:
  const Token& peek() const { return toks_[pos_]; }
  const Token& take() { return toks_[pos_++]; }
  bool accept(Tok k) {
    if (peek().kind != k) return false;
    ++pos_;
    return true;
  }
  const Token& expect(Tok k, const char* what) {
    if (peek().kind != k) {
      throw ParseError(ErrorCode::SyntaxError, peek().span,
                       std::string("expected ") + what + ", found " + describe(peek()));
    }
    return take();
  }

  Expr expression() {
    Expr lhs = term();
    while (peek().kind == Tok::Plus || peek().kind == Tok::Minus) {
      const Token op = take();
      Expr rhs = term();
      lhs = raw(op.kind == Tok::Plus ? Op::Add : Op::Sub, {lhs, rhs}, 0.0, 0, op.span);
    }
    return lhs;
  }

  Expr term() {
    Expr lhs = unary_expr();
    while (peek().kind == Tok::Star || peek().kind == Tok::Slash) {
      const Token op = take();
      Expr rhs = unary_expr();
      lhs = raw(op.kind == Tok::Star ? Op::Mul : Op::Div, {lhs, rhs}, 0.0, 0, op.span);
    }
    return lhs;
  }

  Expr unary_expr() {
    if (peek().kind == Tok::Minus) {
      const Token op = take();
      Expr a = unary_expr();
      if (a->op == Op::Const) return raw(Op::Const, {}, -a->value, 0, op.span);
      return raw(Op::Neg, {a}, 0.0, 0, op.span);
    }
    if (accept(Tok::Plus)) return unary_expr();
    return power();
  }

  Expr power() {
    Expr base = primary();
    while (peek().kind == Tok::Caret) {
      const Token op = take();
      int sign = 1;
      bool paren = accept(Tok::LParen);
      if (accept(Tok::Minus)) {
        sign = -1;
      } else {
        accept(Tok::Plus);
      }
      const Token& k = peek();
      if (k.kind != Tok::Number || k.number != std::floor(k.number) ||
          k.text.find_first_of(".eE") != std::string::npos || std::abs(k.number) > 1e6) {
        throw ParseError(ErrorCode::SyntaxError, k.span,
                         "exponent must be an integer literal, found " + describe(k));
      }
      take();
      if (paren) expect(Tok::RParen, "')'");
      base = raw(Op::Pow, {base}, 0.0, sign * static_cast<int>(k.number), op.span);
    }
    return base;
  }

  Expr primary() {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::Number: {
        take();
        return raw(Op::Const, {}, t.number, 0, t.span);
      }
      case Tok::LParen: {
        take();
        Expr e = expression();
        expect(Tok::RParen, "')'");
        return e;
      }
      case Tok::Ident: return identifier();
      default:
        throw ParseError(ErrorCode::SyntaxError, t.span, "expected an operand, found " + describe(t));
    }
  }

  Expr identifier() {
    const Token id = take();
    if (peek().kind == Tok::LParen) return call(id);
    if (id.text == "eps") return raw(Op::Eps, {}, 0.0, 0, id.span);
    if (id.text == "pi") return raw(Op::Const, {}, std::numbers::pi, 0, id.span);
    if (id.text == "LogEps" || id.text == "logeps") return raw(Op::LogEps, {}, 0.0, 0, id.span);
    if (auto v = sig_.lookup(id.text)) return raw(Op::Var, {}, 0.0, static_cast<int>(*v), id.span);
    if (auto it = defs_.find(id.text); it != defs_.end()) return it->second;
    if (lookup_function(id.text)) {
      throw ParseError(ErrorCode::ArityError, id.span, "function '" + id.text + "' needs arguments");
    }
    throw ParseError(ErrorCode::UnknownIdentifier, id.span, "unknown identifier '" + id.text + "'");
  }

  Expr call(const Token& id) {
    const auto info = lookup_function(id.text);
    if (!info) {
      throw ParseError(ErrorCode::UnknownIdentifier, id.span, "unknown function '" + id.text + "'");
    }
    expect(Tok::LParen, "'('");
    std::vector<Expr> args;
    std::vector<Token> first_tokens;
    if (peek().kind != Tok::RParen) {
      do {
        first_tokens.push_back(peek());
        args.push_back(expression());
      } while (accept(Tok::Comma));
    }
    expect(Tok::RParen, "')'");
    if (args.size() < info->min_args || args.size() > info->max_args) {
      throw ParseError(ErrorCode::ArityError, id.span,
                       "function '" + id.text + "' takes " + std::to_string(info->min_args) +
                           (info->max_args != info->min_args
                                ? " to " + std::to_string(info->max_args)
                                : std::string()) +
                           " argument(s), got " + std::to_string(args.size()));
    }
    switch (info->op) {
      case Op::LogEps: return raw(Op::LogEps, {}, 0.0, 0, id.span);
      case Op::AbsSmooth:
        if (args.size() == 1) args.push_back(raw(Op::Eps, {}, 0.0, 0, id.span));
        return raw(Op::AbsSmooth, std::move(args), 0.0, 0, id.span);
      case Op::Mollifier: {
        int k = 0;
        if (args.size() == 2) {
          const Expr& order = args[1];
          if (order->op != Op::Const || order->value != std::floor(order->value) ||
              order->value < 0 || order->value > 64) {
            throw ParseError(ErrorCode::SyntaxError, first_tokens[1].span,
                             "derivative order must be a non-negative integer literal");
          }
          k = static_cast<int>(order->value);
        }
        return raw(Op::Mollifier, {args[0]}, 0.0, k, id.span);
      }
      default:
        return raw(info->op, std::move(args), 0.0, 0, id.span);
    }
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  const Signature& sig_;
  const Definitions& defs_;
};

}  // namespace

Expr parse(const std::string& src, const Signature& sig, const Definitions& defs) {
  if (src.find_first_not_of(" \t\r\n") == std::string::npos) {
    throw ParseError(ErrorCode::SyntaxError, {1, 1, 0}, "empty expression");
  }
  Lexer lex(src);
  Parser p(lex.run(), sig, defs);
  return p.run();
}

}  // namespace colombeau::dsl
