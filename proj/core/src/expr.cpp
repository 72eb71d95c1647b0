#include "magsurf/expr.hpp"

#include <cctype>
#include <cstdlib>
#include <vector>

namespace magsurf {
namespace detail {

enum class Op { kConst, kVarX, kVarY, kAdd, kSub, kMul, kDiv, kNeg, kPow,
                kExp, kSin, kCos, kLog };

struct ExprNode {
  Op op;
  double value = 0.0;
  std::shared_ptr<const ExprNode> a, b;
};

using NodePtr = std::shared_ptr<const ExprNode>;

namespace {

NodePtr make(Op op, NodePtr a = nullptr, NodePtr b = nullptr) {
  auto n = std::make_shared<ExprNode>();
  n->op = op;
  n->a = std::move(a);
  n->b = std::move(b);
  return n;
}

NodePtr make_const(double v) {
  auto n = std::make_shared<ExprNode>();
  n->op = Op::kConst;
  n->value = v;
  return n;
}

struct Parser {
  const std::string& s;
  size_t pos = 0;

  explicit Parser(const std::string& text) : s(text) {}

  void skip_ws() {
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
  }

  bool eat(char c) {
    skip_ws();
    if (pos < s.size() && s[pos] == c) {
      ++pos;
      return true;
    }
    return false;
  }

  [[noreturn]] void fail(const std::string& msg) {
    throw ExprError("expression parse error at position " +
                    std::to_string(pos) + ": " + msg + " in \"" + s + "\"");
  }

  NodePtr parse_expr() {
    NodePtr left = parse_term();
    for (;;) {
      if (eat('+')) left = make(Op::kAdd, left, parse_term());
      else if (eat('-')) left = make(Op::kSub, left, parse_term());
      else return left;
    }
  }

  NodePtr parse_term() {
    NodePtr left = parse_factor();
    for (;;) {
      if (eat('*')) left = make(Op::kMul, left, parse_factor());
      else if (eat('/')) left = make(Op::kDiv, left, parse_factor());
      else return left;
    }
  }

  NodePtr parse_factor() {
    NodePtr base = parse_unary();
    if (eat('^')) return make(Op::kPow, base, parse_factor());  // right assoc
    return base;
  }

  NodePtr parse_unary() {
    if (eat('-')) return make(Op::kNeg, parse_unary());
    eat('+');
    return parse_primary();
  }

  std::string parse_ident() {
    skip_ws();
    size_t start = pos;
    while (pos < s.size() &&
           (std::isalnum(static_cast<unsigned char>(s[pos])) || s[pos] == '_'))
      ++pos;
    return s.substr(start, pos - start);
  }

  NodePtr parse_primary() {
    skip_ws();
    if (pos >= s.size()) fail("unexpected end of input");
    char c = s[pos];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      char* end = nullptr;
      double v = std::strtod(s.c_str() + pos, &end);
      if (end == s.c_str() + pos) fail("bad number");
      pos = end - s.c_str();
      return make_const(v);
    }
    if (c == '(') {
      ++pos;
      NodePtr inner = parse_expr();
      if (!eat(')')) fail("expected ')'");
      return inner;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::string id = parse_ident();
      if (id == "x") return make(Op::kVarX);
      if (id == "y") return make(Op::kVarY);
      if (id == "pi") return make_const(3.14159265358979323846);
      if (!eat('(')) fail("expected '(' after function name '" + id + "'");
      NodePtr arg = parse_expr();
      if (id == "pow") {
        if (!eat(',')) fail("pow expects two arguments");
        NodePtr arg2 = parse_expr();
        if (!eat(')')) fail("expected ')'");
        return make(Op::kPow, arg, arg2);
      }
      if (!eat(')')) fail("expected ')'");
      if (id == "exp") return make(Op::kExp, arg);
      if (id == "sin") return make(Op::kSin, arg);
      if (id == "cos") return make(Op::kCos, arg);
      if (id == "log") return make(Op::kLog, arg);
      fail("unknown function '" + id + "'");
    }
    fail(std::string("unexpected character '") + c + "'");
  }
};

Jet2 eval_node(const ExprNode& n, double x, double y) {
  switch (n.op) {
    case Op::kConst: return Jet2::constant(n.value);
    case Op::kVarX: return Jet2::var_x(x);
    case Op::kVarY: return Jet2::var_y(y);
    case Op::kAdd: return eval_node(*n.a, x, y) + eval_node(*n.b, x, y);
    case Op::kSub: return eval_node(*n.a, x, y) - eval_node(*n.b, x, y);
    case Op::kMul: return eval_node(*n.a, x, y) * eval_node(*n.b, x, y);
    case Op::kDiv: return eval_node(*n.a, x, y) / eval_node(*n.b, x, y);
    case Op::kNeg: return -eval_node(*n.a, x, y);
    case Op::kPow: return pow(eval_node(*n.a, x, y), eval_node(*n.b, x, y));
    case Op::kExp: return exp(eval_node(*n.a, x, y));
    case Op::kSin: return sin(eval_node(*n.a, x, y));
    case Op::kCos: return cos(eval_node(*n.a, x, y));
    case Op::kLog: return log(eval_node(*n.a, x, y));
  }
  throw ExprError("corrupt expression node");
}

}  // namespace
}  // namespace detail

Expr Expr::parse(const std::string& text) {
  detail::Parser p(text);
  Expr e;
  e.root_ = p.parse_expr();
  p.skip_ws();
  if (p.pos != text.size()) p.fail("trailing input");
  e.text_ = text;
  return e;
}

Jet2 Expr::eval(double x, double y) const {
  if (!root_) throw ExprError("evaluating empty expression");
  return detail::eval_node(*root_, x, y);
}

}  // namespace magsurf
