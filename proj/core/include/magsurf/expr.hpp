#ifndef MAGSURF_EXPR_HPP
#define MAGSURF_EXPR_HPP

#include <memory>
#include <stdexcept>
#include <string>

#include "magsurf/jet.hpp"

namespace magsurf {

struct ExprError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

namespace detail {
struct ExprNode;
}

// A scalar field of (x, y) given by a small arithmetic expression:
// +, -, *, /, ^, pow, exp, sin, cos, log, variables x and y, numeric
// literals. Evaluation carries a full second-order jet, so first and
// second derivatives are analytic.
class Expr {
 public:
  Expr() = default;
  static Expr parse(const std::string& text);

  bool empty() const { return root_ == nullptr; }
  const std::string& text() const { return text_; }

  Jet2 eval(double x, double y) const;
  double value(double x, double y) const { return eval(x, y).v; }

 private:
  std::shared_ptr<const detail::ExprNode> root_;
  std::string text_;
};

}  // namespace magsurf

#endif
