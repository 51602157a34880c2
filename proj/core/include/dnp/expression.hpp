#pragma once

#include <memory>
#include <string>

namespace dnp {

struct ExprVars {
  double x = 0.0;
  double y = 0.0;
  double t = 0.0;
  double s = 0.0;
};

namespace detail {
struct ExprNode;
}

/// Scalar expression over x, y, t, s. Grammar: + - * / ^ (right associative), unary minus,
/// numbers, pi, e, and the functions exp log sin cos tan sqrt abs min max pow,
/// ind(a, b, z) (1 when a < z < b, else 0) and if(c, a, b) (a when c > 0, else b).
/// Evaluation throws DomainError on log of a nonpositive number, sqrt of a negative one,
/// division by zero or any non-finite intermediate.
class Expression {
 public:
  Expression() = default;
  static Expression parse(const std::string& text);  // throws ParameterError with the offending position

  double operator()(const ExprVars& v) const;
  const std::string& text() const { return text_; }
  bool empty() const { return !root_; }
  bool uses(char var) const;

 private:
  std::string text_;
  std::shared_ptr<const detail::ExprNode> root_;
};

}  // namespace dnp
