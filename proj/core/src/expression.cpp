#include "dnp/expression.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <vector>

#include "dnp/errors.hpp"

namespace dnp {

namespace detail {

struct ExprNode {
  enum class Op { Num, Var, Neg, Add, Sub, Mul, Div, Pow, Call };
  Op op = Op::Num;
  double value = 0.0;
  char var = 0;
  std::string fn;
  std::vector<std::shared_ptr<const ExprNode>> args;
};

}  // namespace detail

namespace {

using Node = detail::ExprNode;
using NodePtr = std::shared_ptr<const Node>;

struct FnInfo {
  const char* name;
  int arity;
};
constexpr FnInfo kFunctions[] = {{"exp", 1}, {"log", 1}, {"sin", 1}, {"cos", 1}, {"tan", 1}, {"sqrt", 1}, {"abs", 1},
                                 {"min", 2}, {"max", 2}, {"pow", 2}, {"ind", 3}, {"if", 3}};

class Parser {
 public:
  explicit Parser(const std::string& s) : s_(s) {}

  NodePtr parse() {
    NodePtr n = expr();
    skip();
    if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    return n;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw ParameterError("expression \"" + s_ + "\" at position " + std::to_string(pos_) + ": " + what);
  }
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool eat(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  static NodePtr make(Node::Op op, std::vector<NodePtr> args) {
    auto n = std::make_shared<Node>();
    n->op = op;
    n->args = std::move(args);
    return n;
  }

  NodePtr expr() {
    NodePtr lhs = term();
    for (;;) {
      if (eat('+')) lhs = make(Node::Op::Add, {lhs, term()});
      else if (eat('-')) lhs = make(Node::Op::Sub, {lhs, term()});
      else return lhs;
    }
  }
  NodePtr term() {
    NodePtr lhs = unary();
    for (;;) {
      if (eat('*')) lhs = make(Node::Op::Mul, {lhs, unary()});
      else if (eat('/')) lhs = make(Node::Op::Div, {lhs, unary()});
      else return lhs;
    }
  }
  NodePtr unary() {
    if (eat('-')) return make(Node::Op::Neg, {unary()});
    if (eat('+')) return unary();
    return power();
  }
  NodePtr power() {
    NodePtr base = primary();
    if (eat('^')) return make(Node::Op::Pow, {base, unary()});
    return base;
  }
  NodePtr primary() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end of input");
    const char c = s_[pos_];
    if (eat('(')) {
      NodePtr n = expr();
      if (!eat(')')) fail("expected ')'");
      return n;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      const char* begin = s_.c_str() + pos_;
      char* end = nullptr;
      const double v = std::strtod(begin, &end);
      if (end == begin) fail("malformed number");
      pos_ += static_cast<std::size_t>(end - begin);
      auto n = std::make_shared<Node>();
      n->value = v;
      return n;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      const std::size_t start = pos_;
      while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
      const std::string id = s_.substr(start, pos_ - start);
      skip();
      if (pos_ < s_.size() && s_[pos_] == '(') {
        ++pos_;
        int arity = -1;
        for (const auto& f : kFunctions)
          if (id == f.name) arity = f.arity;
        if (arity < 0) fail("unknown function '" + id + "'");
        std::vector<NodePtr> args;
        if (!eat(')')) {
          do args.push_back(expr());
          while (eat(','));
          if (!eat(')')) fail("expected ')' after arguments of " + id);
        }
        if (static_cast<int>(args.size()) != arity)
          fail(id + " expects " + std::to_string(arity) + " argument(s), got " + std::to_string(args.size()));
        auto n = std::make_shared<Node>();
        n->op = Node::Op::Call;
        n->fn = id;
        n->args = std::move(args);
        return n;
      }
      auto n = std::make_shared<Node>();
      if (id == "pi") {
        n->value = M_PI;
      } else if (id == "e") {
        n->value = M_E;
      } else if (id == "x" || id == "y" || id == "t" || id == "s") {
        n->op = Node::Op::Var;
        n->var = id[0];
      } else {
        fail("unknown identifier '" + id + "'");
      }
      return n;
    }
    fail("unexpected '" + std::string(1, c) + "'");
  }

  const std::string& s_;
  std::size_t pos_ = 0;
};

double eval(const Node& n, const ExprVars& v, const std::string& text) {
  auto domain = [&](const std::string& what) -> double {
    throw DomainError("expression \"" + text + "\": " + what + " at x=" + std::to_string(v.x) + " y=" +
                      std::to_string(v.y) + " t=" + std::to_string(v.t) + " s=" + std::to_string(v.s));
  };
  auto arg = [&](std::size_t i) { return eval(*n.args[i], v, text); };
  double r = 0.0;
  switch (n.op) {
    case Node::Op::Num:
      return n.value;
    case Node::Op::Var:
      return n.var == 'x' ? v.x : n.var == 'y' ? v.y : n.var == 't' ? v.t : v.s;
    case Node::Op::Neg:
      return -arg(0);
    case Node::Op::Add:
      r = arg(0) + arg(1);
      break;
    case Node::Op::Sub:
      r = arg(0) - arg(1);
      break;
    case Node::Op::Mul:
      r = arg(0) * arg(1);
      break;
    case Node::Op::Div: {
      const double d = arg(1);
      if (d == 0.0) return domain("division by zero");
      r = arg(0) / d;
      break;
    }
    case Node::Op::Pow:
      r = std::pow(arg(0), arg(1));
      break;
    case Node::Op::Call: {
      const std::string& f = n.fn;
      if (f == "if") return arg(0) > 0.0 ? arg(1) : arg(2);
      if (f == "ind") {
        const double a = arg(0), b = arg(1), z = arg(2);
        return (z > a && z < b) ? 1.0 : 0.0;
      }
      const double a = arg(0);
      if (f == "exp") r = std::exp(a);
      else if (f == "log") {
        if (!(a > 0.0)) return domain("log of a nonpositive number");
        r = std::log(a);
      } else if (f == "sin") r = std::sin(a);
      else if (f == "cos") r = std::cos(a);
      else if (f == "tan") r = std::tan(a);
      else if (f == "sqrt") {
        if (a < 0.0) return domain("sqrt of a negative number");
        r = std::sqrt(a);
      } else if (f == "abs") r = std::abs(a);
      else if (f == "min") r = std::min(a, arg(1));
      else if (f == "max") r = std::max(a, arg(1));
      else if (f == "pow") r = std::pow(a, arg(1));
      break;
    }
  }
  if (!std::isfinite(r)) return domain("non-finite value");
  return r;
}

bool uses_var(const Node& n, char var) {
  if (n.op == Node::Op::Var) return n.var == var;
  for (const auto& a : n.args)
    if (uses_var(*a, var)) return true;
  return false;
}

}  // namespace

Expression Expression::parse(const std::string& text) {
  Expression e;
  e.text_ = text;
  e.root_ = Parser(e.text_).parse();
  return e;
}

double Expression::operator()(const ExprVars& v) const {
  if (!root_) throw PreconditionError("evaluating an empty expression");
  return eval(*root_, v, text_);
}

bool Expression::uses(char var) const { return root_ && uses_var(*root_, var); }

}  // namespace dnp
