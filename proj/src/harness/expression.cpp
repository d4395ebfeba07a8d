#include "clockdil/harness/expression.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <numbers>
#include <variant>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <fmt/format.h>

namespace clockdil::harness {

using Poly = std::vector<double>;

struct ExprNode {
  enum class Kind { Number, Variable, Negate, Add, Sub, Mul, Div, Pow, Call };
  Kind kind = Kind::Number;
  double value = 0.0;
  std::string function;
  std::shared_ptr<const ExprNode> lhs, rhs;
};

namespace {

using NodePtr = std::shared_ptr<const ExprNode>;
using Kind = ExprNode::Kind;

double apply_function(const std::string& name, double x) {
  if (name == "sin") return std::sin(x);
  if (name == "cos") return std::cos(x);
  if (name == "tan") return std::tan(x);
  if (name == "exp") return std::exp(x);
  if (name == "log") return std::log(x);
  if (name == "sqrt") return std::sqrt(x);
  if (name == "abs") return std::abs(x);
  throw Error(ErrorKind::Config, fmt::format("unknown function '{}'", name));
}

bool known_function(const std::string& name) {
  for (const char* f : {"sin", "cos", "tan", "exp", "log", "sqrt", "abs"})
    if (name == f) return true;
  return false;
}

class Parser {
 public:
  Parser(std::string_view text, const std::string& variable) : text_(text), variable_(variable) {}

  NodePtr parse() {
    NodePtr n = sum();
    skip();
    if (pos_ != text_.size()) fail("unexpected character");
    return n;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw Error(ErrorKind::Config, fmt::format("expression '{}': {} at position {}", text_, what, pos_ + 1));
  }

  void skip() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  static NodePtr make(Kind k, NodePtr a, NodePtr b = nullptr) {
    auto n = std::make_shared<ExprNode>();
    n->kind = k;
    n->lhs = std::move(a);
    n->rhs = std::move(b);
    return n;
  }

  NodePtr sum() {
    NodePtr n = product();
    for (;;) {
      if (accept('+'))
        n = make(Kind::Add, n, product());
      else if (accept('-'))
        n = make(Kind::Sub, n, product());
      else
        return n;
    }
  }

  NodePtr product() {
    NodePtr n = unary();
    for (;;) {
      if (accept('*'))
        n = make(Kind::Mul, n, unary());
      else if (accept('/'))
        n = make(Kind::Div, n, unary());
      else
        return n;
    }
  }

  NodePtr unary() {
    if (accept('-')) return make(Kind::Negate, unary());
    if (accept('+')) return unary();
    return power();
  }

  // right associative, binds tighter than unary minus on its left: -x^2 = -(x^2)
  NodePtr power() {
    NodePtr base = primary();
    if (accept('^')) return make(Kind::Pow, base, unary());
    return base;
  }

  NodePtr primary() {
    skip();
    if (pos_ >= text_.size()) fail("unexpected end");
    const char c = text_[pos_];
    if (accept('(')) {
      NodePtr n = sum();
      if (!accept(')')) fail("missing ')'");
      return n;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      auto n = std::make_shared<ExprNode>();
      const char* first = text_.data() + pos_;
      const auto [ptr, ec] = std::from_chars(first, text_.data() + text_.size(), n->value);
      if (ec != std::errc()) fail("bad number");
      pos_ += static_cast<std::size_t>(ptr - first);
      return n;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      const std::size_t start = pos_;
      while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) ++pos_;
      const std::string name(text_.substr(start, pos_ - start));
      if (name == variable_) {
        auto n = std::make_shared<ExprNode>();
        n->kind = Kind::Variable;
        return n;
      }
      if (name == "pi" || name == "e") {
        auto n = std::make_shared<ExprNode>();
        n->value = name == "pi" ? std::numbers::pi : std::numbers::e;
        return n;
      }
      if (!known_function(name)) {
        pos_ = start;
        fail(fmt::format("unknown name '{}' (the variable is '{}')", name, variable_));
      }
      if (!accept('(')) fail(fmt::format("'{}' needs an argument", name));
      auto n = std::make_shared<ExprNode>();
      n->kind = Kind::Call;
      n->function = name;
      n->lhs = sum();
      if (!accept(')')) fail("missing ')'");
      return n;
    }
    fail("unexpected character");
  }

  std::string_view text_;
  const std::string& variable_;
  std::size_t pos_ = 0;
};

double eval(const ExprNode& n, double x) {
  switch (n.kind) {
    case Kind::Number: return n.value;
    case Kind::Variable: return x;
    case Kind::Negate: return -eval(*n.lhs, x);
    case Kind::Add: return eval(*n.lhs, x) + eval(*n.rhs, x);
    case Kind::Sub: return eval(*n.lhs, x) - eval(*n.rhs, x);
    case Kind::Mul: return eval(*n.lhs, x) * eval(*n.rhs, x);
    case Kind::Div: return eval(*n.lhs, x) / eval(*n.rhs, x);
    case Kind::Pow: return std::pow(eval(*n.lhs, x), eval(*n.rhs, x));
    case Kind::Call: return apply_function(n.function, eval(*n.lhs, x));
  }
  return 0.0;
}

Poly add(Poly a, const Poly& b, double sign) {
  if (a.size() < b.size()) a.resize(b.size(), 0.0);
  for (std::size_t i = 0; i < b.size(); ++i) a[i] += sign * b[i];
  return a;
}

Poly mul(const Poly& a, const Poly& b) {
  Poly c(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) c[i + j] += a[i] * b[j];
  return c;
}

bool is_constant(const Poly& p) {
  for (std::size_t i = 1; i < p.size(); ++i)
    if (p[i] != 0.0) return false;
  return true;
}

std::optional<Poly> as_poly(const ExprNode& n) {
  switch (n.kind) {
    case Kind::Number: return Poly{n.value};
    case Kind::Variable: return Poly{0.0, 1.0};
    case Kind::Negate: {
      auto a = as_poly(*n.lhs);
      if (!a) return std::nullopt;
      for (double& c : *a) c = -c;
      return a;
    }
    case Kind::Add:
    case Kind::Sub: {
      auto a = as_poly(*n.lhs), b = as_poly(*n.rhs);
      if (!a || !b) return std::nullopt;
      return add(*a, *b, n.kind == Kind::Add ? 1.0 : -1.0);
    }
    case Kind::Mul: {
      auto a = as_poly(*n.lhs), b = as_poly(*n.rhs);
      if (!a || !b) return std::nullopt;
      return mul(*a, *b);
    }
    case Kind::Div: {
      auto a = as_poly(*n.lhs), b = as_poly(*n.rhs);
      if (!a || !b || !is_constant(*b) || (*b)[0] == 0.0) return std::nullopt;
      for (double& c : *a) c /= (*b)[0];
      return a;
    }
    case Kind::Pow: {
      auto a = as_poly(*n.lhs), b = as_poly(*n.rhs);
      if (!a || !b || !is_constant(*b)) return std::nullopt;
      const double k = (*b)[0];
      if (k < 0.0 || k > 64.0 || k != std::floor(k)) {
        if (is_constant(*a)) return Poly{std::pow((*a)[0], k)};
        return std::nullopt;
      }
      Poly out{1.0};
      for (int i = 0; i < static_cast<int>(k); ++i) out = mul(out, *a);
      return out;
    }
    case Kind::Call: {
      auto a = as_poly(*n.lhs);
      if (!a || !is_constant(*a)) return std::nullopt;
      return Poly{apply_function(n.function, (*a)[0])};
    }
  }
  return std::nullopt;
}

std::vector<cplx> to_complex(const Poly& p) { return {p.begin(), p.end()}; }

}  // namespace

Expression Expression::parse(std::string_view text, std::string variable) {
  Expression e;
  e.text_ = std::string(text);
  e.variable_ = std::move(variable);
  e.root_ = Parser(e.text_, e.variable_).parse();
  return e;
}

double Expression::operator()(double x) const { return eval(*root_, x); }

std::optional<std::vector<double>> Expression::polynomial() const {
  auto p = as_poly(*root_);
  if (p)
    while (p->size() > 1 && p->back() == 0.0) p->pop_back();
  return p;
}

TimeFunction Expression::time_function() const {
  if (auto p = polynomial()) return TimeFunction::polynomial(to_complex(*p));
  return TimeFunction::general([root = root_](double t) { return cplx(eval(*root, t)); });
}

PrimitiveOp Expression::multiplication() const {
  if (auto p = polynomial()) return PrimitiveOp::multiplication_polynomial(to_complex(*p));
  return PrimitiveOp::multiplication([root = root_](double x) { return cplx(eval(*root, x)); });
}

double Expression::integral(double t) const {
  if (auto p = polynomial()) {
    double acc = 0.0;
    for (std::size_t k = p->size(); k-- > 0;) acc = acc * t + (*p)[k] / static_cast<double>(k + 1);
    return acc * t;
  }
  if (t == 0.0) return 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
      [root = root_](double s) { return eval(*root, s); }, 0.0, t, 15, 1e-13);
}

}  // namespace clockdil::harness
