#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "clockdil/operator_algebra.hpp"

namespace clockdil::harness {

struct ExprNode;

// Real expression in one variable: + - * / ^, parentheses, pi, e, and
// sin cos tan exp log sqrt abs. Polynomials are recognized so the clock can use
// exact Galerkin matrices for them.
class Expression {
 public:
  static Expression parse(std::string_view text, std::string variable = "t");

  double operator()(double x) const;
  // Coefficients lowest degree first, or nullopt when not a polynomial.
  std::optional<std::vector<double>> polynomial() const;
  const std::string& text() const noexcept { return text_; }
  const std::string& variable() const noexcept { return variable_; }

  TimeFunction time_function() const;
  // f(x) as a multiplication operator, exact when polynomial.
  PrimitiveOp multiplication() const;
  // int_0^t f, exact for polynomials, adaptive quadrature otherwise.
  double integral(double t) const;

 private:
  std::shared_ptr<const ExprNode> root_;
  std::string text_;
  std::string variable_;
};

}  // namespace clockdil::harness
