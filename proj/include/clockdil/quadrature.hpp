#pragma once

#include <cstddef>
#include <functional>
#include <span>

#include "clockdil/types.hpp"

namespace clockdil {

// Nodes and weights; what the weights integrate against depends on the factory.
struct QuadratureRule {
  RealVector nodes;
  RealVector weights;
  std::size_t order() const noexcept { return static_cast<std::size_t>(nodes.size()); }
};

// Gauss-Hermite for the weight exp(-y^2): sum w_i F(y_i) ~ int exp(-y^2) F(y) dy.
// Nodes from the Jacobi matrix, weights by the Christoffel sum; results are cached.
const QuadratureRule& gauss_hermite(std::size_t order);

// Same nodes with weights w_i * exp(y_i^2), so sum w_i F(y_i) ~ int F(y) dy for F with
// Gaussian decay. These do not underflow at the outer nodes.
const QuadratureRule& gauss_hermite_folded(std::size_t order);

// Gauss-Legendre on [-1, 1].
const QuadratureRule& gauss_legendre(std::size_t order);

// Composite Gauss-Legendre over [a, b]: `panels` equal panels, further split at any
// breakpoint strictly inside (a, b).
QuadratureRule panel_rule(double a, double b, std::size_t panels, std::size_t points_per_panel = 16,
                          std::span<const double> breakpoints = {});

// Adaptive Gauss-Kronrod on a finite interval, for scalar oracles.
double integrate(const std::function<double(double)>& f, double a, double b, double tol = 1e-12);

}  // namespace clockdil
