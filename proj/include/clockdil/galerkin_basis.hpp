#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "clockdil/quadrature.hpp"
#include "clockdil/types.hpp"

namespace clockdil {

using RealFunction = std::function<double(double)>;
using ComplexFunction = std::function<cplx(double)>;

// Orthonormal Hermite functions phi_n(x) = H_n(x/scale) exp(-x^2/(2 scale^2)) / C_n.
class HermiteBasis {
 public:
  HermiteBasis(std::size_t size, double scale);

  std::size_t size() const noexcept { return size_; }
  double scale() const noexcept { return scale_; }

  double eval(std::size_t n, double x) const;
  // All N functions at once; row n, column j holds phi_n(x_j).
  RealMatrix table(std::span<const double> x) const;
  // Values of every basis function at one point.
  RealVector column(double x) const;

  // Past this radius every phi_n is below ~1e-20 of its peak.
  double support_radius() const noexcept;
  // Smallest length the basis resolves near the origin, scale/sqrt(N).
  double resolution() const noexcept;
  // Same size, reciprocal scale: the basis of the Fourier-conjugate variable.
  HermiteBasis conjugate() const { return HermiteBasis(size_, 1.0 / scale_); }

  friend bool operator==(const HermiteBasis&, const HermiteBasis&) = default;

 private:
  std::size_t size_;
  double scale_;
};

RealMatrix gram_matrix(const HermiteBasis& basis, std::size_t order = 0);

Matrix position_matrix(const HermiteBasis& basis);
Matrix momentum_matrix(const HermiteBasis& basis);
// Galerkin matrices of x^k and p^k: built on N+k functions, raised, then truncated, so
// every entry equals the exact integral.
Matrix position_power_matrix(const HermiteBasis& basis, unsigned k);
Matrix momentum_power_matrix(const HermiteBasis& basis, unsigned k);
// sum_k c_k x^k, exact in the same sense.
Matrix polynomial_in_position(const HermiteBasis& basis, std::span<const cplx> coefficients);

enum class QuadratureKind { GaussHermite, Panels };

struct QuadratureOptions {
  QuadratureKind kind = QuadratureKind::GaussHermite;
  std::size_t initial_order = 0;  // 0 -> 2N nodes (Gauss-Hermite) or 4 panels per resolution width
  std::size_t max_order = 16384;
  double tolerance = 1e-10;       // stop doubling once entries change by less than this
  double flag_threshold = 1e-8;   // final change above this is a non-convergence
  std::vector<double> breakpoints{};  // panel rules only
  bool throw_on_flag = true;
};

struct GalerkinMatrix {
  Matrix matrix;
  double refinement_delta = 0.0;
  std::size_t order = 0;
  bool converged = true;
};

// f_nm = int phi_n(x) f(x) phi_m(x) dx with node doubling until stable.
GalerkinMatrix galerkin_matrix(const ComplexFunction& f, const HermiteBasis& basis,
                               const QuadratureOptions& opts = {});
Matrix multiplication_operator(const ComplexFunction& f, const HermiteBasis& basis,
                               const QuadratureOptions& opts = {});

struct StateProjection {
  Vector coefficients;
  double leakage = 0.0;  // 1 - |c|^2/|psi|^2, only meaningful when the norm was supplied
  double refinement_delta = 0.0;
  std::size_t order = 0;
};

// c_n = int phi_n psi dx; panel quadrature by default so kinks at breakpoints are exact.
StateProjection project_state(const ComplexFunction& psi, const HermiteBasis& basis,
                              std::optional<double> norm_squared = std::nullopt,
                              QuadratureOptions opts = {.kind = QuadratureKind::Panels,
                                                        .breakpoints = {0.0}});

enum class FourierDirection { Forward, Inverse };

struct ConjugateCoefficients {
  Vector coefficients;
  HermiteBasis basis;
};

// Hermite functions are Fourier eigenfunctions: forward multiplies c_n by i^n,
// inverse by (-i)^n, and the basis scale is inverted.
ConjugateCoefficients fourier_conjugate(const Vector& c, const HermiteBasis& basis,
                                        FourierDirection direction);
// Diagonal of the forward map, i^n.
Vector fourier_phases(std::size_t n, FourierDirection direction);

struct IntervalProjection {
  Matrix matrix;
  double idempotency_defect = 0.0;  // ||P^2 - P||_F
  double refinement_delta = 0.0;
};

// Galerkin matrix of the indicator of [a, b]; infinite ends are allowed.
IntervalProjection interval_projection(double a, double b, const HermiteBasis& basis);

}  // namespace clockdil
