#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "clockdil/galerkin_basis.hpp"
#include "clockdil/types.hpp"

namespace clockdil {

// Scalar function of time. Polynomials keep their coefficients (lowest degree first) so
// they can later be evaluated at an operator instead of a number.
class TimeFunction {
 public:
  TimeFunction() : TimeFunction(constant(0.0)) {}
  TimeFunction(cplx c) : TimeFunction(constant(c)) {}  // NOLINT: implicit by design
  TimeFunction(double c) : TimeFunction(constant(c)) {}  // NOLINT

  static TimeFunction constant(cplx c);
  static TimeFunction polynomial(std::vector<cplx> coefficients);
  static TimeFunction general(ComplexFunction f);

  cplx operator()(double t) const { return eval_(t); }
  const std::optional<std::vector<cplx>>& coefficients() const noexcept { return coefficients_; }
  bool is_polynomial() const noexcept { return coefficients_.has_value(); }
  bool is_constant() const noexcept;
  bool is_zero() const noexcept;
  const ComplexFunction& function() const noexcept { return eval_; }

  TimeFunction real_part() const;
  TimeFunction imag_part() const;
  TimeFunction conjugate() const;

  friend TimeFunction operator*(const TimeFunction& a, const TimeFunction& b);
  friend TimeFunction operator+(const TimeFunction& a, const TimeFunction& b);
  friend TimeFunction operator-(const TimeFunction& a) { return TimeFunction(-1.0) * a; }

 private:
  TimeFunction(ComplexFunction f, std::optional<std::vector<cplx>> c)
      : eval_(std::move(f)), coefficients_(std::move(c)) {}
  ComplexFunction eval_;
  std::optional<std::vector<cplx>> coefficients_;
};

enum class PrimitiveKind {
  Identity,
  Position,
  Momentum,
  PositionPower,
  MomentumPower,
  MultiplicationBy,
  FiniteMatrix
};

class PrimitiveOp {
 public:
  static PrimitiveOp identity() { return PrimitiveOp(PrimitiveKind::Identity); }
  static PrimitiveOp position() { return PrimitiveOp(PrimitiveKind::Position); }
  static PrimitiveOp momentum() { return PrimitiveOp(PrimitiveKind::Momentum); }
  static PrimitiveOp position_power(unsigned k);
  static PrimitiveOp momentum_power(unsigned k);
  static PrimitiveOp multiplication(ComplexFunction f);
  // Multiplication by a polynomial in x, materialized exactly.
  static PrimitiveOp multiplication_polynomial(std::vector<cplx> coefficients);
  static PrimitiveOp finite(Matrix m);

  PrimitiveKind kind() const noexcept { return kind_; }
  unsigned power() const noexcept { return power_; }
  const ComplexFunction& function() const noexcept { return function_; }
  const std::optional<std::vector<cplx>>& polynomial() const noexcept { return polynomial_; }
  const Matrix& matrix() const noexcept { return matrix_; }

  PrimitiveOp adjoint() const;

 private:
  explicit PrimitiveOp(PrimitiveKind k) : kind_(k) {}
  PrimitiveKind kind_;
  unsigned power_ = 1;
  ComplexFunction function_{};
  std::optional<std::vector<cplx>> polynomial_{};
  Matrix matrix_{};
};

struct Factor {
  std::string mode;
  PrimitiveOp op;
};

inline Factor on(std::string mode, PrimitiveOp op) { return {std::move(mode), std::move(op)}; }

// Factors on the same mode multiply in the listed order (x then p gives x p).
struct Term {
  TimeFunction coefficient;
  std::vector<Factor> factors;
};

enum class ModeKind { Hermite, Finite };

struct ModeDecl {
  std::string name;
  ModeKind kind = ModeKind::Hermite;
};

class OperatorExpr {
 public:
  OperatorExpr() = default;
  explicit OperatorExpr(std::vector<ModeDecl> modes);

  const std::vector<ModeDecl>& modes() const noexcept { return modes_; }
  const std::vector<Term>& terms() const noexcept { return terms_; }
  bool has_mode(const std::string& name) const;

  OperatorExpr& add(TimeFunction coefficient, std::vector<Factor> factors);

  static OperatorExpr identity(std::vector<ModeDecl> modes);

  // Mode lists are merged, left operand first.
  friend OperatorExpr operator+(const OperatorExpr& a, const OperatorExpr& b);
  friend OperatorExpr operator-(const OperatorExpr& a, const OperatorExpr& b);
  friend OperatorExpr operator*(const TimeFunction& c, const OperatorExpr& e);
  // Operator product: every pair of terms, factors of a before factors of b.
  friend OperatorExpr operator*(const OperatorExpr& a, const OperatorExpr& b);

 private:
  void merge_modes(const std::vector<ModeDecl>& other);
  std::vector<ModeDecl> modes_;
  std::vector<Term> terms_;
};

// Hermite modes carry a basis; finite modes only a dimension.
using ModeBasis = std::variant<HermiteBasis, std::size_t>;
using BasisMap = std::map<std::string, ModeBasis, std::less<>>;

std::size_t mode_dimension(const ModeBasis& basis);
std::vector<std::size_t> layout_dims(const OperatorExpr& expr, const BasisMap& bases);

OperatorExpr adjoint(const OperatorExpr& expr);

// Time-independent matrix of one primitive on one mode.
Matrix primitive_matrix(const PrimitiveOp& op, const ModeBasis& basis,
                        const QuadratureOptions& quadrature = {});
// Term operator without its coefficient, assembled in the declared mode order.
SparseMatrix term_operator(const Term& term, const std::vector<ModeDecl>& modes,
                           const BasisMap& bases, const QuadratureOptions& quadrature = {});

Matrix materialize(const OperatorExpr& expr, const BasisMap& bases, double t,
                   const QuadratureOptions& quadrature = {});
SparseMatrix materialize_sparse(const OperatorExpr& expr, const BasisMap& bases, double t,
                                const QuadratureOptions& quadrature = {});

struct HermitianSplit {
  Matrix a1;
  Matrix a2;
};

// A = A1 - i A2 with A1 = (A + A^dag)/2 and A2 = i(A - A^dag)/2.
HermitianSplit hermitian_split(const Matrix& a);

// Real coefficient times a Hermitian operator.
struct HermitianTerm {
  TimeFunction coefficient;
  SparseMatrix matrix;
};

using MatrixProvider = std::function<Matrix(double)>;

class Generator {
 public:
  // Separable form a_i(t) = sum_k lambda_k(t) h_k.
  static Generator from_terms(std::size_t dim, std::vector<HermitianTerm> a1_terms,
                              std::vector<HermitianTerm> a2_terms,
                              std::optional<OperatorExpr> source = std::nullopt);
  // Only pointwise values of A(t) are known.
  static Generator from_function(std::size_t dim, MatrixProvider a);
  static Generator from_hermitian(std::size_t dim, MatrixProvider h);

  std::size_t dim() const noexcept { return dim_; }
  bool separable() const noexcept { return separable_; }
  const std::vector<HermitianTerm>& a1_terms() const noexcept { return a1_terms_; }
  const std::vector<HermitianTerm>& a2_terms() const noexcept { return a2_terms_; }
  const std::optional<OperatorExpr>& source() const noexcept { return source_; }
  bool has_dissipation() const noexcept;

  Matrix a1(double t) const;
  Matrix a2(double t) const;
  Matrix a(double t) const;

 private:
  std::size_t dim_ = 0;
  bool separable_ = false;
  bool hermitian_ = false;
  std::vector<HermitianTerm> a1_terms_, a2_terms_;
  MatrixProvider a1_fn_, a2_fn_;
  std::optional<OperatorExpr> source_;
};

Generator split_generator(const OperatorExpr& expr, const BasisMap& bases,
                          const QuadratureOptions& quadrature = {});

// A Hermitian expression as a generator with a2 = 0.
Generator hamiltonian_generator(const OperatorExpr& expr, const BasisMap& bases,
                                const QuadratureOptions& quadrature = {});

}  // namespace clockdil
