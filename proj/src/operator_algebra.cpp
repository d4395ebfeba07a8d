#include "clockdil/operator_algebra.hpp"

#include <algorithm>

#include "clockdil/sparse.hpp"

namespace clockdil {
namespace {

cplx horner(const std::vector<cplx>& c, double t) {
  cplx acc = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * t + *it;
  return acc;
}

std::vector<cplx> map_coefficients(const std::vector<cplx>& c, cplx (*f)(const cplx&)) {
  std::vector<cplx> out(c.size());
  std::transform(c.begin(), c.end(), out.begin(), f);
  return out;
}

cplx real_of(const cplx& z) { return z.real(); }
cplx imag_of(const cplx& z) { return z.imag(); }
cplx conj_of(const cplx& z) { return std::conj(z); }

bool all_zero(const std::vector<cplx>& c) {
  return std::all_of(c.begin(), c.end(), [](cplx z) { return z == 0.0; });
}

const ModeBasis& basis_for(const BasisMap& bases, const std::string& mode) {
  auto it = bases.find(mode);
  if (it == bases.end()) throw Error(ErrorKind::UnknownMode, "no basis for mode '" + mode + "'");
  return it->second;
}

}  // namespace

TimeFunction TimeFunction::constant(cplx c) { return polynomial({c}); }

TimeFunction TimeFunction::polynomial(std::vector<cplx> coefficients) {
  while (coefficients.size() > 1 && coefficients.back() == 0.0) coefficients.pop_back();
  if (coefficients.empty()) coefficients.push_back(0.0);
  auto copy = coefficients;
  return TimeFunction([c = std::move(copy)](double t) { return horner(c, t); },
                      std::move(coefficients));
}

TimeFunction TimeFunction::general(ComplexFunction f) {
  if (!f) throw Error(ErrorKind::InvalidArgument, "empty time function");
  return TimeFunction(std::move(f), std::nullopt);
}

bool TimeFunction::is_constant() const noexcept {
  return coefficients_ && coefficients_->size() == 1;
}

bool TimeFunction::is_zero() const noexcept { return coefficients_ && all_zero(*coefficients_); }

TimeFunction TimeFunction::real_part() const {
  if (coefficients_) return polynomial(map_coefficients(*coefficients_, real_of));
  return general([f = eval_](double t) { return cplx(f(t).real()); });
}

TimeFunction TimeFunction::imag_part() const {
  if (coefficients_) return polynomial(map_coefficients(*coefficients_, imag_of));
  return general([f = eval_](double t) { return cplx(f(t).imag()); });
}

TimeFunction TimeFunction::conjugate() const {
  if (coefficients_) return polynomial(map_coefficients(*coefficients_, conj_of));
  return general([f = eval_](double t) { return std::conj(f(t)); });
}

TimeFunction operator*(const TimeFunction& a, const TimeFunction& b) {
  if (a.coefficients_ && b.coefficients_) {
    const auto& x = *a.coefficients_;
    const auto& y = *b.coefficients_;
    std::vector<cplx> c(x.size() + y.size() - 1, 0.0);
    for (std::size_t i = 0; i < x.size(); ++i)
      for (std::size_t j = 0; j < y.size(); ++j) c[i + j] += x[i] * y[j];
    return TimeFunction::polynomial(std::move(c));
  }
  return TimeFunction::general([f = a.eval_, g = b.eval_](double t) { return f(t) * g(t); });
}

TimeFunction operator+(const TimeFunction& a, const TimeFunction& b) {
  if (a.coefficients_ && b.coefficients_) {
    std::vector<cplx> c(std::max(a.coefficients_->size(), b.coefficients_->size()), 0.0);
    for (std::size_t i = 0; i < a.coefficients_->size(); ++i) c[i] += (*a.coefficients_)[i];
    for (std::size_t i = 0; i < b.coefficients_->size(); ++i) c[i] += (*b.coefficients_)[i];
    return TimeFunction::polynomial(std::move(c));
  }
  return TimeFunction::general([f = a.eval_, g = b.eval_](double t) { return f(t) + g(t); });
}

PrimitiveOp PrimitiveOp::position_power(unsigned k) {
  if (k == 0) throw Error(ErrorKind::InvalidArgument, "position power must be positive");
  PrimitiveOp op(PrimitiveKind::PositionPower);
  op.power_ = k;
  return op;
}

PrimitiveOp PrimitiveOp::momentum_power(unsigned k) {
  if (k == 0) throw Error(ErrorKind::InvalidArgument, "momentum power must be positive");
  PrimitiveOp op(PrimitiveKind::MomentumPower);
  op.power_ = k;
  return op;
}

PrimitiveOp PrimitiveOp::multiplication(ComplexFunction f) {
  if (!f) throw Error(ErrorKind::InvalidArgument, "empty multiplication function");
  PrimitiveOp op(PrimitiveKind::MultiplicationBy);
  op.function_ = std::move(f);
  return op;
}

PrimitiveOp PrimitiveOp::multiplication_polynomial(std::vector<cplx> coefficients) {
  PrimitiveOp op(PrimitiveKind::MultiplicationBy);
  op.function_ = [c = coefficients](double x) { return horner(c, x); };
  op.polynomial_ = std::move(coefficients);
  return op;
}

PrimitiveOp PrimitiveOp::finite(Matrix m) {
  if (m.rows() != m.cols() || m.rows() == 0)
    throw Error(ErrorKind::DimensionMismatch, "finite operator must be square");
  PrimitiveOp op(PrimitiveKind::FiniteMatrix);
  op.matrix_ = std::move(m);
  return op;
}

PrimitiveOp PrimitiveOp::adjoint() const {
  switch (kind_) {
    case PrimitiveKind::MultiplicationBy:
      if (polynomial_) return multiplication_polynomial(map_coefficients(*polynomial_, conj_of));
      return multiplication([f = function_](double x) { return std::conj(f(x)); });
    case PrimitiveKind::FiniteMatrix:
      return finite(matrix_.adjoint());
    default:
      return *this;
  }
}

OperatorExpr::OperatorExpr(std::vector<ModeDecl> modes) : modes_(std::move(modes)) {
  for (std::size_t i = 0; i < modes_.size(); ++i)
    for (std::size_t j = 0; j < i; ++j)
      if (modes_[i].name == modes_[j].name)
        throw Error(ErrorKind::InvalidArgument, "duplicate mode '" + modes_[i].name + "'");
}

bool OperatorExpr::has_mode(const std::string& name) const {
  return std::any_of(modes_.begin(), modes_.end(), [&](const ModeDecl& m) { return m.name == name; });
}

OperatorExpr& OperatorExpr::add(TimeFunction coefficient, std::vector<Factor> factors) {
  for (const Factor& f : factors)
    if (!has_mode(f.mode)) throw Error(ErrorKind::UnknownMode, "undeclared mode '" + f.mode + "'");
  terms_.push_back({std::move(coefficient), std::move(factors)});
  return *this;
}

OperatorExpr OperatorExpr::identity(std::vector<ModeDecl> modes) {
  OperatorExpr e(std::move(modes));
  e.add(1.0, {});
  return e;
}

void OperatorExpr::merge_modes(const std::vector<ModeDecl>& other) {
  for (const ModeDecl& m : other)
    if (!has_mode(m.name)) modes_.push_back(m);
}

OperatorExpr operator+(const OperatorExpr& a, const OperatorExpr& b) {
  OperatorExpr out = a;
  out.merge_modes(b.modes_);
  out.terms_.insert(out.terms_.end(), b.terms_.begin(), b.terms_.end());
  return out;
}

OperatorExpr operator-(const OperatorExpr& a, const OperatorExpr& b) {
  return a + TimeFunction(-1.0) * b;
}

OperatorExpr operator*(const TimeFunction& c, const OperatorExpr& e) {
  OperatorExpr out = e;
  for (Term& t : out.terms_) t.coefficient = c * t.coefficient;
  return out;
}

OperatorExpr operator*(const OperatorExpr& a, const OperatorExpr& b) {
  OperatorExpr out(a.modes_);
  out.merge_modes(b.modes_);
  for (const Term& x : a.terms_)
    for (const Term& y : b.terms_) {
      Term t{x.coefficient * y.coefficient, x.factors};
      t.factors.insert(t.factors.end(), y.factors.begin(), y.factors.end());
      out.terms_.push_back(std::move(t));
    }
  return out;
}

std::size_t mode_dimension(const ModeBasis& basis) {
  return std::visit(
      [](const auto& b) -> std::size_t {
        if constexpr (std::is_same_v<std::decay_t<decltype(b)>, HermiteBasis>)
          return b.size();
        else
          return b;
      },
      basis);
}

std::vector<std::size_t> layout_dims(const OperatorExpr& expr, const BasisMap& bases) {
  std::vector<std::size_t> dims;
  for (const ModeDecl& m : expr.modes()) dims.push_back(mode_dimension(basis_for(bases, m.name)));
  return dims;
}

OperatorExpr adjoint(const OperatorExpr& expr) {
  OperatorExpr out(expr.modes());
  for (const Term& t : expr.terms()) {
    // (c P1 P2 ...)^dag = conj(c) ... P2^dag P1^dag; factors on different modes commute, so
    // reversing the whole list reverses each per-mode chain.
    std::vector<Factor> factors;
    for (auto it = t.factors.rbegin(); it != t.factors.rend(); ++it)
      factors.push_back({it->mode, it->op.adjoint()});
    out.add(t.coefficient.conjugate(), std::move(factors));
  }
  return out;
}

Matrix primitive_matrix(const PrimitiveOp& op, const ModeBasis& basis,
                        const QuadratureOptions& quadrature) {
  const auto n = static_cast<Eigen::Index>(mode_dimension(basis));
  if (op.kind() == PrimitiveKind::Identity) return Matrix::Identity(n, n);
  if (op.kind() == PrimitiveKind::FiniteMatrix) {
    if (op.matrix().rows() != n)
      throw Error(ErrorKind::DimensionMismatch,
                  "finite operator of size " + std::to_string(op.matrix().rows()) +
                      " on a mode of dimension " + std::to_string(n));
    return op.matrix();
  }
  const auto* hermite = std::get_if<HermiteBasis>(&basis);
  if (!hermite)
    throw Error(ErrorKind::Unsupported, "continuous-variable operator on a finite mode");
  switch (op.kind()) {
    case PrimitiveKind::Position: return position_matrix(*hermite);
    case PrimitiveKind::Momentum: return momentum_matrix(*hermite);
    case PrimitiveKind::PositionPower: return position_power_matrix(*hermite, op.power());
    case PrimitiveKind::MomentumPower: return momentum_power_matrix(*hermite, op.power());
    case PrimitiveKind::MultiplicationBy:
      if (op.polynomial()) return polynomial_in_position(*hermite, *op.polynomial());
      return multiplication_operator(op.function(), *hermite, quadrature);
    default: break;
  }
  throw Error(ErrorKind::Unsupported, "unknown primitive");
}

SparseMatrix term_operator(const Term& term, const std::vector<ModeDecl>& modes,
                           const BasisMap& bases, const QuadratureOptions& quadrature) {
  std::vector<SparseMatrix> per_mode;
  per_mode.reserve(modes.size());
  for (const ModeDecl& m : modes) {
    const ModeBasis& basis = basis_for(bases, m.name);
    std::optional<Matrix> chain;
    for (const Factor& f : term.factors) {
      if (f.mode != m.name) continue;
      Matrix p = primitive_matrix(f.op, basis, quadrature);
      chain = chain ? Matrix(*chain * p) : std::move(p);
    }
    per_mode.push_back(chain ? to_sparse(*chain)
                             : sparse_identity(static_cast<Eigen::Index>(mode_dimension(basis))));
  }
  return kron_all(per_mode);
}

SparseMatrix materialize_sparse(const OperatorExpr& expr, const BasisMap& bases, double t,
                                const QuadratureOptions& quadrature) {
  std::size_t dim = 1;
  for (std::size_t d : layout_dims(expr, bases)) dim *= d;
  SparseMatrix out(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  for (const Term& term : expr.terms()) {
    const cplx c = term.coefficient(t);
    if (c == 0.0) continue;
    out += c * term_operator(term, expr.modes(), bases, quadrature);
  }
  out.makeCompressed();
  return out;
}

Matrix materialize(const OperatorExpr& expr, const BasisMap& bases, double t,
                   const QuadratureOptions& quadrature) {
  return Matrix(materialize_sparse(expr, bases, t, quadrature));
}

HermitianSplit hermitian_split(const Matrix& a) {
  if (a.rows() != a.cols()) throw Error(ErrorKind::DimensionMismatch, "hermitian_split: non-square");
  return {0.5 * (a + a.adjoint()), (0.5 * kI) * (a - a.adjoint())};
}

Generator Generator::from_terms(std::size_t dim, std::vector<HermitianTerm> a1_terms,
                                std::vector<HermitianTerm> a2_terms,
                                std::optional<OperatorExpr> source) {
  for (const auto* list : {&a1_terms, &a2_terms})
    for (const HermitianTerm& h : *list)
      if (h.matrix.rows() != static_cast<Eigen::Index>(dim) || h.matrix.cols() != h.matrix.rows())
        throw Error(ErrorKind::DimensionMismatch, "generator term has the wrong dimension");
  Generator g;
  g.dim_ = dim;
  g.separable_ = true;
  g.a1_terms_ = std::move(a1_terms);
  g.a2_terms_ = std::move(a2_terms);
  g.source_ = std::move(source);
  return g;
}

Generator Generator::from_function(std::size_t dim, MatrixProvider a) {
  Generator g;
  g.dim_ = dim;
  g.a1_fn_ = [a](double t) { return hermitian_split(a(t)).a1; };
  g.a2_fn_ = [a](double t) { return hermitian_split(a(t)).a2; };
  return g;
}

Generator Generator::from_hermitian(std::size_t dim, MatrixProvider h) {
  Generator g;
  g.dim_ = dim;
  g.a1_fn_ = std::move(h);
  g.hermitian_ = true;
  const auto n = static_cast<Eigen::Index>(dim);
  g.a2_fn_ = [n](double) { return Matrix::Zero(n, n).eval(); };
  return g;
}

bool Generator::has_dissipation() const noexcept {
  if (!separable_) return !hermitian_;
  return std::any_of(a2_terms_.begin(), a2_terms_.end(),
                     [](const HermitianTerm& h) { return !h.coefficient.is_zero() && h.matrix.nonZeros() > 0; });
}

namespace {

Matrix sum_terms(const std::vector<HermitianTerm>& terms, std::size_t dim, double t) {
  const auto n = static_cast<Eigen::Index>(dim);
  Matrix out = Matrix::Zero(n, n);
  for (const HermitianTerm& h : terms) {
    const double c = h.coefficient(t).real();
    if (c != 0.0) out += c * Matrix(h.matrix);
  }
  return out;
}

}  // namespace

Matrix Generator::a1(double t) const {
  return separable_ ? sum_terms(a1_terms_, dim_, t) : a1_fn_(t);
}

Matrix Generator::a2(double t) const {
  return separable_ ? sum_terms(a2_terms_, dim_, t) : a2_fn_(t);
}

Matrix Generator::a(double t) const { return a1(t) - kI * a2(t); }

Generator split_generator(const OperatorExpr& expr, const BasisMap& bases,
                          const QuadratureOptions& quadrature) {
  std::size_t dim = 1;
  for (std::size_t d : layout_dims(expr, bases)) dim *= d;
  const auto n = static_cast<Eigen::Index>(dim);

  // Constant-coefficient terms are folded into one operator before splitting.
  SparseMatrix constant_part(n, n);
  std::vector<std::pair<TimeFunction, SparseMatrix>> timed;
  for (const Term& term : expr.terms()) {
    if (term.coefficient.is_zero()) continue;
    SparseMatrix m = term_operator(term, expr.modes(), bases, quadrature);
    if (term.coefficient.is_constant())
      constant_part += term.coefficient(0.0) * m;
    else
      timed.emplace_back(term.coefficient, std::move(m));
  }
  if (constant_part.nonZeros() > 0) timed.emplace_back(TimeFunction(1.0), constant_part);

  // c M with c = a + ib splits into A1 += a Hm + b Km and A2 += a Km - b Hm,
  // where Hm = (M + M^dag)/2 and Km = i(M - M^dag)/2.
  std::vector<HermitianTerm> a1_terms, a2_terms;
  // Entries below rounding of the parent operator are dropped, so a Hermitian M leaves no Km.
  auto push = [](std::vector<HermitianTerm>& list, TimeFunction c, const SparseMatrix& m,
                 double scale) {
    if (c.is_zero()) return;
    SparseMatrix pruned = m.pruned(1.0, 1e-14 * scale);
    if (pruned.nonZeros() == 0) return;
    pruned.makeCompressed();
    list.push_back({std::move(c), std::move(pruned)});
  };
  for (const auto& [c, m] : timed) {
    const SparseMatrix adj = m.adjoint();
    const SparseMatrix hm = 0.5 * (m + adj);
    const SparseMatrix km = (0.5 * kI) * (m - adj);
    const TimeFunction re = c.real_part();
    const TimeFunction im = c.imag_part();
    const double scale = m.nonZeros() ? m.coeffs().abs().maxCoeff() : 0.0;
    push(a1_terms, re, hm, scale);
    push(a1_terms, im, km, scale);
    push(a2_terms, re, km, scale);
    push(a2_terms, -im, hm, scale);
  }
  return Generator::from_terms(dim, std::move(a1_terms), std::move(a2_terms), expr);
}

Generator hamiltonian_generator(const OperatorExpr& expr, const BasisMap& bases,
                                const QuadratureOptions& quadrature) {
  Generator g = split_generator(expr, bases, quadrature);
  if (!g.a2_terms().empty())
    throw Error(ErrorKind::InvalidArgument, "expression is not Hermitian");
  return g;
}

}  // namespace clockdil
