#include "clockdil/pde_frontend.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>
#include <fmt/format.h>

#include "clockdil/sparse.hpp"

namespace clockdil {
namespace {

std::vector<ModeDecl> hermite_modes(const std::vector<std::string>& names) {
  std::vector<ModeDecl> out;
  for (const auto& n : names) out.push_back({n, ModeKind::Hermite});
  return out;
}

std::vector<std::string> axis_names(std::size_t dim) {
  std::vector<std::string> out;
  for (std::size_t j = 0; j < dim; ++j) out.push_back(axis_mode(j));
  return out;
}

bool is_multiplication(const PrimitiveOp& op) {
  switch (op.kind()) {
    case PrimitiveKind::Identity:
    case PrimitiveKind::Position:
    case PrimitiveKind::PositionPower:
    case PrimitiveKind::MultiplicationBy: return true;
    default: return false;
  }
}

bool is_polynomial(const PrimitiveOp& op) {
  return op.kind() != PrimitiveKind::MultiplicationBy || op.polynomial().has_value();
}

cplx evaluate_factor(const PrimitiveOp& op, double x) {
  switch (op.kind()) {
    case PrimitiveKind::Identity: return 1.0;
    case PrimitiveKind::Position: return x;
    case PrimitiveKind::PositionPower: return std::pow(x, static_cast<double>(op.power()));
    case PrimitiveKind::MultiplicationBy: return op.function()(x);
    default: throw Error(ErrorKind::InvalidArgument, "coefficient factor is not a multiplication");
  }
}

// scale * sum_terms lambda(t) (before) f(x) (after), same-mode factors kept in that order.
OperatorExpr sandwich(std::vector<ModeDecl> modes, const std::vector<std::string>& names,
                      const SeparableFunction& f, const std::vector<Factor>& before,
                      const std::vector<Factor>& after, const TimeFunction& scale) {
  OperatorExpr e(std::move(modes));
  for (const SeparableTerm& term : f) {
    std::vector<Factor> factors = before;
    for (const auto& [axis, op] : term.space) {
      if (axis >= names.size())
        throw Error(ErrorKind::InvalidArgument, fmt::format("coefficient uses axis {} of {}", axis, names.size()));
      if (!is_multiplication(op))
        throw Error(ErrorKind::InvalidArgument, "coefficient factors must be multiplication operators");
      factors.push_back(on(names[axis], op));
    }
    factors.insert(factors.end(), after.begin(), after.end());
    e.add(scale * term.time, std::move(factors));
  }
  return e;
}

cplx ipow(unsigned k) {
  static const cplx cycle[4] = {1.0, kI, -1.0, -kI};
  return cycle[k % 4];
}

OperatorExpr aux_projector(int r, int c) {
  Matrix m = Matrix::Zero(2, 2);
  m(r, c) = 1.0;
  OperatorExpr e({{kQubitMode, ModeKind::Finite}});
  e.add(1.0, {on(kQubitMode, PrimitiveOp::finite(m))});
  return e;
}

TimeFunction derivative(const TimeFunction& f) {
  if (const auto& c = f.coefficients()) {
    std::vector<cplx> d;
    for (std::size_t k = 1; k < c->size(); ++k) d.push_back(static_cast<double>(k) * (*c)[k]);
    return TimeFunction::polynomial(std::move(d));
  }
  return TimeFunction::general([f](double t) {
    const double h = 1e-5 * std::max(1.0, std::abs(t));
    return (f(t + h) - f(t - h)) / (2.0 * h);
  });
}

}  // namespace

SeparableFunction in_time(TimeFunction f) { return {SeparableTerm{std::move(f), {}}}; }

SeparableTerm polynomial_in(std::size_t axis, std::vector<cplx> coefficients, TimeFunction time) {
  return {std::move(time), {{axis, PrimitiveOp::multiplication_polynomial(std::move(coefficients))}}};
}

cplx evaluate(const SeparableFunction& f, double t, const std::vector<double>& point) {
  cplx sum = 0.0;
  for (const SeparableTerm& term : f) {
    cplx v = term.time(t);
    for (const auto& [axis, op] : term.space) {
      if (axis >= point.size()) throw Error(ErrorKind::DimensionMismatch, "evaluation point too short");
      v *= evaluate_factor(op, point[axis]);
    }
    sum += v;
  }
  return sum;
}

std::string axis_mode(std::size_t j) { return fmt::format("x{}", j + 1); }
std::string chi_mode(std::size_t j) { return fmt::format("chi{}", j + 1); }
std::string level_mode(std::size_t n) { return fmt::format("q{}", n + 1); }

OperatorExpr linear_pde_generator(const LinearPdeSpec& spec) {
  if (spec.dim == 0) throw Error(ErrorKind::InvalidArgument, "PDE needs at least one spatial axis");
  const auto names = axis_names(spec.dim);
  const auto modes = hermite_modes(names);
  OperatorExpr a(modes);
  for (const DerivativeTerm& d : spec.derivatives) {
    if (d.second_axis && *d.second_axis != d.axis)
      throw Error(ErrorKind::Unsupported,
                  fmt::format("mixed derivative d/dx{} d/dx{} is not supported", d.axis + 1, *d.second_axis + 1));
    if (d.axis >= spec.dim)
      throw Error(ErrorKind::InvalidArgument, fmt::format("derivative on axis {} of {}", d.axis + 1, spec.dim));
    if (d.order == 0) throw Error(ErrorKind::InvalidArgument, "derivative order must be positive");
    a = a + sandwich(modes, names, d.coefficient, {},
                     {on(names[d.axis], PrimitiveOp::momentum_power(d.order))}, -ipow(d.order + 1));
  }
  a = a + sandwich(modes, names, spec.potential, {}, {}, -kI);
  return a;
}

std::vector<std::string> stability_warnings(const LinearPdeSpec& spec, const std::vector<double>& times,
                                            const std::vector<double>& points) {
  std::vector<std::string> out;
  for (const DerivativeTerm& d : spec.derivatives) {
    if (d.order % 2 != 0) continue;
    const double want = (d.order / 2) % 2 == 0 ? 1.0 : -1.0;
    for (double t : times)
      for (double x : points) {
        const std::vector<double> p(spec.dim, x);
        const double v = evaluate(d.coefficient, t, p).real();
        if (v * want < 0.0)
          out.push_back(fmt::format("a_{{{},{}}}(t={}, x={}) = {:.4g} has the ill-posed sign", d.order,
                                    d.axis + 1, t, x, v));
      }
  }
  return out;
}

DissipationReport dissipation_report(const Generator& gen, const std::vector<double>& times) {
  DissipationReport r;
  r.min_a2 = INFINITY;
  r.max_a2 = -INFINITY;
  for (double t : times) {
    const Matrix a2 = gen.a2(t);
    const Eigen::SelfAdjointEigenSolver<Matrix> es(a2, Eigen::EigenvaluesOnly);
    r.min_a2 = std::min(r.min_a2, es.eigenvalues().minCoeff());
    r.max_a2 = std::max(r.max_a2, es.eigenvalues().maxCoeff());
  }
  const double scale = std::max({1.0, std::abs(r.min_a2), std::abs(r.max_a2)});
  r.anti_dissipative = r.min_a2 < -1e-10 * scale;
  return r;
}

OperatorExpr convection_generator(const std::vector<TimeFunction>& k) {
  LinearPdeSpec spec;
  spec.dim = k.size();
  for (std::size_t j = 0; j < k.size(); ++j) spec.derivatives.push_back({1, j, std::nullopt, in_time(k[j])});
  return linear_pde_generator(spec);
}

OperatorExpr heat_generator(std::size_t dim, const std::vector<DiffusionEntry>& diffusion,
                            const SeparableFunction& potential) {
  if (dim == 0) throw Error(ErrorKind::InvalidArgument, "PDE needs at least one spatial axis");
  const auto names = axis_names(dim);
  const auto modes = hermite_modes(names);
  OperatorExpr a(modes);
  for (const DiffusionEntry& d : diffusion) {
    if (d.i >= dim || d.j >= dim) throw Error(ErrorKind::InvalidArgument, "diffusion index out of range");
    if (d.i != d.j)
      for (const SeparableTerm& term : d.value)
        if (!term.space.empty())
          throw Error(ErrorKind::Unsupported, "off-diagonal diffusion must be constant in space");
    a = a + sandwich(modes, names, d.value, {on(names[d.i], PrimitiveOp::momentum())},
                     {on(names[d.j], PrimitiveOp::momentum())}, -kI);
  }
  a = a + sandwich(modes, names, potential, {}, {}, -kI);
  return a;
}

OperatorExpr fokker_planck_expr(TimeFunction g, TimeFunction beta) {
  // dq/dt = g q + g x q' + beta q'' with d/dx = i p gives A = i g - g x p - i beta p^2.
  const std::string x = axis_mode(0);
  OperatorExpr a(hermite_modes({x}));
  a.add(kI * g, {});
  a.add(-g, {on(x, PrimitiveOp::position()), on(x, PrimitiveOp::momentum())});
  a.add(-kI * beta, {on(x, PrimitiveOp::momentum_power(2))});
  return a;
}

Generator fokker_planck_generator(TimeFunction g, TimeFunction beta, const HermiteBasis& basis,
                                  const std::vector<double>& sample_times) {
  for (double t : sample_times)
    if (beta(t).real() < 0.0 || std::abs(beta(t).imag()) > 0.0)
      throw Error(ErrorKind::NotPositive, fmt::format("diffusion beta({}) = {} is not nonnegative", t, beta(t).real()));
  return split_generator(fokker_planck_expr(std::move(g), std::move(beta)), {{axis_mode(0), basis}});
}

SecondOrderSpec wave_equation(const std::vector<SeparableFunction>& a, const SeparableFunction& potential) {
  // i A = sum a_j p_j^2 + V
  const auto names = axis_names(a.size());
  const auto modes = hermite_modes(names);
  OperatorExpr stiff(modes);
  for (std::size_t j = 0; j < a.size(); ++j)
    stiff = stiff + sandwich(modes, names, a[j], {}, {on(names[j], PrimitiveOp::momentum_power(2))}, -kI);
  stiff = stiff + sandwich(modes, names, potential, {}, {}, -kI);
  return {std::nullopt, stiff};
}

OperatorExpr second_order_dilation(const SecondOrderSpec& spec) {
  const OperatorExpr& a = spec.stiffness;
  OperatorExpr v = TimeFunction(kI) * (OperatorExpr::identity(a.modes()) * aux_projector(0, 1));
  v = v + a * aux_projector(1, 0);
  if (spec.damping) v = v + TimeFunction(-kI) * (*spec.damping * aux_projector(1, 1));
  return v;
}

InhomogeneousDilation inhomogeneous_dilation(const OperatorExpr& a, const TimeFunction& g1,
                                             const Vector& u0, const Vector& g2_state) {
  if (u0.size() != g2_state.size())
    throw Error(ErrorKind::DimensionMismatch, "source state does not match the initial state");
  InhomogeneousDilation out;
  out.generator = a * aux_projector(0, 0);
  out.generator = out.generator + TimeFunction(kI) * (OperatorExpr::identity(a.modes()) * aux_projector(0, 1));
  const TimeFunction rate = derivative(g1);
  if (!rate.is_zero())
    out.generator = out.generator + (TimeFunction(kI) * rate) * (OperatorExpr::identity(a.modes()) * aux_projector(1, 1));
  const cplx f0 = std::exp(g1(0.0));
  out.initial_state = Vector::Zero(2 * u0.size());
  for (Eigen::Index i = 0; i < u0.size(); ++i) {
    out.initial_state(2 * i) = u0(i);
    out.initial_state(2 * i + 1) = f0 * g2_state(i);
  }
  return out;
}

Vector aux_component(const Vector& y, int q) {
  if (y.size() % 2 != 0) throw Error(ErrorKind::DimensionMismatch, "state has no aux factor");
  Vector out(y.size() / 2);
  for (Eigen::Index i = 0; i < out.size(); ++i) out(i) = y(2 * i + q);
  return out;
}

Matrix aux_block(const Matrix& rho, int q) {
  if (rho.rows() % 2 != 0 || rho.rows() != rho.cols())
    throw Error(ErrorKind::DimensionMismatch, "state has no aux factor");
  const Eigen::Index n = rho.rows() / 2;
  Matrix out(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) out(i, j) = rho(2 * i + q, 2 * j + q);
  return out;
}

OperatorExpr nonlinear_ode_levelset(const std::vector<SeparableFunction>& rhs, bool require_polynomial) {
  if (rhs.empty()) throw Error(ErrorKind::InvalidArgument, "level set needs at least one equation");
  std::vector<std::string> names;
  for (std::size_t n = 0; n < rhs.size(); ++n) names.push_back(level_mode(n));
  const auto modes = hermite_modes(names);
  OperatorExpr a(modes);
  for (std::size_t n = 0; n < rhs.size(); ++n) {
    if (require_polynomial)
      for (const SeparableTerm& term : rhs[n])
        for (const auto& [axis, op] : term.space)
          if (!is_polynomial(op))
            throw Error(ErrorKind::Unsupported,
                        fmt::format("F_{} is not polynomial in q; Galerkin materialization needs polynomials", n + 1));
    a = a + sandwich(modes, names, rhs[n], {on(names[n], PrimitiveOp::momentum())}, {}, 1.0);
  }
  return a;
}

Vector levelset_initial_state(const std::vector<HermiteBasis>& bases, const std::vector<double>& gamma0,
                              const DeltaProfile& profile) {
  if (bases.size() != gamma0.size() || bases.empty())
    throw Error(ErrorKind::DimensionMismatch, "one basis and one initial value per equation");
  Matrix state = Matrix::Ones(1, 1);
  for (std::size_t n = 0; n < bases.size(); ++n) {
    DeltaProfile p = profile;
    p.bias = gamma0[n];
    QuadratureOptions q{.kind = QuadratureKind::Panels,
                        .breakpoints = {gamma0[n] - p.support(), gamma0[n], gamma0[n] + p.support()}};
    const StateProjection proj = project_state([p](double x) { return cplx(p(x)); }, bases[n], std::nullopt, q);
    state = kron(state, Matrix(proj.coefficients));
  }
  return state.col(0).normalized();
}

double density_peak(const Matrix& rho, const HermiteBasis& basis, double lo, double hi, std::size_t points) {
  if (static_cast<std::size_t>(rho.rows()) != basis.size())
    throw Error(ErrorKind::DimensionMismatch, "density does not match the basis");
  if (points < 2 || !(lo < hi)) throw Error(ErrorKind::InvalidArgument, "bad readout grid");
  double best = lo, best_value = -INFINITY;
  for (std::size_t k = 0; k < points; ++k) {
    const double x = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(points - 1);
    const Vector phi = basis.column(x).cast<cplx>();
    const double v = phi.dot(rho * phi).real();
    if (v > best_value) {
      best_value = v;
      best = x;
    }
  }
  return best;
}

OperatorExpr hyperbolic_levelset_generator(const std::vector<SeparableFunction>& flux, const SeparableFunction& q,
                                           std::size_t dim) {
  if (dim == 0 || flux.size() != dim)
    throw Error(ErrorKind::InvalidArgument, "one flux component per spatial axis");
  auto names = axis_names(dim);
  names.push_back("chi");
  const auto modes = hermite_modes(names);
  OperatorExpr a(modes);
  for (std::size_t j = 0; j < dim; ++j)
    a = a + sandwich(modes, names, flux[j], {}, {on(names[j], PrimitiveOp::momentum())}, 1.0);
  a = a + sandwich(modes, names, q, {}, {on("chi", PrimitiveOp::momentum())}, 1.0);
  return a;
}

OperatorExpr hamilton_jacobi_generator(const SeparableFunction& h, std::size_t dim) {
  if (dim == 0) throw Error(ErrorKind::InvalidArgument, "HJ needs at least one spatial axis");
  auto names = axis_names(dim);
  for (std::size_t j = 0; j < dim; ++j) names.push_back(chi_mode(j));
  const auto modes = hermite_modes(names);
  OperatorExpr a(modes);
  for (std::size_t j = 0; j < dim; ++j) {
    const Factor p = on(names[j], PrimitiveOp::momentum());
    const Factor zeta = on(names[dim + j], PrimitiveOp::momentum());
    a = a + sandwich(modes, names, h, {zeta}, {p}, kI);
    a = a + sandwich(modes, names, h, {p}, {zeta}, -kI);
  }
  return a;
}

void require_simulable(LevelSetKind kind, std::size_t dim) {
  switch (kind) {
    case LevelSetKind::NonlinearOde: return;
    case LevelSetKind::Hyperbolic:
      if (dim == 1) return;
      throw Error(ErrorKind::Unsupported, fmt::format("hyperbolic level sets simulate only in 1D, got {}", dim));
    case LevelSetKind::HamiltonJacobi:
      throw Error(ErrorKind::Unsupported, "Hamilton-Jacobi level sets are construction-only");
  }
}

}  // namespace clockdil
