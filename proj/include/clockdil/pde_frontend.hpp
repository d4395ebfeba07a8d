#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "clockdil/delta_profile.hpp"
#include "clockdil/galerkin_basis.hpp"
#include "clockdil/operator_algebra.hpp"
#include "clockdil/types.hpp"

namespace clockdil {

// lambda(t) times a product of one-axis multiplication operators. Axes index the
// builder's auxiliary variables (x_j, then chi for level sets).
struct SeparableTerm {
  TimeFunction time = 1.0;
  std::vector<std::pair<std::size_t, PrimitiveOp>> space{};
};

// Coefficient functions are sums of separable products.
using SeparableFunction = std::vector<SeparableTerm>;

SeparableFunction in_time(TimeFunction f);
// time(t) * sum_k c_k x_axis^k
SeparableTerm polynomial_in(std::size_t axis, std::vector<cplx> coefficients, TimeFunction time = 1.0);

cplx evaluate(const SeparableFunction& f, double t, const std::vector<double>& point);

std::string axis_mode(std::size_t j);   // "x1", "x2", ...
std::string chi_mode(std::size_t j);    // "chi1", ...
std::string level_mode(std::size_t n);  // "q1", ...
inline constexpr const char* kQubitMode = "aux";

struct DerivativeTerm {
  unsigned order = 1;
  std::size_t axis = 0;
  std::optional<std::size_t> second_axis{};  // mixed derivatives are rejected
  SeparableFunction coefficient{};
};

// f(t, x) = exp(g1(t)) g2(x)
struct SeparableSource {
  TimeFunction g1 = 0.0;
  ComplexFunction g2{};
};

// du/dt + sum a_{k,j} d^k u / dx_j^k + b u = f
struct LinearPdeSpec {
  std::size_t dim = 1;
  std::vector<DerivativeTerm> derivatives{};
  SeparableFunction potential{};
  std::optional<SeparableSource> source{};
};

// A = -sum a_{k,j}(t, x) i^(k+1) p_j^k - i b(t, x), coefficient left of the momentum power.
// The source is not part of A; see inhomogeneous_dilation.
OperatorExpr linear_pde_generator(const LinearPdeSpec& spec);

// sign(a_{2k,j}) should be (-1)^k. One message per violating (term, t, x) sample.
std::vector<std::string> stability_warnings(const LinearPdeSpec& spec, const std::vector<double>& times,
                                            const std::vector<double>& points);

struct DissipationReport {
  double min_a2 = 0.0;
  double max_a2 = 0.0;
  bool anti_dissipative = false;  // A2 has a negative eigenvalue at some sampled t
};

DissipationReport dissipation_report(const Generator& gen, const std::vector<double>& times);

// d/dt u = k(t) . grad u up to sign: a_{1,j} = k_j.
OperatorExpr convection_generator(const std::vector<TimeFunction>& k);

struct DiffusionEntry {
  std::size_t i = 0;
  std::size_t j = 0;
  SeparableFunction value{};
};

// du/dt = sum d_i(D_ij d_j u) - V u, i.e. A = -i(sum p_i D_ij p_j + V).
// Off-diagonal entries must not depend on x.
OperatorExpr heat_generator(std::size_t dim, const std::vector<DiffusionEntry>& diffusion,
                            const SeparableFunction& potential = {});

// dq/dt = g(t) d/dx(x q) + beta(t) d^2 q/dx^2 on mode x1.
OperatorExpr fokker_planck_expr(TimeFunction g, TimeFunction beta);
// Throws NotPositive when beta is negative at a sampled time.
Generator fokker_planck_generator(TimeFunction g, TimeFunction beta, const HermiteBasis& basis,
                                  const std::vector<double>& sample_times = {0.0, 0.25, 0.5, 0.75, 1.0});

// u'' + Gamma u' + i A u = 0
struct SecondOrderSpec {
  std::optional<OperatorExpr> damping{};
  OperatorExpr stiffness{};
};

// u'' = sum a_j d_j^2 u - V u as a SecondOrderSpec with Gamma = 0.
SecondOrderSpec wave_equation(const std::vector<SeparableFunction>& a, const SeparableFunction& potential = {});

// V = [[0, iI], [A, -i Gamma]] on system (x) aux, acting on u (x) |0> + u' (x) |1>.
OperatorExpr second_order_dilation(const SecondOrderSpec& spec);

struct InhomogeneousDilation {
  OperatorExpr generator;  // B = [[A, iI], [0, i g1']]
  Vector initial_state;    // u0 (x) |0> + exp(g1(0)) g2 (x) |1>, not normalized
};

InhomogeneousDilation inhomogeneous_dilation(const OperatorExpr& a, const TimeFunction& g1,
                                             const Vector& u0, const Vector& g2_state);

// Block of a system (x) aux state on aux level q. Not renormalized.
Vector aux_component(const Vector& y, int q);
Matrix aux_block(const Matrix& rho, int q);

// A = sum_n Q_n F_n(t, q) with Q_n the momentum of mode q_n. Throws Unsupported for
// non-polynomial F when require_polynomial is set.
OperatorExpr nonlinear_ode_levelset(const std::vector<SeparableFunction>& rhs, bool require_polynomial = true);

// prod_n delta_w(q_n - gamma_n) projected on each basis, normalized.
Vector levelset_initial_state(const std::vector<HermiteBasis>& bases, const std::vector<double>& gamma0,
                              const DeltaProfile& profile);

// argmax over a grid in [lo, hi] of <q|rho|q> for a single mode.
double density_peak(const Matrix& rho, const HermiteBasis& basis, double lo, double hi, std::size_t points = 2001);

// A = sum_j F_j(t, x, chi) p_j + Q(t, x, chi) zeta. Axes 0..D-1 are x_j, axis D is chi.
OperatorExpr hyperbolic_levelset_generator(const std::vector<SeparableFunction>& flux, const SeparableFunction& q,
                                           std::size_t dim);

// i sum_j (zeta_j H p_j - p_j H zeta_j). Axes 0..D-1 are x_j, D..2D-1 are chi_j.
OperatorExpr hamilton_jacobi_generator(const SeparableFunction& h, std::size_t dim);

enum class LevelSetKind { NonlinearOde, Hyperbolic, HamiltonJacobi };

// Throws Unsupported where only construction is provided.
void require_simulable(LevelSetKind kind, std::size_t dim);

}  // namespace clockdil
