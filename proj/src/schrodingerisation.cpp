#include "clockdil/schrodingerisation.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "clockdil/sparse.hpp"

namespace clockdil {
namespace {

// The eta factor of a (eta, system) density moved to the xi representation.
Matrix to_xi(const Matrix& rho, std::size_t ne) {
  const auto n = static_cast<Eigen::Index>(ne);
  const Eigen::Index ns = rho.rows() / n;
  const Vector d = fourier_phases(ne, FourierDirection::Inverse);
  Vector full(rho.rows());
  for (Eigen::Index k = 0; k < n; ++k) full.segment(k * ns, ns).setConstant(d(k));
  return full.asDiagonal() * rho * full.conjugate().asDiagonal();
}

// sum_{nm} F_mn rho_{(n,.),(m,.)}: partial trace of (F (x) I) rho over the eta factor.
Matrix contract_eta(const Matrix& rho_xi, const Matrix& f, std::size_t ne) {
  const auto n = static_cast<Eigen::Index>(ne);
  const Eigen::Index ns = rho_xi.rows() / n;
  Matrix out = Matrix::Zero(ns, ns);
  for (Eigen::Index a = 0; a < n; ++a)
    for (Eigen::Index b = 0; b < n; ++b) {
      const cplx w = f(b, a);
      if (w != cplx(0.0)) out += w * rho_xi.block(a * ns, b * ns, ns, ns);
    }
  return out;
}

template <class F>
auto stage(const char* name, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Error& e) {
    throw Error(e.kind(), fmt::format("{}: {}", name, e.what()));
  }
}

}  // namespace

MatrixProvider extend_generator(const Generator& gen, const EtaMode& eta) {
  const Matrix x = position_matrix(eta.eta_basis());
  const auto ne = static_cast<Eigen::Index>(eta.size);
  return [gen, x, ne](double t) {
    return Matrix(kron(x, gen.a2(t)) + kron(Matrix::Identity(ne, ne), gen.a1(t)));
  };
}

XiState xi_state(const EtaMode& eta) {
  const HermiteBasis xb = eta.xi_basis();
  const StateProjection p = project_state([](double xi) { return cplx(std::exp(-std::abs(xi))); }, xb, 1.0);
  if (p.leakage > 0.05)
    throw Error(ErrorKind::UnderResolved,
                fmt::format("under-resolved eta mode: leakage {:.3g} of exp(-|xi|)", p.leakage));
  XiState out;
  out.xi_coefficients = p.coefficients;
  out.eta_coefficients = fourier_conjugate(p.coefficients, xb, FourierDirection::Forward).coefficients;
  out.leakage = p.leakage;
  return out;
}

Recovered recover(const Matrix& rho, const EtaMode& eta, const RecoverySpec& spec) {
  const auto ne = static_cast<Eigen::Index>(eta.size);
  if (rho.rows() != rho.cols() || rho.rows() % ne != 0)
    throw Error(ErrorKind::DimensionMismatch, "recover: state does not factor as eta (x) system");
  const HermiteBasis xb = eta.xi_basis();
  const Matrix rho_xi = to_xi(rho, eta.size);
  const double total = rho.trace().real();
  Matrix f;
  if (spec.mode == RecoveryMode::ProjectAndNormalize) {
    if (!(spec.a < spec.b)) throw Error(ErrorKind::InvalidArgument, "recovery interval needs a < b");
    f = interval_projection(spec.a, spec.b, xb).matrix;
  } else {
    if (!(spec.xi0 > 0.0)) throw Error(ErrorKind::InvalidArgument, "point slice needs xi0 > 0");
    const Vector v = xb.column(spec.xi0).normalized().cast<cplx>();
    f = v * v.adjoint();
  }
  Recovered out;
  out.state = contract_eta(rho_xi, f, eta.size);
  out.state = 0.5 * (out.state + out.state.adjoint()).eval();
  out.probability = out.state.trace().real() / total;
  if (!(out.probability >= 1e-6))
    throw Error(ErrorKind::RecoveryFailure,
                fmt::format("recovery success probability {:.3g} below 1e-6", out.probability));
  out.state /= out.state.trace().real();
  return out;
}

Recovered recover(const Vector& psi, const EtaMode& eta, const RecoverySpec& spec) {
  return recover(Matrix(psi * psi.adjoint()), eta, spec);
}

double expectation(const Matrix& rho, const Matrix& op) {
  if (rho.rows() != op.rows() || op.rows() != op.cols())
    throw Error(ErrorKind::DimensionMismatch, "observable does not match the state");
  return (rho * op).trace().real();
}

PipelineResult full_pipeline(const Generator& gen, const Vector& u0, const std::vector<double>& times,
                             const PipelineConfig& config,
                             const std::vector<Observable>& observables) {
  if (static_cast<std::size_t>(u0.size()) != gen.dim())
    throw Error(ErrorKind::DimensionMismatch, "initial state does not match the generator");
  if (!std::is_sorted(times.begin(), times.end()) || (!times.empty() && times.front() < 0.0))
    throw Error(ErrorKind::InvalidArgument, "output times must be nonnegative and increasing");
  for (const auto& o : observables)
    if (static_cast<std::size_t>(o.op.rows()) != gen.dim())
      throw Error(ErrorKind::DimensionMismatch, fmt::format("observable {} has the wrong size", o.name));

  if (const auto* g = std::get_if<GridClock>(&config.clock); g && !times.empty() && times.back() > g->hi())
    throw Error(ErrorKind::WindowExceeded,
                fmt::format("clock window exceeded: t = {} beyond s_max = {}", times.back(), g->hi()));

  PipelineResult result;
  Vector rest = u0;
  if (config.eta) {
    const XiState xi = stage("eta state", [&] { return xi_state(*config.eta); });
    result.xi_leakage = xi.leakage;
    rest = kron(Matrix(xi.eta_coefficients), Matrix(u0)).col(0);
  }
  rest.normalize();

  DilationOptions dopts;
  if (config.eta) dopts.eta = config.eta->eta_basis();
  dopts.dense_cap = config.dense_cap;
  dopts.quadrature = config.quadrature;
  const DilatedSystem sys = stage("dilation", [&] { return build_dilated(gen, config.clock, dopts); });
  result.dimension = sys.dim();
  result.hermitian_defect = sys.hermitian_defect;

  const PreparedClock clock =
      stage("clock", [&] { return prepare_clock(config.clock, config.clock_state, config.prepare); });
  result.clock_leakage = clock.leakage;
  result.clock_second_moment = clock.second_moment;

  const Propagator prop = stage("evolution", [&] { return Propagator(sys, config.evolve); });
  std::vector<WeightedVector> ensemble = initial_ensemble(clock, rest);
  double now = 0.0;
  for (double t : times) {
    ensemble = stage("evolution", [&] { return evolve_ensemble(prop, ensemble, t - now); });
    now = t;
    PipelineRecord rec;
    rec.t = t;
    rec.dilated_norm = 0.0;
    for (const auto& e : ensemble) rec.dilated_norm += e.weight * e.vector.norm();
    const Matrix reduced = trace_out_clock(ensemble, sys.clock_dim());
    if (config.eta) {
      const Recovered r = stage("recovery", [&] { return recover(reduced, *config.eta, config.recovery); });
      rec.state = r.state;
      rec.success_probability = r.probability;
    } else {
      rec.state = reduced;
    }
    for (const auto& o : observables) rec.values.push_back(expectation(rec.state, o.op));
    result.records.push_back(std::move(rec));
  }
  return result;
}

}  // namespace clockdil
