#include "clockdil/reference_oracles.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "clockdil/krylov.hpp"
#include "clockdil/quadrature.hpp"

namespace clockdil {
namespace {

Matrix step_exponential(const Matrix& a, double dt) {
  if (hermitian_defect(a) <= 1e-14) return SpectralPropagator(0.5 * (a + a.adjoint())).unitary(dt);
  return dense_expm(a, dt);
}

}  // namespace

std::size_t default_oracle_steps(const MatrixProvider& h, double t0, double t1) {
  double max_entry = 0.0;
  for (int k = 0; k <= 8; ++k) {
    const Matrix m = h(t0 + (t1 - t0) * k / 8.0);
    if (m.size()) max_entry = std::max(max_entry, m.cwiseAbs().maxCoeff());
  }
  const double wanted = std::ceil(100.0 * std::abs(t1 - t0) * max_entry);
  return std::max<std::size_t>(1000, static_cast<std::size_t>(wanted));
}

Matrix time_ordered_propagator(const MatrixProvider& a, double t0, double t1, std::size_t steps) {
  if (steps == 0) steps = default_oracle_steps(a, t0, t1);
  const double dt = (t1 - t0) / static_cast<double>(steps);
  Matrix u = Matrix::Identity(a(t0).rows(), a(t0).cols());
  if (t1 == t0) return u;
  for (std::size_t k = 0; k < steps; ++k) {
    const double mid = t0 + (static_cast<double>(k) + 0.5) * dt;
    u = step_exponential(a(mid), dt) * u;
  }
  return u;
}

Vector time_ordered_apply(const MatrixProvider& a, const Vector& v, double t0, double t1,
                          std::size_t steps) {
  if (t1 == t0) return v;
  if (steps == 0) steps = default_oracle_steps(a, t0, t1);
  const double dt = (t1 - t0) / static_cast<double>(steps);
  Vector out = v;
  for (std::size_t k = 0; k < steps; ++k) {
    const double mid = t0 + (static_cast<double>(k) + 0.5) * dt;
    out = step_exponential(a(mid), dt) * out;
  }
  return out;
}

Matrix commuting_exact(const Matrix& h, const RealFunction& g, double t) {
  const double area = t == 0.0 ? 0.0 : integrate(g, 0.0, t);
  return SpectralPropagator(h).unitary(area);
}

namespace {

ErrorConstants constants_at(const MatrixProvider& h, const Vector& y0, double t, std::size_t steps) {
  const Matrix u = time_ordered_propagator(h, 0.0, t, steps);
  const Vector yt = u * y0;
  const Matrix ht = h(t);
  const Matrix h0 = h(0.0);
  ErrorConstants out;
  out.h2_t = (ht * yt).squaredNorm();
  out.h2_0 = (h0 * y0).squaredNorm();
  out.cross = yt.dot(ht * (u * (h0 * y0))).real();
  out.mean_shift = yt.dot(ht * yt).real() - y0.dot(h0 * y0).real();
  out.c_r = out.h2_t + out.h2_0 - 2.0 * out.cross;
  out.c = out.c_r - out.mean_shift * out.mean_shift;
  return out;
}

}  // namespace

ErrorConstants error_constants(const MatrixProvider& h, const Vector& y0, double t,
                               std::size_t steps) {
  if (steps == 0) steps = default_oracle_steps(h, 0.0, t);
  // The midpoint error is c/n^2 to leading order; extrapolating n and 2n removes it.
  const ErrorConstants coarse = constants_at(h, y0, t, steps);
  ErrorConstants out = constants_at(h, y0, t, 2 * steps);
  auto extrapolate = [](double fine, double rough) { return (4.0 * fine - rough) / 3.0; };
  out.h2_t = extrapolate(out.h2_t, coarse.h2_t);
  out.cross = extrapolate(out.cross, coarse.cross);
  out.mean_shift = extrapolate(out.mean_shift, coarse.mean_shift);
  out.c_r = extrapolate(out.c_r, coarse.c_r);
  out.c = extrapolate(out.c, coarse.c);
  if (out.c < -1e-10 * (1.0 + std::abs(out.c_r)))
    throw Error(ErrorKind::InvalidArgument, "error_constants: negative C, generator not Hermitian?");
  out.c_r = std::max(0.0, out.c_r);
  out.c = std::max(0.0, out.c);
  return out;
}

void require_density(const Matrix& rho, double tol) {
  if (rho.rows() != rho.cols()) throw Error(ErrorKind::DimensionMismatch, "density must be square");
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (rho + rho.adjoint()), Eigen::EigenvaluesOnly);
  if (es.eigenvalues().size() && es.eigenvalues().minCoeff() < -tol)
    throw Error(ErrorKind::NotPositive,
                "density has eigenvalue " + std::to_string(es.eigenvalues().minCoeff()));
}

double fidelity(const Matrix& rho, const Vector& psi) {
  if (rho.rows() != psi.size()) throw Error(ErrorKind::DimensionMismatch, "fidelity: sizes differ");
  require_density(rho);
  return std::clamp(psi.dot(rho * psi).real(), 0.0, 1.0);
}

double fidelity(const Vector& a, const Vector& b) {
  if (a.size() != b.size()) throw Error(ErrorKind::DimensionMismatch, "fidelity: sizes differ");
  return std::clamp(std::norm(a.dot(b)), 0.0, 1.0);
}

double trace_distance(const Matrix& rho, const Matrix& sigma) {
  if (rho.rows() != sigma.rows()) throw Error(ErrorKind::DimensionMismatch, "trace_distance: sizes differ");
  const Matrix d = rho - sigma;
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (d + d.adjoint()), Eigen::EigenvaluesOnly);
  return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

OuMoments ou_moments(const RealFunction& g, const RealFunction& beta, double mu0, double m0,
                     double t) {
  if (m0 < mu0 * mu0) throw Error(ErrorKind::InvalidArgument, "ou_moments: M0 < mu0^2");
  auto big_g = [&](double r) { return r == 0.0 ? 0.0 : integrate(g, 0.0, r, 1e-13); };
  const double gt = big_g(t);
  const double inner =
      t == 0.0 ? 0.0
               : integrate([&](double r) { return std::exp(2.0 * (big_g(r) - gt)) * 2.0 * beta(r); },
                           0.0, t, 1e-12);
  OuMoments out;
  out.mean = std::exp(-gt) * mu0;
  out.second_moment = std::exp(-2.0 * gt) * m0 + inner;
  out.variance = out.second_moment - out.mean * out.mean;
  if (!(out.variance > 0.0))
    throw Error(ErrorKind::InvalidArgument, "ou_moments: variance is not positive");
  return out;
}

GaussianObservables gaussian_observables(double mean, double variance) {
  if (!(variance > 0.0)) throw Error(ErrorKind::InvalidArgument, "gaussian_observables: variance <= 0");
  return {mean, 0.5 * variance + mean * mean};
}

Vector classical_y_omega(const MatrixProvider& h, const Vector& y0, double t,
                         const DeltaProfile& profile, std::size_t quad_points, std::size_t steps) {
  const double half = profile.support();
  const double lo = profile.bias - half;
  const double hi = profile.bias + half;
  // Kinks of the compact profiles sit at the centre; panels break there.
  const std::size_t panels = std::max<std::size_t>(2, quad_points / 16);
  const double kink[] = {profile.bias};
  const QuadratureRule rule =
      panel_rule(lo, hi, panels, std::max<std::size_t>(quad_points / panels, 2), kink);
  Vector out = Vector::Zero(y0.size());
  for (Eigen::Index k = 0; k < rule.nodes.size(); ++k) {
    const double r = rule.nodes(k);  // r = s - t
    const double w = rule.weights(k) * profile(r);
    if (w == 0.0) continue;
    out += w * time_ordered_apply(h, y0, r, t + r, steps);
  }
  return out;
}

}  // namespace clockdil
