#pragma once

#include <cstddef>

#include "clockdil/delta_profile.hpp"
#include "clockdil/galerkin_basis.hpp"
#include "clockdil/operator_algebra.hpp"
#include "clockdil/types.hpp"

namespace clockdil {

// max(1000, 100 |t1 - t0| max_t ||H(t)||_max) with the norm sampled on a few points.
std::size_t default_oracle_steps(const MatrixProvider& h, double t0, double t1);

// Midpoint exponential product for du/dt = -i A(t) u; A need not be Hermitian.
// steps = 0 picks default_oracle_steps.
Matrix time_ordered_propagator(const MatrixProvider& a, double t0, double t1, std::size_t steps = 0);
Vector time_ordered_apply(const MatrixProvider& a, const Vector& v, double t0, double t1,
                          std::size_t steps = 0);

// exp(-i (int_0^t g) h).
Matrix commuting_exact(const Matrix& h, const RealFunction& g, double t);

struct ErrorConstants {
  double c_r = 0.0;  // classical (regularized-solution) constant
  double c = 0.0;    // reduced-state constant, c <= c_r
  double h2_t = 0.0;     // <H(t)^2> in y(t)
  double h2_0 = 0.0;     // <H(0)^2> in y0
  double cross = 0.0;    // Re <y(t)| H(t) U_{t,0} H(0) |y0>
  double mean_shift = 0.0;  // <H(t)>_{y(t)} - <H(0)>_{y0}
};

ErrorConstants error_constants(const MatrixProvider& h, const Vector& y0, double t,
                               std::size_t steps = 0);

// <psi|rho|psi>; rho must be PSD within 1e-9.
double fidelity(const Matrix& rho, const Vector& psi);
double fidelity(const Vector& a, const Vector& b);
// (1/2) ||rho - sigma||_1
double trace_distance(const Matrix& rho, const Matrix& sigma);
// Throws NotPositive when an eigenvalue is below -tol.
void require_density(const Matrix& rho, double tol = 1e-9);

struct OuMoments {
  double mean = 0.0;
  double second_moment = 0.0;
  double variance = 0.0;
};

// Moments of the density under dq/dt = d/dx(g x q) + beta d^2q/dx^2.
OuMoments ou_moments(const RealFunction& g, const RealFunction& beta, double mu0, double m0,
                     double t);

struct GaussianObservables {
  double x = 0.0;
  double x2 = 0.0;
};

// <x>, <x^2> of the normalized state whose amplitude is the density N(mean, variance).
GaussianObservables gaussian_observables(double mean, double variance);

// int delta(s - t) U_{s, s-t} y0 ds by Gauss-Legendre panels over the profile support.
Vector classical_y_omega(const MatrixProvider& h, const Vector& y0, double t,
                         const DeltaProfile& profile, std::size_t quad_points = 64,
                         std::size_t steps = 0);

}  // namespace clockdil
