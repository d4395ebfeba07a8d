#pragma once

#include <cstddef>

#include "clockdil/types.hpp"

namespace clockdil {

struct KrylovOptions {
  double tolerance = 1e-8;        // error budget for the whole interval
  std::size_t max_subspace = 40;
  std::size_t max_substeps = 200000;
  bool hermitian = true;          // Lanczos when true, Arnoldi otherwise
};

struct KrylovResult {
  Vector state;
  double error_estimate = 0.0;  // accumulated local estimates
  std::size_t substeps = 0;
  std::size_t matvecs = 0;
};

// exp(-i H t) v.
KrylovResult krylov_expmv(const SparseMatrix& h, const Vector& v, double t,
                          const KrylovOptions& opts = {});

// Dense propagation through the eigendecomposition of a Hermitian matrix; one
// decomposition serves any number of times and vectors.
class SpectralPropagator {
 public:
  explicit SpectralPropagator(const Matrix& h);
  Vector apply(const Vector& v, double t) const;
  Matrix unitary(double t) const;
  const RealVector& eigenvalues() const noexcept { return eigenvalues_; }

 private:
  Matrix eigenvectors_;
  RealVector eigenvalues_;
};

// exp(-i A t) for a general square matrix.
Matrix dense_expm(const Matrix& a, double t);

}  // namespace clockdil
