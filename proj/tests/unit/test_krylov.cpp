#include <random>

#include "clockdil/krylov.hpp"
#include "clockdil/sparse.hpp"
#include "doctest.h"

using namespace clockdil;

namespace {

Matrix random_hermitian(Eigen::Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> d;
  Matrix m(n, n);
  for (auto& z : m.reshaped()) z = {d(rng), d(rng)};
  return 0.5 * (m + m.adjoint());
}

Vector random_state(Eigen::Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> d;
  Vector v(n);
  for (auto& z : v) z = {d(rng), d(rng)};
  return v.normalized();
}

}  // namespace

TEST_CASE("Krylov matches dense propagation on a random Hermitian matrix") {
  std::mt19937_64 rng(17);
  const Matrix h = random_hermitian(256, rng);
  const Vector v = random_state(256, rng);
  const SpectralPropagator dense(h);
  const Vector expect = dense.apply(v, 1.0);
  const KrylovResult k = krylov_expmv(to_sparse(h), v, 1.0);
  CHECK((k.state - expect).norm() < 1e-8);
  CHECK(std::abs(k.state.norm() - 1.0) < 1e-9);
  CHECK(k.substeps >= 1);

  const Vector back = krylov_expmv(to_sparse(h), k.state, -1.0).state;
  CHECK((back - v).norm() < 1e-8);
}

TEST_CASE("zero time leaves the state unchanged") {
  std::mt19937_64 rng(2);
  const Matrix h = random_hermitian(16, rng);
  const Vector v = random_state(16, rng);
  CHECK((krylov_expmv(to_sparse(h), v, 0.0).state - v).norm() == 0.0);
  CHECK((SpectralPropagator(h).apply(v, 0.0) - v).norm() < 1e-14);
}

TEST_CASE("small invariant subspace terminates early") {
  // Diagonal matrix with a vector supported on two entries: the Krylov space has dimension 2.
  SparseMatrix h = sparse_identity(50);
  for (Eigen::Index i = 0; i < 50; ++i) h.coeffRef(i, i) = double(i);
  Vector v = Vector::Zero(50);
  v(3) = 1.0 / std::sqrt(2.0);
  v(7) = 1.0 / std::sqrt(2.0);
  const KrylovResult k = krylov_expmv(h, v, 2.5);
  CHECK(std::abs(k.state(3) - std::exp(-kI * 7.5) / std::sqrt(2.0)) < 1e-12);
  CHECK(std::abs(k.state(7) - std::exp(-kI * 17.5) / std::sqrt(2.0)) < 1e-12);
}

TEST_CASE("Arnoldi handles non-Hermitian generators") {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> d;
  Matrix a(64, 64);
  for (auto& z : a.reshaped()) z = {d(rng), d(rng)};
  a /= 8.0;
  a -= kI * Matrix::Identity(64, 64);  // decaying
  const Vector v = random_state(64, rng);
  const Vector expect = dense_expm(a, 0.8) * v;
  KrylovOptions opts;
  opts.hermitian = false;
  CHECK((krylov_expmv(to_sparse(a), v, 0.8, opts).state - expect).norm() < 1e-8);
}

TEST_CASE("large stiff sparse operator") {
  // Tridiagonal Laplacian with norm ~ 4e4 evolved for unit time.
  const Eigen::Index n = 400;
  std::vector<Eigen::Triplet<cplx>> trips;
  const double c = 1e4;
  for (Eigen::Index i = 0; i < n; ++i) {
    trips.emplace_back(i, i, 2 * c);
    if (i + 1 < n) {
      trips.emplace_back(i, i + 1, -c);
      trips.emplace_back(i + 1, i, -c);
    }
  }
  SparseMatrix h(n, n);
  h.setFromTriplets(trips.begin(), trips.end());
  std::mt19937_64 rng(3);
  const Vector v = random_state(n, rng);
  const Vector expect = SpectralPropagator(Matrix(h)).apply(v, 1.0);
  const KrylovResult k = krylov_expmv(h, v, 1.0);
  CHECK((k.state - expect).norm() < 1e-7);
  MESSAGE("substeps " << k.substeps << " matvecs " << k.matvecs);
}

TEST_CASE("dense propagation rejects non-Hermitian input") {
  Matrix a(2, 2);
  a << 0, 1, 0, 0;
  CHECK_THROWS_AS(SpectralPropagator{a}, Error);
}
