#include "clockdil/sparse.hpp"

namespace clockdil {

SparseMatrix to_sparse(const Matrix& m, double drop_tol) {
  const double cutoff = drop_tol * (m.size() ? m.cwiseAbs().maxCoeff() : 0.0);
  std::vector<Eigen::Triplet<cplx>> trips;
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      if (std::abs(m(i, j)) > cutoff) trips.emplace_back(i, j, m(i, j));
  SparseMatrix out(m.rows(), m.cols());
  out.setFromTriplets(trips.begin(), trips.end());
  out.makeCompressed();
  return out;
}

SparseMatrix sparse_identity(Eigen::Index n) {
  SparseMatrix out(n, n);
  out.setIdentity();
  out.makeCompressed();
  return out;
}

SparseMatrix kron(const SparseMatrix& a, const SparseMatrix& b) {
  std::vector<Eigen::Triplet<cplx>> trips;
  trips.reserve(static_cast<std::size_t>(a.nonZeros() * b.nonZeros()));
  for (Eigen::Index i = 0; i < a.outerSize(); ++i)
    for (SparseMatrix::InnerIterator ia(a, i); ia; ++ia)
      for (Eigen::Index k = 0; k < b.outerSize(); ++k)
        for (SparseMatrix::InnerIterator ib(b, k); ib; ++ib)
          trips.emplace_back(ia.row() * b.rows() + ib.row(), ia.col() * b.cols() + ib.col(),
                             ia.value() * ib.value());
  SparseMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  out.setFromTriplets(trips.begin(), trips.end());
  out.makeCompressed();
  return out;
}

SparseMatrix kron_all(const std::vector<SparseMatrix>& factors) {
  if (factors.empty()) return sparse_identity(1);
  SparseMatrix out = factors.front();
  for (std::size_t k = 1; k < factors.size(); ++k) out = kron(out, factors[k]);
  return out;
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

}  // namespace clockdil
