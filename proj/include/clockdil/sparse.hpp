#pragma once

#include <vector>

#include "clockdil/types.hpp"

namespace clockdil {

// Dense to sparse, dropping entries below drop_tol * max|entry|.
SparseMatrix to_sparse(const Matrix& m, double drop_tol = 1e-15);
SparseMatrix sparse_identity(Eigen::Index n);
SparseMatrix kron(const SparseMatrix& a, const SparseMatrix& b);
// Left-to-right Kronecker product of all factors.
SparseMatrix kron_all(const std::vector<SparseMatrix>& factors);
Matrix kron(const Matrix& a, const Matrix& b);

}  // namespace clockdil
