#include "clockdil/types.hpp"

namespace clockdil {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "invalid argument";
    case ErrorKind::DimensionMismatch: return "dimension mismatch";
    case ErrorKind::UnknownMode: return "unknown mode";
    case ErrorKind::Unsupported: return "unsupported";
    case ErrorKind::QuadratureNonConvergence: return "quadrature non-convergence";
    case ErrorKind::UnderResolved: return "under-resolved";
    case ErrorKind::WindowExceeded: return "clock window exceeded";
    case ErrorKind::NonSeparable: return "non-separable time dependence";
    case ErrorKind::KrylovNonConvergence: return "Krylov non-convergence";
    case ErrorKind::RecoveryFailure: return "recovery failure";
    case ErrorKind::NotPositive: return "not positive semidefinite";
    case ErrorKind::DegenerateFit: return "degenerate fit";
    case ErrorKind::Config: return "configuration";
  }
  return "unknown";
}

double hermitian_defect(const Matrix& m) {
  const double scale = m.norm();
  if (scale == 0.0) return 0.0;
  return (m - m.adjoint()).norm() / scale;
}

double hermitian_defect(const SparseMatrix& m) {
  const double scale = m.norm();
  if (scale == 0.0) return 0.0;
  const SparseMatrix adj = m.adjoint();
  return SparseMatrix(m - adj).norm() / scale;
}

}  // namespace clockdil
