#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

namespace clockdil {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;
using SparseMatrix = Eigen::SparseMatrix<cplx, Eigen::RowMajor>;

inline constexpr cplx kI{0.0, 1.0};

enum class ErrorKind {
  InvalidArgument,
  DimensionMismatch,
  UnknownMode,
  Unsupported,
  QuadratureNonConvergence,
  UnderResolved,
  WindowExceeded,
  NonSeparable,
  KrylovNonConvergence,
  RecoveryFailure,
  NotPositive,
  DegenerateFit,
  Config,
};

const char* to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// Relative Frobenius defect ||M - M^dagger|| / ||M||; zero for the zero matrix.
double hermitian_defect(const Matrix& m);
double hermitian_defect(const SparseMatrix& m);

}  // namespace clockdil
