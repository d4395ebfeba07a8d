#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "clockdil/operator_algebra.hpp"
#include "clockdil/types.hpp"

namespace clockdil {

struct MatrixStats {
  std::size_t sparsity = 0;  // max nonzeros in a row, entries below 1e-14 dropped
  double max_norm = 0.0;     // largest |entry|
};

MatrixStats matrix_stats(const SparseMatrix& m);
MatrixStats matrix_stats(const Matrix& m);

// Row-wise maximum of both quantities over the sampled times.
MatrixStats max_stats(const MatrixProvider& h, const std::vector<double>& times);

// All costs are relative units: the big-O constants are set to 1.
struct CostReport {
  std::string label;
  std::size_t sparsity = 0;
  double max_norm = 0.0;
  double time = 0.0;
  double epsilon = 0.0;
  double tau = 0.0;
  std::size_t qubits = 0;
  double queries = 0.0;
  double gates = 0.0;
};

// tau = s (1/eps + h_max) T, the clock resolution tied to the error (N ~ 1/eps).
CostReport theorem4_estimate(std::size_t s_h, double h_max, double time, double eps, std::size_t j);

// N and eps independent: tau = (s_h + 2)(clock_norm + h_max) T, where clock_norm is the
// max-norm of the clock momentum (1/ds on the grid). Bounds the measured tau of H-bar.
CostReport two_parameter_estimate(std::size_t s_h, double h_max, double clock_norm, double time, double eps,
                                  std::size_t j);

// tau = s_Hbar T ||H-bar||_max from an assembled dilated matrix.
CostReport measured_estimate(const MatrixStats& hbar, double time, double eps, std::size_t j);

}  // namespace clockdil
