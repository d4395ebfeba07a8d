#include "clockdil/complexity_estimator.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

namespace clockdil {
namespace {

constexpr double kDrop = 1e-14;

void check_inputs(double time, double eps, std::size_t j) {
  if (!(eps > 0.0) || eps >= 1.0)
    throw Error(ErrorKind::InvalidArgument, fmt::format("accuracy must lie in (0, 1), got {}", eps));
  if (!(time > 0.0)) throw Error(ErrorKind::InvalidArgument, "evolution time must be positive");
  if (j == 0) throw Error(ErrorKind::InvalidArgument, "system dimension must be positive");
}

// Query and gate counts of the sparse-access simulation for a given tau.
CostReport lemma5(std::string label, std::size_t sparsity, double max_norm, double time, double eps,
                  std::size_t j, double tau) {
  CostReport r;
  r.label = std::move(label);
  r.sparsity = sparsity;
  r.max_norm = max_norm;
  r.time = time;
  r.epsilon = eps;
  r.tau = tau;
  r.qubits = static_cast<std::size_t>(std::ceil(std::log2(static_cast<double>(j) / eps)));
  const double l = std::log(std::max(tau / eps, std::exp(1.0)));
  // ln ln below 1 would inflate the ratio for tiny problems
  const double ratio = l / std::max(std::log(l), 1.0);
  r.queries = tau * ratio;
  r.gates = tau * (static_cast<double>(r.qubits) + std::pow(l, 2.5)) * ratio;
  return r;
}

}  // namespace

MatrixStats matrix_stats(const SparseMatrix& m) {
  MatrixStats s;
  std::vector<std::size_t> per_row(static_cast<std::size_t>(m.rows()), 0);
  for (Eigen::Index k = 0; k < m.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(m, k); it; ++it) {
      const double a = std::abs(it.value());
      if (a < kDrop) continue;
      ++per_row[static_cast<std::size_t>(it.row())];
      s.max_norm = std::max(s.max_norm, a);
    }
  if (!per_row.empty()) s.sparsity = *std::max_element(per_row.begin(), per_row.end());
  return s;
}

MatrixStats matrix_stats(const Matrix& m) {
  MatrixStats s;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    std::size_t count = 0;
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      const double a = std::abs(m(i, j));
      if (a < kDrop) continue;
      ++count;
      s.max_norm = std::max(s.max_norm, a);
    }
    s.sparsity = std::max(s.sparsity, count);
  }
  return s;
}

MatrixStats max_stats(const MatrixProvider& h, const std::vector<double>& times) {
  MatrixStats out;
  for (double t : times) {
    const MatrixStats s = matrix_stats(h(t));
    out.sparsity = std::max(out.sparsity, s.sparsity);
    out.max_norm = std::max(out.max_norm, s.max_norm);
  }
  return out;
}

CostReport theorem4_estimate(std::size_t s_h, double h_max, double time, double eps, std::size_t j) {
  check_inputs(time, eps, j);
  if (s_h == 0 || h_max < 0.0) throw Error(ErrorKind::InvalidArgument, "sparsity and norm must be positive");
  const double tau = static_cast<double>(s_h) * (1.0 / eps + h_max) * time;
  return lemma5("collapsed", s_h, 1.0 / eps + h_max, time, eps, j, tau);
}

CostReport two_parameter_estimate(std::size_t s_h, double h_max, double clock_norm, double time, double eps,
                                  std::size_t j) {
  check_inputs(time, eps, j);
  if (h_max < 0.0 || clock_norm < 0.0) throw Error(ErrorKind::InvalidArgument, "norms must be nonnegative");
  const double tau = static_cast<double>(s_h + 2) * (clock_norm + h_max) * time;
  return lemma5("two-parameter", s_h + 2, clock_norm + h_max, time, eps, j, tau);
}

CostReport measured_estimate(const MatrixStats& hbar, double time, double eps, std::size_t j) {
  check_inputs(time, eps, j);
  const double tau = static_cast<double>(hbar.sparsity) * time * hbar.max_norm;
  return lemma5("measured", hbar.sparsity, hbar.max_norm, time, eps, j, tau);
}

}  // namespace clockdil
