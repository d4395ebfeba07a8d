#include "clockdil/krylov.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include <unsupported/Eigen/MatrixFunctions>

#include "clockdil/simd/kernels.hpp"

namespace clockdil {
namespace {

std::span<cplx> view(Vector& v) { return {v.data(), static_cast<std::size_t>(v.size())}; }

struct Subspace {
  std::vector<Vector> basis;
  Matrix projected;      // m x m
  double next_norm = 0;  // h_{m+1,m}
  bool exhausted = false;
};

// Builds an orthonormal Krylov basis with full re-orthogonalization.
Subspace build_subspace(const SparseMatrix& h, const Vector& v0, std::size_t m_max, bool hermitian,
                        double scale, std::size_t& matvecs) {
  Subspace s;
  s.basis.reserve(m_max + 1);
  s.basis.push_back(v0);
  Matrix hm = Matrix::Zero(static_cast<Eigen::Index>(m_max + 1), static_cast<Eigen::Index>(m_max));
  Vector w(v0.size());
  std::size_t m = 0;
  for (; m < m_max; ++m) {
    simd::spmv(h, view(s.basis[m]), view(w));
    ++matvecs;
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t j = 0; j <= m; ++j) {
        const cplx c = simd::dot(view(s.basis[j]), view(w));
        hm(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(m)) += c;
        simd::axpy(-c, view(s.basis[j]), view(w));
      }
    }
    const double beta = std::sqrt(simd::norm2(view(w)));
    hm(static_cast<Eigen::Index>(m + 1), static_cast<Eigen::Index>(m)) = beta;
    if (beta <= 1e-13 * scale) {
      s.exhausted = true;
      ++m;
      break;
    }
    simd::scale(1.0 / beta, view(w));
    s.basis.push_back(w);
  }
  const auto mi = static_cast<Eigen::Index>(m);
  s.next_norm = s.exhausted ? 0.0 : hm(mi, mi - 1).real();
  s.projected = hm.topLeftCorner(mi, mi);
  if (hermitian) {
    // Exact Hermitian tridiagonal form; the dropped entries are rounding.
    Matrix tri = Matrix::Zero(mi, mi);
    for (Eigen::Index j = 0; j < mi; ++j) {
      tri(j, j) = s.projected(j, j).real();
      if (j + 1 < mi) {
        tri(j + 1, j) = s.projected(j + 1, j).real();
        tri(j, j + 1) = tri(j + 1, j);
      }
    }
    s.projected = std::move(tri);
  }
  if (s.basis.size() > m) s.basis.resize(m);
  return s;
}

Vector small_expm_e1(const Matrix& hm, double tau, bool hermitian) {
  const Eigen::Index m = hm.rows();
  if (hermitian) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(hm);
    const Vector phase = (-kI * tau * es.eigenvalues().cast<cplx>()).array().exp();
    return es.eigenvectors() * phase.cwiseProduct(es.eigenvectors().row(0).adjoint());
  }
  Matrix arg = (-kI * tau) * hm;
  Matrix e = arg.exp();
  return e.col(0).head(m);
}

}  // namespace

KrylovResult krylov_expmv(const SparseMatrix& h, const Vector& v, double t,
                          const KrylovOptions& opts) {
  if (h.rows() != h.cols() || h.cols() != v.size())
    throw Error(ErrorKind::DimensionMismatch, "krylov_expmv: operator and vector sizes differ");
  KrylovResult out;
  out.state = v;
  const double beta0 = v.norm();
  if (t == 0.0 || beta0 == 0.0) return out;

  const double sign = t < 0 ? -1.0 : 1.0;
  const double total = std::abs(t);
  const double inf_norm = [&] {
    double best = 0.0;
    for (Eigen::Index i = 0; i < h.outerSize(); ++i) {
      double row = 0.0;
      for (SparseMatrix::InnerIterator it(h, i); it; ++it) row += std::abs(it.value());
      best = std::max(best, row);
    }
    return std::max(best, 1e-300);
  }();
  const std::size_t m_max = std::min<std::size_t>(opts.max_subspace, static_cast<std::size_t>(h.rows()));
  const double tol_rate = opts.tolerance / total;  // allowed error per unit time

  // Initial step from the usual a-priori bound.
  double tau = std::min(total, 10.0 / inf_norm);
  double done = 0.0;
  const SparseMatrix hs = sign * h;
  while (done < total) {
    if (++out.substeps > opts.max_substeps)
      throw Error(ErrorKind::KrylovNonConvergence,
                  "Krylov exceeded " + std::to_string(opts.max_substeps) + " substeps at t = " +
                      std::to_string(done) + " (error estimate " +
                      std::to_string(out.error_estimate) + ")");
    const double beta = out.state.norm();
    Vector v0 = out.state / beta;
    Subspace s = build_subspace(hs, v0, m_max, opts.hermitian, inf_norm, out.matvecs);
    const auto m = s.projected.rows();
    tau = std::min(tau, total - done);
    for (int attempt = 0;; ++attempt) {
      const Vector y = small_expm_e1(s.projected, tau, opts.hermitian);
      const double err = s.exhausted ? 0.0 : beta * s.next_norm * std::abs(y(m - 1));
      // The last component of the small exponential is only known to rounding; once it
      // is there the truncation is invisible and the step is accepted.
      const bool at_rounding = std::abs(y(m - 1)) <= 64 * std::numeric_limits<double>::epsilon();
      if (err <= tol_rate * tau || at_rounding || attempt > 60) {
        if (attempt > 60)
          throw Error(ErrorKind::KrylovNonConvergence,
                      "Krylov step shrank without meeting tolerance; residual " + std::to_string(err));
        Vector next = Vector::Zero(v.size());
        for (Eigen::Index j = 0; j < m; ++j) simd::axpy(beta * y(j), view(s.basis[static_cast<std::size_t>(j)]), view(next));
        out.state = std::move(next);
        out.error_estimate += err;
        done += tau;
        // Grow the step when comfortably inside the budget.
        const double ratio = err > 0 && !at_rounding ? tol_rate * tau / err : 1e6;
        tau *= std::clamp(0.9 * std::pow(ratio, 1.0 / static_cast<double>(m)), 0.5, 2.0);
        break;
      }
      const double ratio = tol_rate * tau / err;
      tau *= std::clamp(0.9 * std::pow(ratio, 1.0 / static_cast<double>(m)), 0.1, 0.7);
    }
  }
  return out;
}

SpectralPropagator::SpectralPropagator(const Matrix& h) {
  if (h.rows() != h.cols()) throw Error(ErrorKind::DimensionMismatch, "propagator needs a square matrix");
  if (hermitian_defect(h) > 1e-12)
    throw Error(ErrorKind::InvalidArgument, "dense eigen-propagation needs a Hermitian matrix");
  Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  eigenvectors_ = es.eigenvectors();
  eigenvalues_ = es.eigenvalues();
}

Vector SpectralPropagator::apply(const Vector& v, double t) const {
  const Vector phase = (-kI * t * eigenvalues_.cast<cplx>()).array().exp();
  return eigenvectors_ * phase.cwiseProduct(eigenvectors_.adjoint() * v);
}

Matrix SpectralPropagator::unitary(double t) const {
  const Vector phase = (-kI * t * eigenvalues_.cast<cplx>()).array().exp();
  return eigenvectors_ * phase.asDiagonal() * eigenvectors_.adjoint();
}

Matrix dense_expm(const Matrix& a, double t) {
  Matrix arg = (-kI * t) * a;
  return arg.exp();
}

}  // namespace clockdil
