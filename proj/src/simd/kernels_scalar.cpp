#include "clockdil/simd/kernels.hpp"

namespace clockdil::simd::detail {
namespace {

cplx dot_scalar(const cplx* x, const cplx* y, std::size_t n) {
  double re = 0.0, im = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    re += x[i].real() * y[i].real() + x[i].imag() * y[i].imag();
    im += x[i].real() * y[i].imag() - x[i].imag() * y[i].real();
  }
  return {re, im};
}

void axpy_scalar(cplx a, const cplx* x, cplx* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void scale_scalar(cplx a, cplx* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) x[i] *= a;
}

double norm2_scalar(const cplx* x, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += std::norm(x[i]);
  return s;
}

void spmv_scalar(std::size_t rows, const int* outer, const int* inner, const cplx* values,
                 const cplx* x, cplx* y) {
  for (std::size_t r = 0; r < rows; ++r) {
    cplx acc{0.0, 0.0};
    for (int k = outer[r]; k < outer[r + 1]; ++k) acc += values[k] * x[inner[k]];
    y[r] = acc;
  }
}

void recurrence_scalar(double a, double b, const double* t, const double* p1, const double* p2,
                       double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a * t[i] * p1[i] - b * p2[i];
}

}  // namespace

const KernelTable& scalar_table() noexcept {
  static const KernelTable table{Isa::Scalar,  dot_scalar,  axpy_scalar,      scale_scalar,
                                 norm2_scalar, spmv_scalar, recurrence_scalar};
  return table;
}

}  // namespace clockdil::simd::detail
