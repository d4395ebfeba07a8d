// Compiled with -mavx2 -mfma; only reached after a runtime CPU check.
#include <immintrin.h>

#include "clockdil/simd/kernels.hpp"

namespace clockdil::simd::detail {
namespace {

inline const double* raw(const cplx* p) { return reinterpret_cast<const double*>(p); }
inline double* raw(cplx* p) { return reinterpret_cast<double*>(p); }

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(lo, _mm_unpackhi_pd(lo, lo)));
}

// (a.re*b.re - a.im*b.im, a.re*b.im + a.im*b.re) for two packed complexes
inline __m256d cmul(__m256d a, __m256d b) {
  const __m256d are = _mm256_movedup_pd(a);
  const __m256d aim = _mm256_permute_pd(a, 0xF);
  const __m256d bsw = _mm256_permute_pd(b, 0x5);
  return _mm256_fmaddsub_pd(are, b, _mm256_mul_pd(aim, bsw));
}

cplx dot_avx2(const cplx* x, const cplx* y, std::size_t n) {
  const double* xp = raw(x);
  const double* yp = raw(y);
  __m256d same = _mm256_setzero_pd();
  __m256d cross = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d xv = _mm256_loadu_pd(xp + 2 * i);
    const __m256d yv = _mm256_loadu_pd(yp + 2 * i);
    same = _mm256_fmadd_pd(xv, yv, same);
    cross = _mm256_fmadd_pd(xv, _mm256_permute_pd(yv, 0x5), cross);
  }
  // same = (xr*yr, xi*yi, ...), cross = (xr*yi, xi*yr, ...)
  alignas(32) double c[4];
  _mm256_store_pd(c, cross);
  double re = hsum(same);
  double im = c[0] - c[1] + c[2] - c[3];
  for (; i < n; ++i) {
    re += x[i].real() * y[i].real() + x[i].imag() * y[i].imag();
    im += x[i].real() * y[i].imag() - x[i].imag() * y[i].real();
  }
  return {re, im};
}

void axpy_avx2(cplx a, const cplx* x, cplx* y, std::size_t n) {
  const __m256d are = _mm256_set1_pd(a.real());
  const __m256d aim = _mm256_set1_pd(a.imag());
  const double* xp = raw(x);
  double* yp = raw(y);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d xv = _mm256_loadu_pd(xp + 2 * i);
    const __m256d t = _mm256_mul_pd(aim, _mm256_permute_pd(xv, 0x5));
    const __m256d ax = _mm256_fmaddsub_pd(are, xv, t);
    _mm256_storeu_pd(yp + 2 * i, _mm256_add_pd(_mm256_loadu_pd(yp + 2 * i), ax));
  }
  for (; i < n; ++i) y[i] += a * x[i];
}

void scale_avx2(cplx a, cplx* x, std::size_t n) {
  const __m256d are = _mm256_set1_pd(a.real());
  const __m256d aim = _mm256_set1_pd(a.imag());
  double* xp = raw(x);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d xv = _mm256_loadu_pd(xp + 2 * i);
    const __m256d t = _mm256_mul_pd(aim, _mm256_permute_pd(xv, 0x5));
    _mm256_storeu_pd(xp + 2 * i, _mm256_fmaddsub_pd(are, xv, t));
  }
  for (; i < n; ++i) x[i] *= a;
}

double norm2_avx2(const cplx* x, std::size_t n) {
  const double* xp = raw(x);
  const std::size_t m = 2 * n;
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= m; i += 8) {
    const __m256d a = _mm256_loadu_pd(xp + i);
    const __m256d b = _mm256_loadu_pd(xp + i + 4);
    acc0 = _mm256_fmadd_pd(a, a, acc0);
    acc1 = _mm256_fmadd_pd(b, b, acc1);
  }
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < m; ++i) s += xp[i] * xp[i];
  return s;
}

void spmv_avx2(std::size_t rows, const int* outer, const int* inner, const cplx* values,
               const cplx* x, cplx* y) {
  const double* vp = raw(values);
  const double* xp = raw(x);
  for (std::size_t r = 0; r < rows; ++r) {
    int k = outer[r];
    const int end = outer[r + 1];
    __m256d acc = _mm256_setzero_pd();
    for (; k + 2 <= end; k += 2) {
      const __m256d v = _mm256_loadu_pd(vp + 2 * k);
      const __m256d xv = _mm256_set_m128d(_mm_loadu_pd(xp + 2 * inner[k + 1]),
                                          _mm_loadu_pd(xp + 2 * inner[k]));
      acc = _mm256_add_pd(acc, cmul(v, xv));
    }
    __m128d sum = _mm_add_pd(_mm256_castpd256_pd128(acc), _mm256_extractf128_pd(acc, 1));
    if (k < end) {
      const __m128d v = _mm_loadu_pd(vp + 2 * k);
      const __m128d xv = _mm_loadu_pd(xp + 2 * inner[k]);
      const __m128d vre = _mm_movedup_pd(v);
      const __m128d vim = _mm_permute_pd(v, 0x3);
      const __m128d prod = _mm_fmaddsub_pd(vre, xv, _mm_mul_pd(vim, _mm_permute_pd(xv, 0x1)));
      sum = _mm_add_pd(sum, prod);
    }
    _mm_storeu_pd(reinterpret_cast<double*>(y + r), sum);
  }
}

void recurrence_avx2(double a, double b, const double* t, const double* p1, const double* p2,
                     double* out, std::size_t n) {
  const __m256d av = _mm256_set1_pd(a);
  const __m256d bv = _mm256_set1_pd(b);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d scaled = _mm256_mul_pd(av, _mm256_loadu_pd(t + i));
    const __m256d prev = _mm256_mul_pd(bv, _mm256_loadu_pd(p2 + i));
    _mm256_storeu_pd(out + i, _mm256_fmsub_pd(scaled, _mm256_loadu_pd(p1 + i), prev));
  }
  for (; i < n; ++i) out[i] = a * t[i] * p1[i] - b * p2[i];
}

}  // namespace

const KernelTable& avx2_table() noexcept {
  static const KernelTable table{Isa::Avx2, dot_avx2,  axpy_avx2,      scale_avx2,
                                 norm2_avx2, spmv_avx2, recurrence_avx2};
  return table;
}

}  // namespace clockdil::simd::detail
