// aarch64 only; Advanced SIMD is part of the base ISA there.
#include <arm_neon.h>

#include "clockdil/simd/kernels.hpp"

namespace clockdil::simd::detail {
namespace {

inline const double* raw(const cplx* p) { return reinterpret_cast<const double*>(p); }
inline double* raw(cplx* p) { return reinterpret_cast<double*>(p); }

inline float64x2_t swap(float64x2_t v) { return vextq_f64(v, v, 1); }

// a*b for one complex per register
inline float64x2_t cmul(float64x2_t a, float64x2_t b) {
  const float64x2_t re = vmulq_n_f64(b, vgetq_lane_f64(a, 0));
  const float64x2_t im = vmulq_n_f64(swap(b), vgetq_lane_f64(a, 1));
  const float64x2_t sign = {-1.0, 1.0};
  return vfmaq_f64(re, im, sign);
}

cplx dot_neon(const cplx* x, const cplx* y, std::size_t n) {
  float64x2_t same = vdupq_n_f64(0.0);
  float64x2_t cross = vdupq_n_f64(0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const float64x2_t xv = vld1q_f64(raw(x + i));
    const float64x2_t yv = vld1q_f64(raw(y + i));
    same = vfmaq_f64(same, xv, yv);
    cross = vfmaq_f64(cross, xv, swap(yv));
  }
  return {vgetq_lane_f64(same, 0) + vgetq_lane_f64(same, 1),
          vgetq_lane_f64(cross, 0) - vgetq_lane_f64(cross, 1)};
}

void axpy_neon(cplx a, const cplx* x, cplx* y, std::size_t n) {
  const float64x2_t av = {a.real(), a.imag()};
  for (std::size_t i = 0; i < n; ++i) {
    const float64x2_t prod = cmul(av, vld1q_f64(raw(x + i)));
    vst1q_f64(raw(y + i), vaddq_f64(vld1q_f64(raw(y + i)), prod));
  }
}

void scale_neon(cplx a, cplx* x, std::size_t n) {
  const float64x2_t av = {a.real(), a.imag()};
  for (std::size_t i = 0; i < n; ++i) vst1q_f64(raw(x + i), cmul(av, vld1q_f64(raw(x + i))));
}

double norm2_neon(const cplx* x, std::size_t n) {
  float64x2_t acc = vdupq_n_f64(0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const float64x2_t v = vld1q_f64(raw(x + i));
    acc = vfmaq_f64(acc, v, v);
  }
  return vgetq_lane_f64(acc, 0) + vgetq_lane_f64(acc, 1);
}

void spmv_neon(std::size_t rows, const int* outer, const int* inner, const cplx* values,
               const cplx* x, cplx* y) {
  for (std::size_t r = 0; r < rows; ++r) {
    float64x2_t acc = vdupq_n_f64(0.0);
    for (int k = outer[r]; k < outer[r + 1]; ++k)
      acc = vaddq_f64(acc, cmul(vld1q_f64(raw(values + k)), vld1q_f64(raw(x + inner[k]))));
    vst1q_f64(raw(y + r), acc);
  }
}

void recurrence_neon(double a, double b, const double* t, const double* p1, const double* p2,
                     double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t scaled = vmulq_n_f64(vld1q_f64(t + i), a);
    const float64x2_t prev = vmulq_n_f64(vld1q_f64(p2 + i), b);
    vst1q_f64(out + i, vfmaq_f64(vnegq_f64(prev), scaled, vld1q_f64(p1 + i)));
  }
  for (; i < n; ++i) out[i] = a * t[i] * p1[i] - b * p2[i];
}

}  // namespace

const KernelTable& neon_table() noexcept {
  static const KernelTable table{Isa::Neon,  dot_neon,  axpy_neon,      scale_neon,
                                 norm2_neon, spmv_neon, recurrence_neon};
  return table;
}

}  // namespace clockdil::simd::detail
