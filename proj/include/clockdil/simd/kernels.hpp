#pragma once

#include <cstddef>
#include <span>
#include <string_view>

#include "clockdil/types.hpp"

// Vector kernels used by the Krylov propagator and the basis tables.
// Each ISA provides the same table; dispatch picks one at first use.
namespace clockdil::simd {

enum class Isa { Scalar, Avx2, Neon };

std::string_view isa_name(Isa isa) noexcept;

struct KernelTable {
  Isa isa;
  // sum_i conj(x_i) * y_i
  cplx (*dot)(const cplx* x, const cplx* y, std::size_t n);
  // y += a * x
  void (*axpy)(cplx a, const cplx* x, cplx* y, std::size_t n);
  // x *= a
  void (*scale)(cplx a, cplx* x, std::size_t n);
  // sum_i |x_i|^2
  double (*norm2)(const cplx* x, std::size_t n);
  // y = A x for a row-compressed matrix
  void (*spmv)(std::size_t rows, const int* outer, const int* inner, const cplx* values,
               const cplx* x, cplx* y);
  // out_i = a * t_i * p1_i - b * p2_i  (Hermite three-term step)
  void (*recurrence)(double a, double b, const double* t, const double* p1, const double* p2,
                     double* out, std::size_t n);
};

bool isa_available(Isa isa) noexcept;

// Kernels for a specific ISA; throws Error(Unsupported) when the CPU or build lacks it.
const KernelTable& kernels_for(Isa isa);

// Best available table. CLOCKDIL_SIMD=scalar|avx2|neon overrides detection.
const KernelTable& kernels();

// Span conveniences over the active table.
cplx dot(std::span<const cplx> x, std::span<const cplx> y);
void axpy(cplx a, std::span<const cplx> x, std::span<cplx> y);
void scale(cplx a, std::span<cplx> x);
double norm2(std::span<const cplx> x);
void spmv(const SparseMatrix& a, std::span<const cplx> x, std::span<cplx> y);

namespace detail {
const KernelTable& scalar_table() noexcept;
#if defined(CLOCKDIL_HAVE_AVX2)
const KernelTable& avx2_table() noexcept;
#endif
#if defined(CLOCKDIL_HAVE_NEON)
const KernelTable& neon_table() noexcept;
#endif
}  // namespace detail

}  // namespace clockdil::simd
