#include <cstdlib>
#include <string>

#include "clockdil/simd/kernels.hpp"

namespace clockdil::simd {

std::string_view isa_name(Isa isa) noexcept {
  switch (isa) {
    case Isa::Scalar: return "scalar";
    case Isa::Avx2: return "avx2";
    case Isa::Neon: return "neon";
  }
  return "unknown";
}

bool isa_available(Isa isa) noexcept {
  switch (isa) {
    case Isa::Scalar: return true;
    case Isa::Avx2:
#if defined(CLOCKDIL_HAVE_AVX2)
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
    case Isa::Neon:
#if defined(CLOCKDIL_HAVE_NEON)
      return true;
#else
      return false;
#endif
  }
  return false;
}

const KernelTable& kernels_for(Isa isa) {
  if (!isa_available(isa))
    throw Error(ErrorKind::Unsupported, "SIMD kernels not available: " + std::string(isa_name(isa)));
  switch (isa) {
#if defined(CLOCKDIL_HAVE_AVX2)
    case Isa::Avx2: return detail::avx2_table();
#endif
#if defined(CLOCKDIL_HAVE_NEON)
    case Isa::Neon: return detail::neon_table();
#endif
    default: return detail::scalar_table();
  }
}

namespace {

const KernelTable& select() {
  if (const char* env = std::getenv("CLOCKDIL_SIMD")) {
    const std::string_view want{env};
    for (Isa isa : {Isa::Scalar, Isa::Avx2, Isa::Neon})
      if (want == isa_name(isa) && isa_available(isa)) return kernels_for(isa);
  }
  for (Isa isa : {Isa::Avx2, Isa::Neon})
    if (isa_available(isa)) return kernels_for(isa);
  return detail::scalar_table();
}

}  // namespace

const KernelTable& kernels() {
  static const KernelTable& active = select();
  return active;
}

cplx dot(std::span<const cplx> x, std::span<const cplx> y) {
  if (x.size() != y.size()) throw Error(ErrorKind::DimensionMismatch, "dot: length mismatch");
  return kernels().dot(x.data(), y.data(), x.size());
}

void axpy(cplx a, std::span<const cplx> x, std::span<cplx> y) {
  if (x.size() != y.size()) throw Error(ErrorKind::DimensionMismatch, "axpy: length mismatch");
  kernels().axpy(a, x.data(), y.data(), x.size());
}

void scale(cplx a, std::span<cplx> x) { kernels().scale(a, x.data(), x.size()); }

double norm2(std::span<const cplx> x) { return kernels().norm2(x.data(), x.size()); }

void spmv(const SparseMatrix& a, std::span<const cplx> x, std::span<cplx> y) {
  if (static_cast<std::size_t>(a.cols()) != x.size() ||
      static_cast<std::size_t>(a.rows()) != y.size())
    throw Error(ErrorKind::DimensionMismatch, "spmv: shape mismatch");
  if (!a.isCompressed()) throw Error(ErrorKind::InvalidArgument, "spmv: matrix not compressed");
  kernels().spmv(static_cast<std::size_t>(a.rows()), a.outerIndexPtr(), a.innerIndexPtr(),
                 a.valuePtr(), x.data(), y.data());
}

}  // namespace clockdil::simd
