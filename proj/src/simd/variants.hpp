#pragma once

// Per-ISA kernel entry points. Internal; tests include it to compare variants directly.

#include <cstddef>
#include <numbers>

#include "mmregret/simd/kernels.hpp"

namespace mmr::simd {

inline constexpr double kAtomQuantile = 1.0 - 1.0 / std::numbers::e;

#define MMR_SIMD_DECLARE_VARIANT(ns)                                                  \
  namespace ns {                                                                      \
  void axpy_sub(double* y, const double* x, double alpha, std::size_t n);             \
  void er_quantile(double bound, const double* z, double* out, std::size_t n);        \
  void er_cdf(double bound, const double* v, double* out, std::size_t n);             \
  Moments moments(const double* x, std::size_t n);                                    \
  std::size_t argmax(const double* x, std::size_t n);                                 \
  }

MMR_SIMD_DECLARE_VARIANT(scalar)
#if defined(MMR_HAVE_AVX2)
MMR_SIMD_DECLARE_VARIANT(avx2)
#endif

#undef MMR_SIMD_DECLARE_VARIANT

}  // namespace mmr::simd
