// Compiled with -mavx2 (and without -mfma) so products and sums round exactly as in
// the scalar reference.

#include <immintrin.h>

#include <numbers>

#include "variants.hpp"

namespace mmr::simd::avx2 {

void axpy_sub(double* y, const double* x, double alpha, std::size_t n) {
  const __m256d a = _mm256_set1_pd(alpha);
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    const __m256d prod = _mm256_mul_pd(a, _mm256_loadu_pd(x + k));
    _mm256_storeu_pd(y + k, _mm256_sub_pd(_mm256_loadu_pd(y + k), prod));
  }
  for (; k < n; ++k) y[k] = y[k] - alpha * x[k];
}

void er_quantile(double bound, const double* z, double* out, std::size_t n) {
  const __m256d b = _mm256_set1_pd(bound);
  const __m256d e = _mm256_set1_pd(std::numbers::e);
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d atom = _mm256_set1_pd(kAtomQuantile);
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    const __m256d zv = _mm256_loadu_pd(z + k);
    const __m256d interior = _mm256_min_pd(_mm256_div_pd(b, _mm256_mul_pd(e, _mm256_sub_pd(one, zv))), b);
    const __m256d below = _mm256_cmp_pd(zv, atom, _CMP_LT_OQ);
    _mm256_storeu_pd(out + k, _mm256_blendv_pd(b, interior, below));
  }
  if (k < n) scalar::er_quantile(bound, z + k, out + k, n - k);
}

void er_cdf(double bound, const double* v, double* out, std::size_t n) {
  const double low_s = bound / std::numbers::e;
  const __m256d b = _mm256_set1_pd(bound);
  const __m256d low = _mm256_set1_pd(low_s);
  const __m256d e = _mm256_set1_pd(std::numbers::e);
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d zero = _mm256_setzero_pd();
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    const __m256d vv = _mm256_loadu_pd(v + k);
    const __m256d interior = _mm256_max_pd(_mm256_sub_pd(one, _mm256_div_pd(b, _mm256_mul_pd(e, vv))), zero);
    __m256d r = _mm256_blendv_pd(one, interior, _mm256_cmp_pd(vv, b, _CMP_LT_OQ));
    r = _mm256_blendv_pd(r, zero, _mm256_cmp_pd(vv, low, _CMP_LT_OQ));
    _mm256_storeu_pd(out + k, r);
  }
  if (k < n) scalar::er_cdf(bound, v + k, out + k, n - k);
}

Moments moments(const double* x, std::size_t n) {
  __m256d s = _mm256_setzero_pd();
  __m256d q = _mm256_setzero_pd();
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    const __m256d xv = _mm256_loadu_pd(x + k);
    s = _mm256_add_pd(s, xv);
    q = _mm256_add_pd(q, _mm256_mul_pd(xv, xv));
  }
  alignas(32) double sl[4];
  alignas(32) double ql[4];
  _mm256_store_pd(sl, s);
  _mm256_store_pd(ql, q);
  Moments m{(sl[0] + sl[1]) + (sl[2] + sl[3]), (ql[0] + ql[1]) + (ql[2] + ql[3])};
  for (; k < n; ++k) {
    m.sum = m.sum + x[k];
    m.sum_sq = m.sum_sq + x[k] * x[k];
  }
  return m;
}

std::size_t argmax(const double* x, std::size_t n) {
  if (n < 8) return scalar::argmax(x, n);
  __m256d best = _mm256_loadu_pd(x);
  std::size_t k = 4;
  for (; k + 4 <= n; k += 4) best = _mm256_max_pd(best, _mm256_loadu_pd(x + k));
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, best);
  double top = lanes[0];
  for (int l = 1; l < 4; ++l) top = lanes[l] > top ? lanes[l] : top;
  for (; k < n; ++k) top = x[k] > top ? x[k] : top;
  std::size_t idx = 0;
  while (!(x[idx] == top)) ++idx;
  return idx;
}

}  // namespace mmr::simd::avx2
