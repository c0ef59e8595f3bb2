#include <algorithm>
#include <numbers>

#include "variants.hpp"

namespace mmr::simd::scalar {

void axpy_sub(double* y, const double* x, double alpha, std::size_t n) {
  for (std::size_t k = 0; k < n; ++k) y[k] = y[k] - alpha * x[k];
}

void er_quantile(double bound, const double* z, double* out, std::size_t n) {
  for (std::size_t k = 0; k < n; ++k) {
    const double interior = std::min(bound / (std::numbers::e * (1.0 - z[k])), bound);
    out[k] = z[k] < kAtomQuantile ? interior : bound;
  }
}

void er_cdf(double bound, const double* v, double* out, std::size_t n) {
  const double low = bound / std::numbers::e;
  for (std::size_t k = 0; k < n; ++k) {
    if (v[k] < low) {
      out[k] = 0.0;
    } else if (v[k] < bound) {
      out[k] = std::max(1.0 - bound / (std::numbers::e * v[k]), 0.0);
    } else {
      out[k] = 1.0;
    }
  }
}

// Four interleaved accumulators, combined as (l0 + l1) + (l2 + l3), then the tail.
Moments moments(const double* x, std::size_t n) {
  double s[4] = {0.0, 0.0, 0.0, 0.0};
  double q[4] = {0.0, 0.0, 0.0, 0.0};
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    for (int l = 0; l < 4; ++l) {
      s[l] = s[l] + x[k + l];
      q[l] = q[l] + x[k + l] * x[k + l];
    }
  }
  Moments m{(s[0] + s[1]) + (s[2] + s[3]), (q[0] + q[1]) + (q[2] + q[3])};
  for (; k < n; ++k) {
    m.sum = m.sum + x[k];
    m.sum_sq = m.sum_sq + x[k] * x[k];
  }
  return m;
}

std::size_t argmax(const double* x, std::size_t n) {
  std::size_t best = 0;
  for (std::size_t k = 1; k < n; ++k) {
    if (x[k] > x[best]) best = k;
  }
  return best;
}

}  // namespace mmr::simd::scalar
