#pragma once

// Data-parallel inner loops used by the samplers, the Monte Carlo reductions and
// the simplex pivot. Every kernel has a scalar reference and an AVX2 variant; the
// variant is picked once at startup from CPUID (override with MMR_SIMD=scalar|avx2
// or set_isa). All variants are bit-identical to the scalar reference: no FMA, and
// reductions accumulate in four interleaved lanes in both paths.

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>

namespace mmr::simd {

enum class Isa { Scalar, Avx2 };

std::string_view to_string(Isa isa);
std::optional<Isa> parse_isa(std::string_view name);
bool isa_supported(Isa isa);
Isa active_isa();
/// Throws std::invalid_argument if the ISA is not available on this CPU/build.
void set_isa(Isa isa);

struct Moments {
  double sum = 0.0;
  double sum_sq = 0.0;
};

/// y[k] -= alpha * x[k]
void axpy_sub(std::span<double> y, std::span<const double> x, double alpha);

/// Equal-revenue inverse quantile: bound / (e (1 - z)) below 1 - 1/e, bound on the atom.
void er_quantile(double bound, std::span<const double> z, std::span<double> out);

/// Equal-revenue CDF: 0 below bound/e, 1 - bound/(e v) on [bound/e, bound), 1 at and above bound.
void er_cdf(double bound, std::span<const double> v, std::span<double> out);

Moments moments(std::span<const double> x);

/// Index of the first maximal element; x must be non-empty.
std::size_t argmax(std::span<const double> x);

}  // namespace mmr::simd
