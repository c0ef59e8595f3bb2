#include <atomic>
#include <cassert>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "variants.hpp"

namespace mmr::simd {

namespace {

Isa detect() {
  if (const char* forced = std::getenv("MMR_SIMD")) {
    if (auto isa = parse_isa(forced); isa && isa_supported(*isa)) return *isa;
  }
  return isa_supported(Isa::Avx2) ? Isa::Avx2 : Isa::Scalar;
}

std::atomic<Isa>& current() {
  static std::atomic<Isa> isa{detect()};
  return isa;
}

}  // namespace

std::string_view to_string(Isa isa) { return isa == Isa::Avx2 ? "avx2" : "scalar"; }

std::optional<Isa> parse_isa(std::string_view name) {
  if (name == "scalar") return Isa::Scalar;
  if (name == "avx2") return Isa::Avx2;
  return std::nullopt;
}

bool isa_supported(Isa isa) {
  if (isa == Isa::Scalar) return true;
#if defined(MMR_HAVE_AVX2)
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

Isa active_isa() { return current().load(std::memory_order_relaxed); }

void set_isa(Isa isa) {
  if (!isa_supported(isa)) throw std::invalid_argument("ISA not supported: " + std::string(to_string(isa)));
  current().store(isa, std::memory_order_relaxed);
}

#if defined(MMR_HAVE_AVX2)
#define MMR_DISPATCH(fn, ...) \
  (active_isa() == Isa::Avx2 ? avx2::fn(__VA_ARGS__) : scalar::fn(__VA_ARGS__))
#else
#define MMR_DISPATCH(fn, ...) scalar::fn(__VA_ARGS__)
#endif

void axpy_sub(std::span<double> y, std::span<const double> x, double alpha) {
  assert(y.size() == x.size());
  MMR_DISPATCH(axpy_sub, y.data(), x.data(), alpha, y.size());
}

void er_quantile(double bound, std::span<const double> z, std::span<double> out) {
  assert(z.size() == out.size());
  MMR_DISPATCH(er_quantile, bound, z.data(), out.data(), z.size());
}

void er_cdf(double bound, std::span<const double> v, std::span<double> out) {
  assert(v.size() == out.size());
  MMR_DISPATCH(er_cdf, bound, v.data(), out.data(), v.size());
}

Moments moments(std::span<const double> x) { return MMR_DISPATCH(moments, x.data(), x.size()); }

std::size_t argmax(std::span<const double> x) {
  assert(!x.empty());
  return MMR_DISPATCH(argmax, x.data(), x.size());
}

}  // namespace mmr::simd
