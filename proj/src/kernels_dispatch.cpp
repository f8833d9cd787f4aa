#include <atomic>
#include <stdexcept>

#include "eikfac/kernels.hpp"

namespace eikfac::kernels {

namespace {

// -1: auto, otherwise an Isa value.
std::atomic<int> g_override{-1};

void check_sizes(std::size_t a, std::size_t b, std::size_t c) {
  if (a != b || a != c) throw std::invalid_argument("kernel inputs differ in length");
}

}  // namespace

bool avx2_available() {
#if defined(EIKFAC_HAVE_AVX2)
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

Isa active_isa() {
  const int o = g_override.load(std::memory_order_relaxed);
  if (o >= 0) return static_cast<Isa>(o);
  static const Isa detected = avx2_available() ? Isa::Avx2 : Isa::Scalar;
  return detected;
}

void set_isa_override(std::optional<Isa> isa) {
  if (isa && *isa == Isa::Avx2 && !avx2_available()) {
    throw std::runtime_error("AVX2 kernels are not available on this machine");
  }
  g_override.store(isa ? static_cast<int>(*isa) : -1, std::memory_order_relaxed);
}

AbsDiff masked_abs_diff(std::span<const double> a, std::span<const double> b,
                        std::span<const std::uint8_t> mask) {
  check_sizes(a.size(), b.size(), mask.size());
#if defined(EIKFAC_HAVE_AVX2)
  if (active_isa() == Isa::Avx2) {
    return avx2::masked_abs_diff(a.data(), b.data(), mask.data(), a.size());
  }
#endif
  return scalar::masked_abs_diff(a.data(), b.data(), mask.data(), a.size());
}

void pointwise_min(std::span<const double> a, std::span<const double> b, std::span<double> out) {
  check_sizes(a.size(), b.size(), out.size());
#if defined(EIKFAC_HAVE_AVX2)
  if (active_isa() == Isa::Avx2) {
    avx2::pointwise_min(a.data(), b.data(), out.data(), a.size());
    return;
  }
#endif
  scalar::pointwise_min(a.data(), b.data(), out.data(), a.size());
}

}  // namespace eikfac::kernels
