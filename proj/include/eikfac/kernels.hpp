#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>

namespace eikfac::kernels {

enum class Isa : std::uint8_t { Scalar, Avx2 };

struct AbsDiff {
  double linf = 0.0;
  double sum_abs = 0.0;
  std::size_t count = 0;
};

/// max and sum of |a - b| over entries with mask != 0. The sum is taken in
/// four interleaved partial sums so every ISA gives the same bits.
AbsDiff masked_abs_diff(std::span<const double> a, std::span<const double> b,
                        std::span<const std::uint8_t> mask);

/// out[i] = a[i] < b[i] ? a[i] : b[i]
void pointwise_min(std::span<const double> a, std::span<const double> b, std::span<double> out);

/// ISA used by the dispatching entry points.
Isa active_isa();
bool avx2_available();
/// Force an ISA (tests); nullopt restores auto-detection. Requesting an
/// unavailable ISA throws std::runtime_error.
void set_isa_override(std::optional<Isa> isa);

namespace scalar {
AbsDiff masked_abs_diff(const double* a, const double* b, const std::uint8_t* mask,
                        std::size_t n);
void pointwise_min(const double* a, const double* b, double* out, std::size_t n);
}  // namespace scalar

namespace avx2 {
AbsDiff masked_abs_diff(const double* a, const double* b, const std::uint8_t* mask,
                        std::size_t n);
void pointwise_min(const double* a, const double* b, double* out, std::size_t n);
}  // namespace avx2

}  // namespace eikfac::kernels
