#include <algorithm>
#include <cmath>

#include "eikfac/kernels.hpp"

namespace eikfac::kernels::scalar {

AbsDiff masked_abs_diff(const double* a, const double* b, const std::uint8_t* mask,
                        std::size_t n) {
  double lane[4] = {0.0, 0.0, 0.0, 0.0};
  double linf = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (mask[i] == 0) continue;
    const double d = std::abs(a[i] - b[i]);
    lane[i & 3] += d;
    linf = std::max(linf, d);
    ++count;
  }
  return {linf, (lane[0] + lane[1]) + (lane[2] + lane[3]), count};
}

void pointwise_min(const double* a, const double* b, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] < b[i] ? a[i] : b[i];
}

}  // namespace eikfac::kernels::scalar
