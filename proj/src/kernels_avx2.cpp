#include <immintrin.h>

#include <algorithm>
#include <cmath>
#include <cstring>

#include "eikfac/kernels.hpp"

namespace eikfac::kernels::avx2 {

AbsDiff masked_abs_diff(const double* a, const double* b, const std::uint8_t* mask,
                        std::size_t n) {
  const __m256d sign = _mm256_set1_pd(-0.0);
  __m256d sum = _mm256_setzero_pd();
  __m256d vmax = _mm256_setzero_pd();
  std::size_t count = 0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    std::uint32_t bits;
    std::memcpy(&bits, mask + i, 4);
    if (bits == 0) continue;
    const __m256i m64 = _mm256_cvtepu8_epi64(_mm_cvtsi32_si128(static_cast<int>(bits)));
    const __m256d keep =
        _mm256_castsi256_pd(_mm256_cmpgt_epi64(m64, _mm256_setzero_si256()));
    const __m256d d = _mm256_andnot_pd(sign, _mm256_sub_pd(_mm256_loadu_pd(a + i),
                                                           _mm256_loadu_pd(b + i)));
    const __m256d dm = _mm256_and_pd(d, keep);
    sum = _mm256_add_pd(sum, dm);
    vmax = _mm256_max_pd(vmax, dm);
    count += static_cast<std::size_t>(__builtin_popcount(
        static_cast<unsigned>(_mm256_movemask_pd(keep))));
  }
  alignas(32) double lane[4];
  alignas(32) double mx[4];
  _mm256_store_pd(lane, sum);
  _mm256_store_pd(mx, vmax);
  double linf = std::max(std::max(mx[0], mx[1]), std::max(mx[2], mx[3]));
  for (; i < n; ++i) {
    if (mask[i] == 0) continue;
    const double d = std::abs(a[i] - b[i]);
    lane[i & 3] += d;
    linf = std::max(linf, d);
    ++count;
  }
  return {linf, (lane[0] + lane[1]) + (lane[2] + lane[3]), count};
}

void pointwise_min(const double* a, const double* b, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    // min_pd(x, y) returns y unless x < y, matching the scalar select.
    _mm256_storeu_pd(out + i, _mm256_min_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
  }
  for (; i < n; ++i) out[i] = a[i] < b[i] ? a[i] : b[i];
}

}  // namespace eikfac::kernels::avx2
