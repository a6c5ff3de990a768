// Copyright 2026 The Mapforge Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// AVX2 variants. This translation unit is the only one built with -mavx2 and
// is reached only through the dispatch table after a CPUID check.

#include "mapforge/simd/kernels.hpp"

#include <immintrin.h>

#include <algorithm>
#include <cmath>
#include <limits>

namespace mapforge::simd
{
namespace
{

inline __m256d abs_pd(__m256d v) { return _mm256_andnot_pd(_mm256_set1_pd(-0.0), v); }

inline double hmin_pd(__m256d v)
{
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d m = _mm_min_pd(lo, hi);
  const __m128d swapped = _mm_unpackhi_pd(m, m);
  return _mm_cvtsd_f64(_mm_min_sd(m, swapped));
}

void nearest_sq_dist_avx2(
  const double * ax, const double * ay, std::size_t n, const double * bx, const double * by, std::size_t m,
  double * out)
{
  const std::size_t m4 = m - m % 4;
  for (std::size_t i = 0; i < n; ++i) {
    const __m256d vx = _mm256_set1_pd(ax[i]);
    const __m256d vy = _mm256_set1_pd(ay[i]);
    __m256d vbest = _mm256_set1_pd(std::numeric_limits<double>::infinity());
    for (std::size_t j = 0; j < m4; j += 4) {
      const __m256d dx = _mm256_sub_pd(vx, _mm256_loadu_pd(bx + j));
      const __m256d dy = _mm256_sub_pd(vy, _mm256_loadu_pd(by + j));
      const __m256d d2 = _mm256_add_pd(_mm256_mul_pd(dx, dx), _mm256_mul_pd(dy, dy));
      vbest = _mm256_min_pd(vbest, d2);
    }
    double best = hmin_pd(vbest);
    for (std::size_t j = m4; j < m; ++j) {
      const double dx = ax[i] - bx[j];
      const double dy = ay[i] - by[j];
      const double d2 = dx * dx + dy * dy;
      best = d2 < best ? d2 : best;
    }
    out[i] = best;
  }
}

void capsule_row_avx2(const double * xs, std::size_t count, double y, const CapsuleSegment & seg, std::uint8_t * row)
{
  const double py_s = y - seg.ay;
  const __m256d ax = _mm256_set1_pd(seg.ax);
  const __m256d py = _mm256_set1_pd(py_s);
  const __m256d dx = _mm256_set1_pd(seg.dx);
  const __m256d dy = _mm256_set1_pd(seg.dy);
  const __m256d len2 = _mm256_set1_pd(seg.len2);
  const __m256d r2 = _mm256_set1_pd(seg.r2);
  const __m256d zero = _mm256_setzero_pd();
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d py_dy = _mm256_mul_pd(py, dy);
  const std::size_t count4 = count - count % 4;
  for (std::size_t i = 0; i < count4; i += 4) {
    const __m256d px = _mm256_sub_pd(_mm256_loadu_pd(xs + i), ax);
    __m256d t = _mm256_div_pd(_mm256_add_pd(_mm256_mul_pd(px, dx), py_dy), len2);
    t = _mm256_min_pd(_mm256_max_pd(t, zero), one);
    const __m256d ex = _mm256_sub_pd(px, _mm256_mul_pd(t, dx));
    const __m256d ey = _mm256_sub_pd(py, _mm256_mul_pd(t, dy));
    const __m256d d2 = _mm256_add_pd(_mm256_mul_pd(ex, ex), _mm256_mul_pd(ey, ey));
    const int mask = _mm256_movemask_pd(_mm256_cmp_pd(d2, r2, _CMP_LE_OQ));
    if (mask == 0) {
      continue;
    }
    for (int lane = 0; lane < 4; ++lane) {
      if (mask & (1 << lane)) {
        row[i + static_cast<std::size_t>(lane)] = 255;
      }
    }
  }
  for (std::size_t i = count4; i < count; ++i) {
    const double px = xs[i] - seg.ax;
    double t = (px * seg.dx + py_s * seg.dy) / seg.len2;
    t = std::min(std::max(t, 0.0), 1.0);
    const double ex = px - t * seg.dx;
    const double ey = py_s - t * seg.dy;
    if (ex * ex + ey * ey <= seg.r2) {
      row[i] = 255;
    }
  }
}

void l1_shift_sums_avx2(
  const double * px, const double * py, std::size_t n, const double * gx, const double * gy, std::size_t shifts,
  double * out)
{
  const std::size_t shifts4 = shifts - shifts % 4;
  for (std::size_t k = 0; k < shifts4; k += 4) {
    __m256d acc = _mm256_setzero_pd();
    for (std::size_t i = 0; i < n; ++i) {
      const __m256d dx = _mm256_sub_pd(_mm256_set1_pd(px[i]), _mm256_loadu_pd(gx + i + k));
      const __m256d dy = _mm256_sub_pd(_mm256_set1_pd(py[i]), _mm256_loadu_pd(gy + i + k));
      acc = _mm256_add_pd(acc, _mm256_add_pd(abs_pd(dx), abs_pd(dy)));
    }
    _mm256_storeu_pd(out + k, acc);
  }
  for (std::size_t k = shifts4; k < shifts; ++k) {
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      sum = sum + (std::fabs(px[i] - gx[i + k]) + std::fabs(py[i] - gy[i + k]));
    }
    out[k] = sum;
  }
}

}  // namespace

namespace detail
{
const KernelTable kAvx2Kernels{Isa::avx2, nearest_sq_dist_avx2, capsule_row_avx2, l1_shift_sums_avx2};
}  // namespace detail

}  // namespace mapforge::simd
