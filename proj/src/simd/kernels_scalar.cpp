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

#include "mapforge/simd/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mapforge::simd
{
namespace
{

void nearest_sq_dist_scalar(
  const double * ax, const double * ay, std::size_t n, const double * bx, const double * by, std::size_t m,
  double * out)
{
  for (std::size_t i = 0; i < n; ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < m; ++j) {
      const double dx = ax[i] - bx[j];
      const double dy = ay[i] - by[j];
      const double d2 = dx * dx + dy * dy;
      best = d2 < best ? d2 : best;
    }
    out[i] = best;
  }
}

void capsule_row_scalar(const double * xs, std::size_t count, double y, const CapsuleSegment & seg, std::uint8_t * row)
{
  const double py = y - seg.ay;
  for (std::size_t i = 0; i < count; ++i) {
    const double px = xs[i] - seg.ax;
    double t = (px * seg.dx + py * seg.dy) / seg.len2;
    t = std::min(std::max(t, 0.0), 1.0);
    const double ex = px - t * seg.dx;
    const double ey = py - t * seg.dy;
    if (ex * ex + ey * ey <= seg.r2) {
      row[i] = 255;
    }
  }
}

void l1_shift_sums_scalar(
  const double * px, const double * py, std::size_t n, const double * gx, const double * gy, std::size_t shifts,
  double * out)
{
  for (std::size_t k = 0; k < shifts; ++k) {
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
const KernelTable kScalarKernels{Isa::scalar, nearest_sq_dist_scalar, capsule_row_scalar, l1_shift_sums_scalar};
}  // namespace detail

}  // namespace mapforge::simd
