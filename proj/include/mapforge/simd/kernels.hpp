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

#ifndef MAPFORGE__SIMD__KERNELS_HPP_
#define MAPFORGE__SIMD__KERNELS_HPP_

// Data-parallel inner loops with a scalar reference and vector variants.
//
// Every variant performs the same IEEE operations in the same order per
// output element (no FMA, no reassociation), so all variants are required to
// be bit-identical to the scalar reference. The build disables FP contraction
// globally to keep that true.

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

namespace mapforge::simd
{

enum class Isa { scalar, avx2 };

/// Segment [a, a + d] with squared length len2 and squared capsule radius r2.
struct CapsuleSegment
{
  double ax;
  double ay;
  double dx;
  double dy;
  double len2;
  double r2;
};

struct KernelTable
{
  Isa isa;

  /// out[i] = min_j (ax[i] - bx[j])^2 + (ay[i] - by[j])^2, m >= 1.
  void (*nearest_sq_dist)(
    const double * ax, const double * ay, std::size_t n, const double * bx, const double * by, std::size_t m,
    double * out);

  /// For pixel centers (xs[i], y), sets row[i] = 255 when the squared distance
  /// to the segment is <= r2. Other bytes are left untouched.
  void (*capsule_row)(const double * xs, std::size_t count, double y, const CapsuleSegment & seg, std::uint8_t * row);

  /// out[k] = sum_i (|px[i] - gx[i + k]| + |py[i] - gy[i + k]|) for k < shifts,
  /// summed in increasing i. gx and gy hold n + shifts - 1 values.
  void (*l1_shift_sums)(
    const double * px, const double * py, std::size_t n, const double * gx, const double * gy, std::size_t shifts,
    double * out);
};

std::string_view isa_name(Isa isa);
bool isa_supported(Isa isa);
std::vector<Isa> supported_isas();

/// Table for a specific ISA; throws std::runtime_error if unsupported.
const KernelTable & kernels_for(Isa isa);

/// Active table: MAPFORGE_SIMD=scalar|avx2 if set, otherwise the best supported.
const KernelTable & kernels();

namespace detail
{
extern const KernelTable kScalarKernels;
#if defined(MAPFORGE_HAVE_AVX2)
extern const KernelTable kAvx2Kernels;
#endif
}  // namespace detail

}  // namespace mapforge::simd

#endif  // MAPFORGE__SIMD__KERNELS_HPP_
