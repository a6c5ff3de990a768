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

#ifndef MAPFORGE__PPDN_HPP_
#define MAPFORGE__PPDN_HPP_

#include "mapforge/map_core.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace mapforge::ppdn
{

/// Sampling ranges for physical-prior query noise.
///
/// theta ~ U[-rot_max, rot_max], dx, dy ~ U[-trans_max, trans_max],
/// sx, sy ~ U[scale_min, scale_max], c ~ U[curv_min, curv_max].
struct NoiseSpec
{
  double rot_max{0.2617993877991494};  // 15 degrees
  double trans_max{1.0};
  double scale_min{0.9};
  double scale_max{1.1};
  double curv_min{0.9};
  double curv_max{1.1};
  std::size_t groups{1};
  std::uint64_t seed{0};

  void validate() const;
};

/// The parameters actually applied to one element. `curvature_applied` is
/// false for closed or short elements, in which case `c` is reported as 1.
struct AppliedNoise
{
  double theta{0.0};
  double dx{0.0};
  double dy{0.0};
  double sx{1.0};
  double sy{1.0};
  double c{1.0};
  bool curvature_applied{false};
};

struct DenoiseItem
{
  std::size_t gt_index{0};
  MapElement noised;
  AppliedNoise applied;
};

struct DenoiseGroup
{
  std::size_t group_index{0};
  std::vector<DenoiseItem> items;
};

/// Rotates every point by `theta` about the element's anchor.
MapElement apply_rotation_noise(const MapElement & e, double theta);

/// Shifts every point by the same (dx, dy).
MapElement apply_location_noise(const MapElement & e, double dx, double dy);

/// Scales anchor-relative coordinates per axis. Throws on non-positive factors.
MapElement apply_scale_noise(const MapElement & e, double sx, double sy);

/// Multiplies every turn angle by `c` and rebuilds the polyline by dead
/// reckoning from p0 with the original first heading and segment lengths.
/// Throws for closed elements or fewer than 3 points.
MapElement apply_curvature_noise(const MapElement & e, double c);

/// Whether apply_curvature_noise accepts the element.
bool curvature_noise_applicable(const MapElement & e);

/// Samples the noise for (group, element) from its own counter stream.
AppliedNoise sample_noise(const NoiseSpec & spec, std::size_t group_index, std::size_t gt_index);

/// Applies rotation -> scale -> curvature -> location.
MapElement apply_noise(const MapElement & e, const AppliedNoise & noise);

/// Produces `spec.groups` noised copies of the ground truth. Output is a pure
/// function of (gts, spec); `threads` only changes how the work is scheduled.
std::vector<DenoiseGroup> generate_denoise_groups(
  std::span<const MapElement> gts, const NoiseSpec & spec, std::size_t threads = 1);

}  // namespace mapforge::ppdn

#endif  // MAPFORGE__PPDN_HPP_
