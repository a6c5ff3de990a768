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

#ifndef MAPFORGE__SYNTHETIC_HPP_
#define MAPFORGE__SYNTHETIC_HPP_

// Seeded synthetic map elements and scenes for benchmarks, demos and tests.

#include "mapforge/io.hpp"
#include "mapforge/map_core.hpp"
#include "mapforge/rng.hpp"

#include <cstdint>
#include <vector>

namespace mapforge::synthetic
{

/// Smooth random-walk polyline starting inside `range`.
MapElement random_polyline(CounterStream & rng, ClassLabel label, const PerceptionRange & range, std::size_t num_points);

/// Rotated, jittered quadrilateral centered inside `range`.
MapElement random_polygon(CounterStream & rng, const PerceptionRange & range);

/// Random element of a random class (all four classes).
MapElement random_element(CounterStream & rng, const PerceptionRange & range);

/// `num_frames` frames with `elements_per_frame` elements each, fully
/// determined by `seed`. Frames of one scene share scene_id "scene-000"...
std::vector<io::SceneRecord> make_frames(
  std::size_t num_frames, std::size_t elements_per_frame, std::uint64_t seed,
  const PerceptionRange & range = kBaseRange);

}  // namespace mapforge::synthetic

#endif  // MAPFORGE__SYNTHETIC_HPP_
