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

#ifndef MAPFORGE__RASTER_HPP_
#define MAPFORGE__RASTER_HPP_

#include "mapforge/map_core.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace mapforge::raster
{

struct RasterSpec
{
  double resolution{0.15};
  double line_half_width{0.5};
  bool fill_polygons{true};

  void validate() const;
};

/// Continuous pixel coordinates; integer values are pixel centers.
struct PixelCoord
{
  double row{0.0};
  double col{0.0};
};

/// Read-only view of one class channel.
struct MaskView
{
  std::size_t height{0};
  std::size_t width{0};
  std::span<const std::uint8_t> data;
};

/// Per-class foreground masks over the perception range. Row 0 is the
/// forward-most row (y_max), column 0 the left-most (x_min). Data is
/// class-major then row-major, one byte per pixel holding 0 or 255.
struct BevGrid
{
  std::size_t height{0};
  std::size_t width{0};
  double resolution{0.15};
  PerceptionRange range{};
  std::vector<std::uint8_t> data;

  static BevGrid empty(const PerceptionRange & range, double resolution);

  std::size_t channel_size() const { return height * width; }
  std::span<std::uint8_t> channel(ClassLabel label);
  MaskView view(ClassLabel label) const;
};

PixelCoord world_to_pixel(Point2 p, const BevGrid & grid);
Point2 pixel_to_world(PixelCoord px, const BevGrid & grid);

/// Pixel-center inclusion: a pixel is set when its center lies within
/// line_half_width of an open polyline of its class, or inside (even-odd) a
/// closed polygon of its class when fill_polygons. With fill_polygons off,
/// polygon outlines are drawn like polylines. Elements are clipped to the
/// range first.
BevGrid rasterize_elements(std::span<const MapElement> elements, const RasterSpec & spec, const PerceptionRange & range);

/// |a & b| / |a | b|, 1 when both are empty. Throws on shape mismatch.
double mask_iou(const MaskView & a, const MaskView & b);

}  // namespace mapforge::raster

#endif  // MAPFORGE__RASTER_HPP_
