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

#include "mapforge/raster.hpp"

#include "mapforge/simd/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mapforge::raster
{
namespace
{

struct IndexSpan
{
  std::size_t begin{0};
  std::size_t end{0};  // exclusive
  bool empty() const { return begin >= end; }
};

// Conservative index range whose centers may fall in [lo, hi] along an axis
// with centers at origin + (i + 0.5) * res.
IndexSpan candidate_span(double lo, double hi, double origin, double res, std::size_t count)
{
  const double first = std::floor((lo - origin) / res - 0.5) - 1.0;
  const double last = std::ceil((hi - origin) / res - 0.5) + 1.0;
  const double b = std::max(first, 0.0);
  const double e = std::min(last + 1.0, static_cast<double>(count));
  if (!(b < e)) {
    return {};
  }
  return {static_cast<std::size_t>(b), static_cast<std::size_t>(e)};
}

class ChannelPainter
{
public:
  ChannelPainter(BevGrid & grid, std::span<std::uint8_t> channel)
  : grid_(grid), channel_(channel), kernels_(simd::kernels())
  {
    xs_.resize(grid.width);
    ys_.resize(grid.height);
    for (std::size_t c = 0; c < grid.width; ++c) {
      xs_[c] = grid.range.x_min + (static_cast<double>(c) + 0.5) * grid.resolution;
    }
    for (std::size_t r = 0; r < grid.height; ++r) {
      ys_[r] = grid.range.y_max - (static_cast<double>(r) + 0.5) * grid.resolution;
    }
  }

  void stroke_segment(Point2 a, Point2 b, double half_width)
  {
    const simd::CapsuleSegment seg{a.x, a.y, b.x - a.x, b.y - a.y, dot(b - a, b - a), half_width * half_width};
    if (seg.len2 == 0.0) {
      return;
    }
    const IndexSpan cols = candidate_span(
      std::min(a.x, b.x) - half_width, std::max(a.x, b.x) + half_width, grid_.range.x_min, grid_.resolution,
      grid_.width);
    // Rows run toward -y, so mirror the axis.
    const IndexSpan rows = candidate_span(
      grid_.range.y_max - (std::max(a.y, b.y) + half_width), grid_.range.y_max - (std::min(a.y, b.y) - half_width),
      0.0, grid_.resolution, grid_.height);
    if (cols.empty() || rows.empty()) {
      return;
    }
    for (std::size_t r = rows.begin; r < rows.end; ++r) {
      kernels_.capsule_row(
        xs_.data() + cols.begin, cols.end - cols.begin, ys_[r], seg, channel_.data() + r * grid_.width + cols.begin);
    }
  }

  void stroke_polyline(std::span<const Point2> pts, bool closed, double half_width)
  {
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
      stroke_segment(pts[i], pts[i + 1], half_width);
    }
    if (closed && pts.size() > 2) {
      stroke_segment(pts.back(), pts.front(), half_width);
    }
  }

  // Even-odd fill. A pixel center (x, y) is inside when an odd number of edge
  // crossings of its row lie strictly to its right.
  void fill_polygon(std::span<const Point2> pts)
  {
    double y_lo = std::numeric_limits<double>::infinity();
    double y_hi = -y_lo;
    double x_lo = y_lo;
    double x_hi = -y_lo;
    for (const auto & p : pts) {
      y_lo = std::min(y_lo, p.y);
      y_hi = std::max(y_hi, p.y);
      x_lo = std::min(x_lo, p.x);
      x_hi = std::max(x_hi, p.x);
    }
    const IndexSpan rows =
      candidate_span(grid_.range.y_max - y_hi, grid_.range.y_max - y_lo, 0.0, grid_.resolution, grid_.height);
    const IndexSpan cols = candidate_span(x_lo, x_hi, grid_.range.x_min, grid_.resolution, grid_.width);
    if (rows.empty() || cols.empty()) {
      return;
    }
    std::vector<double> crossings;
    for (std::size_t r = rows.begin; r < rows.end; ++r) {
      const double y = ys_[r];
      crossings.clear();
      for (std::size_t i = 0, j = pts.size() - 1; i < pts.size(); j = i++) {
        const Point2 & pi = pts[i];
        const Point2 & pj = pts[j];
        if ((pi.y > y) != (pj.y > y)) {
          crossings.push_back((pj.x - pi.x) * (y - pi.y) / (pj.y - pi.y) + pi.x);
        }
      }
      if (crossings.empty()) {
        continue;
      }
      std::sort(crossings.begin(), crossings.end());
      std::uint8_t * row = channel_.data() + r * grid_.width;
      std::size_t passed = 0;  // crossings with x <= pixel center
      for (std::size_t c = cols.begin; c < cols.end; ++c) {
        const double x = xs_[c];
        while (passed < crossings.size() && crossings[passed] <= x) {
          ++passed;
        }
        if ((crossings.size() - passed) % 2 == 1) {
          row[c] = 255;
        }
      }
    }
  }

private:
  BevGrid & grid_;
  std::span<std::uint8_t> channel_;
  const simd::KernelTable & kernels_;
  std::vector<double> xs_;
  std::vector<double> ys_;
};

}  // namespace

void RasterSpec::validate() const
{
  if (!(resolution > 0.0)) {
    throw GeometryError("raster resolution must be positive");
  }
  if (!(line_half_width >= 0.0)) {
    throw GeometryError("line_half_width must be non-negative");
  }
}

BevGrid BevGrid::empty(const PerceptionRange & range, double resolution)
{
  range.validate();
  if (!(resolution > 0.0)) {
    throw GeometryError("raster resolution must be positive");
  }
  const double w = std::round(range.x_extent() / resolution);
  const double h = std::round(range.y_extent() / resolution);
  if (w < 1.0 || h < 1.0) {
    throw GeometryError("raster resolution is coarser than the perception range");
  }
  BevGrid grid;
  grid.width = static_cast<std::size_t>(w);
  grid.height = static_cast<std::size_t>(h);
  grid.resolution = resolution;
  grid.range = range;
  grid.data.assign(kNumClasses * grid.width * grid.height, 0);
  return grid;
}

std::span<std::uint8_t> BevGrid::channel(ClassLabel label)
{
  return std::span<std::uint8_t>(data).subspan(class_index(label) * channel_size(), channel_size());
}

MaskView BevGrid::view(ClassLabel label) const
{
  return {height, width, std::span<const std::uint8_t>(data).subspan(class_index(label) * channel_size(), channel_size())};
}

PixelCoord world_to_pixel(Point2 p, const BevGrid & grid)
{
  return {(grid.range.y_max - p.y) / grid.resolution - 0.5, (p.x - grid.range.x_min) / grid.resolution - 0.5};
}

Point2 pixel_to_world(PixelCoord px, const BevGrid & grid)
{
  return {grid.range.x_min + (px.col + 0.5) * grid.resolution, grid.range.y_max - (px.row + 0.5) * grid.resolution};
}

BevGrid rasterize_elements(std::span<const MapElement> elements, const RasterSpec & spec, const PerceptionRange & range)
{
  spec.validate();
  BevGrid grid = BevGrid::empty(range, spec.resolution);
  std::vector<ChannelPainter> painters;
  painters.reserve(kNumClasses);
  for (const auto label : kAllClasses) {
    painters.emplace_back(grid, grid.channel(label));
  }
  for (const auto & element : elements) {
    ChannelPainter & painter = painters[class_index(element.label)];
    for (const auto & piece : clip_to_range(element, range)) {
      if (piece.closed && spec.fill_polygons) {
        painter.fill_polygon(piece.points);
      } else {
        painter.stroke_polyline(piece.points, piece.closed, spec.line_half_width);
      }
    }
  }
  return grid;
}

double mask_iou(const MaskView & a, const MaskView & b)
{
  if (a.height != b.height || a.width != b.width || a.data.size() != b.data.size()) {
    throw GeometryError("mask_iou requires masks of identical shape");
  }
  std::size_t inter = 0;
  std::size_t uni = 0;
  for (std::size_t i = 0; i < a.data.size(); ++i) {
    const bool x = a.data[i] != 0;
    const bool y = b.data[i] != 0;
    inter += (x && y) ? 1 : 0;
    uni += (x || y) ? 1 : 0;
  }
  return uni == 0 ? 1.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

}  // namespace mapforge::raster
