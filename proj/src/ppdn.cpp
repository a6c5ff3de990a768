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

#include "mapforge/ppdn.hpp"

#include "mapforge/parallel.hpp"
#include "mapforge/rng.hpp"

#include <cmath>
#include <limits>

namespace mapforge::ppdn
{
namespace
{
// Counter word 3 of every noise draw; keeps these streams disjoint from any
// other consumer of the same seed.
constexpr std::uint32_t kNoiseStreamTag = 0x5050444Eu;  // "PPDN"
}  // namespace

void NoiseSpec::validate() const
{
  if (!(rot_max >= 0.0) || !(trans_max >= 0.0)) {
    throw GeometryError("rot_max and trans_max must be non-negative");
  }
  if (!(scale_min > 0.0) || !(scale_min <= scale_max)) {
    throw GeometryError("scale range must satisfy 0 < scale_min <= scale_max");
  }
  if (!(curv_min > 0.0) || !(curv_min <= curv_max)) {
    throw GeometryError("curvature range must satisfy 0 < curv_min <= curv_max");
  }
  if (groups > std::numeric_limits<std::uint32_t>::max()) {
    throw GeometryError("too many denoise groups");
  }
}

MapElement apply_rotation_noise(const MapElement & e, double theta)
{
  const Point2 anchor = anchor_point(e);
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  MapElement out{e.label, {}, e.closed};
  out.points.reserve(e.points.size());
  for (const auto & p : e.points) {
    const Point2 d = p - anchor;
    out.points.push_back({anchor.x + (c * d.x - s * d.y), anchor.y + (s * d.x + c * d.y)});
  }
  return out;
}

MapElement apply_location_noise(const MapElement & e, double dx, double dy)
{
  MapElement out{e.label, {}, e.closed};
  out.points.reserve(e.points.size());
  for (const auto & p : e.points) {
    out.points.push_back({p.x + dx, p.y + dy});
  }
  return out;
}

MapElement apply_scale_noise(const MapElement & e, double sx, double sy)
{
  if (!(sx > 0.0) || !(sy > 0.0)) {
    throw GeometryError("scale factors must be positive");
  }
  const Point2 anchor = anchor_point(e);
  MapElement out{e.label, {}, e.closed};
  out.points.reserve(e.points.size());
  for (const auto & p : e.points) {
    out.points.push_back({anchor.x + (p.x - anchor.x) * sx, anchor.y + (p.y - anchor.y) * sy});
  }
  return out;
}

bool curvature_noise_applicable(const MapElement & e) { return !e.closed && e.points.size() >= 3; }

MapElement apply_curvature_noise(const MapElement & e, double c)
{
  if (e.closed) {
    throw GeometryError("curvature noise is defined for open polylines only");
  }
  if (e.points.size() < 3) {
    throw GeometryError("curvature noise needs at least 3 points");
  }
  const auto headings = segment_headings(e.points);
  MapElement out{e.label, {}, e.closed};
  out.points.reserve(e.points.size());
  out.points.push_back(e.points.front());
  double heading = headings.front();
  for (std::size_t i = 0; i < headings.size(); ++i) {
    if (i > 0) {
      heading += c * wrap_angle(headings[i] - headings[i - 1]);
    }
    const double len = distance(e.points[i], e.points[i + 1]);
    const Point2 & prev = out.points.back();
    out.points.push_back({prev.x + len * std::cos(heading), prev.y + len * std::sin(heading)});
  }
  return out;
}

AppliedNoise sample_noise(const NoiseSpec & spec, std::size_t group_index, std::size_t gt_index)
{
  CounterStream stream(
    spec.seed, static_cast<std::uint32_t>(gt_index), static_cast<std::uint32_t>(group_index), kNoiseStreamTag);
  AppliedNoise noise;
  noise.theta = stream.uniform(-spec.rot_max, spec.rot_max);
  noise.dx = stream.uniform(-spec.trans_max, spec.trans_max);
  noise.dy = stream.uniform(-spec.trans_max, spec.trans_max);
  noise.sx = stream.uniform(spec.scale_min, spec.scale_max);
  noise.sy = stream.uniform(spec.scale_min, spec.scale_max);
  noise.c = stream.uniform(spec.curv_min, spec.curv_max);
  noise.curvature_applied = true;
  return noise;
}

MapElement apply_noise(const MapElement & e, const AppliedNoise & noise)
{
  MapElement out = apply_rotation_noise(e, noise.theta);
  out = apply_scale_noise(out, noise.sx, noise.sy);
  if (noise.curvature_applied) {
    out = apply_curvature_noise(out, noise.c);
  }
  return apply_location_noise(out, noise.dx, noise.dy);
}

std::vector<DenoiseGroup> generate_denoise_groups(
  std::span<const MapElement> gts, const NoiseSpec & spec, std::size_t threads)
{
  spec.validate();
  if (gts.size() > std::numeric_limits<std::uint32_t>::max()) {
    throw GeometryError("too many ground-truth elements");
  }
  for (const auto & gt : gts) {
    gt.validate();
  }
  std::vector<DenoiseGroup> groups(spec.groups);
  parallel_for(spec.groups, threads, [&](std::size_t g) {
    DenoiseGroup & group = groups[g];
    group.group_index = g;
    group.items.reserve(gts.size());
    for (std::size_t i = 0; i < gts.size(); ++i) {
      AppliedNoise noise = sample_noise(spec, g, i);
      if (!curvature_noise_applicable(gts[i])) {
        noise.c = 1.0;
        noise.curvature_applied = false;
      }
      group.items.push_back(DenoiseItem{i, apply_noise(gts[i], noise), noise});
    }
  });
  return groups;
}

}  // namespace mapforge::ppdn
