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

#include "mapforge/synthetic.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>

namespace mapforge::synthetic
{
namespace
{
constexpr std::uint32_t kSceneTag = 0x53594E54u;  // "SYNT"
constexpr double kPi = std::numbers::pi;
}  // namespace

MapElement random_polyline(CounterStream & rng, ClassLabel label, const PerceptionRange & range, std::size_t num_points)
{
  MapElement e{label, {}, false};
  Point2 p{rng.uniform(range.x_min, range.x_max), rng.uniform(range.y_min, range.y_max)};
  double heading = rng.uniform(-kPi, kPi);
  e.points.push_back(p);
  while (e.points.size() < num_points) {
    const double len = rng.uniform(1.0, 5.0);
    p = {p.x + len * std::cos(heading), p.y + len * std::sin(heading)};
    e.points.push_back(p);
    heading += rng.uniform(-0.5, 0.5);
  }
  return e;
}

MapElement random_polygon(CounterStream & rng, const PerceptionRange & range)
{
  const Point2 c{rng.uniform(range.x_min, range.x_max), rng.uniform(range.y_min, range.y_max)};
  const double hx = rng.uniform(1.0, 4.0);
  const double hy = rng.uniform(1.0, 3.0);
  const double yaw = rng.uniform(-kPi, kPi);
  const double cs = std::cos(yaw);
  const double sn = std::sin(yaw);
  MapElement e{ClassLabel::ped_crossing, {}, true};
  const double corners[4][2] = {{-1, -1}, {1, -1}, {1, 1}, {-1, 1}};
  for (const auto & k : corners) {
    const double lx = k[0] * hx + rng.uniform(-0.3, 0.3);
    const double ly = k[1] * hy + rng.uniform(-0.3, 0.3);
    e.points.push_back({c.x + cs * lx - sn * ly, c.y + sn * lx + cs * ly});
  }
  return e;
}

MapElement random_element(CounterStream & rng, const PerceptionRange & range)
{
  const double pick = rng.next_unit();
  if (pick < 0.25) {
    return random_polygon(rng, range);
  }
  const ClassLabel label = pick < 0.5 ? ClassLabel::divider : pick < 0.75 ? ClassLabel::boundary : ClassLabel::centerline;
  const auto n = 3 + static_cast<std::size_t>(rng.next_unit() * 6.0);
  return random_polyline(rng, label, range, n);
}

std::vector<io::SceneRecord> make_frames(
  std::size_t num_frames, std::size_t elements_per_frame, std::uint64_t seed, const PerceptionRange & range)
{
  std::vector<io::SceneRecord> frames;
  frames.reserve(num_frames);
  for (std::size_t f = 0; f < num_frames; ++f) {
    io::SceneRecord rec;
    char buf[32];
    std::snprintf(buf, sizeof(buf), "scene-%03zu", f / 10);
    rec.scene_id = buf;
    std::snprintf(buf, sizeof(buf), "%06zu", f);
    rec.frame_id = buf;
    CounterStream pose_rng(seed, static_cast<std::uint32_t>(f), 0xFFFFFFFFu, kSceneTag);
    rec.ego_pose = {pose_rng.uniform(-500.0, 500.0), pose_rng.uniform(-500.0, 500.0), pose_rng.uniform(-kPi, kPi)};
    rec.ego_pose.yaw = wrap_angle(rec.ego_pose.yaw);
    for (std::size_t i = 0; i < elements_per_frame; ++i) {
      CounterStream rng(seed, static_cast<std::uint32_t>(f), static_cast<std::uint32_t>(i), kSceneTag);
      rec.elements.push_back(random_element(rng, range));
    }
    frames.push_back(std::move(rec));
  }
  return frames;
}

}  // namespace mapforge::synthetic
