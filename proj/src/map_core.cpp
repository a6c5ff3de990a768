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

#include "mapforge/map_core.hpp"

#include <algorithm>
#include <limits>
#include <numbers>
#include <string>

namespace mapforge
{
namespace
{
constexpr double kPi = std::numbers::pi;
constexpr double kMinPieceLength = 1e-6;
constexpr double kDegenerateLength = 1e-9;

Point2 lerp(Point2 a, Point2 b, double t) { return a + t * (b - a); }

Point2 clamp_to_range(Point2 p, const PerceptionRange & r)
{
  return {std::clamp(p.x, r.x_min, r.x_max), std::clamp(p.y, r.y_min, r.y_max)};
}

// Drops consecutive near-duplicates (and the wrap-around duplicate for loops).
std::vector<Point2> dedupe(std::vector<Point2> pts, bool closed)
{
  std::vector<Point2> out;
  out.reserve(pts.size());
  for (const auto & p : pts) {
    if (out.empty() || distance(out.back(), p) > kMinPointSpacing) {
      out.push_back(p);
    }
  }
  if (closed) {
    while (out.size() > 1 && distance(out.back(), out.front()) <= kMinPointSpacing) {
      out.pop_back();
    }
  }
  return out;
}

// Liang-Barsky parameter interval of segment a->b inside the rectangle.
bool clip_segment(Point2 a, Point2 b, const PerceptionRange & r, double & t0, double & t1)
{
  const double dx = b.x - a.x;
  const double dy = b.y - a.y;
  const std::array<double, 4> p = {-dx, dx, -dy, dy};
  const std::array<double, 4> q = {a.x - r.x_min, r.x_max - a.x, a.y - r.y_min, r.y_max - a.y};
  t0 = 0.0;
  t1 = 1.0;
  for (std::size_t i = 0; i < 4; ++i) {
    if (p[i] == 0.0) {
      if (q[i] < 0.0) {
        return false;
      }
      continue;
    }
    const double ratio = q[i] / p[i];
    if (p[i] < 0.0) {
      t0 = std::max(t0, ratio);
    } else {
      t1 = std::min(t1, ratio);
    }
  }
  return t0 <= t1;
}

std::vector<MapElement> clip_open(const MapElement & e, const PerceptionRange & r)
{
  std::vector<std::vector<Point2>> pieces;
  std::vector<Point2> current;
  auto flush = [&]() {
    if (!current.empty()) {
      pieces.push_back(std::move(current));
      current.clear();
    }
  };
  for (std::size_t i = 0; i + 1 < e.points.size(); ++i) {
    const Point2 a = e.points[i];
    const Point2 b = e.points[i + 1];
    double t0 = 0.0;
    double t1 = 1.0;
    if (!clip_segment(a, b, r, t0, t1)) {
      flush();
      continue;
    }
    const Point2 start = t0 == 0.0 ? a : clamp_to_range(lerp(a, b, t0), r);
    const Point2 end = t1 == 1.0 ? b : clamp_to_range(lerp(a, b, t1), r);
    if (t0 > 0.0 || current.empty()) {
      flush();
      current.push_back(start);
    }
    current.push_back(end);
    if (t1 < 1.0) {
      flush();
    }
  }
  flush();

  std::vector<MapElement> out;
  for (auto & piece : pieces) {
    auto pts = dedupe(std::move(piece), false);
    if (pts.size() < 2 || polyline_length(pts) < kMinPieceLength) {
      continue;
    }
    out.push_back(MapElement{e.label, std::move(pts), false});
  }
  return out;
}

// One Sutherland-Hodgman pass against the half-plane `inside`.
template <typename Inside, typename Intersect>
std::vector<Point2> clip_polygon_edge(const std::vector<Point2> & poly, Inside inside, Intersect intersect)
{
  std::vector<Point2> out;
  if (poly.empty()) {
    return out;
  }
  Point2 prev = poly.back();
  bool prev_in = inside(prev);
  for (const auto & cur : poly) {
    const bool cur_in = inside(cur);
    if (cur_in) {
      if (!prev_in) {
        out.push_back(intersect(prev, cur));
      }
      out.push_back(cur);
    } else if (prev_in) {
      out.push_back(intersect(prev, cur));
    }
    prev = cur;
    prev_in = cur_in;
  }
  return out;
}

std::vector<MapElement> clip_closed(const MapElement & e, const PerceptionRange & r)
{
  auto at_x = [](double x) {
    return [x](Point2 a, Point2 b) {
      const double t = (x - a.x) / (b.x - a.x);
      return Point2{x, a.y + t * (b.y - a.y)};
    };
  };
  auto at_y = [](double y) {
    return [y](Point2 a, Point2 b) {
      const double t = (y - a.y) / (b.y - a.y);
      return Point2{a.x + t * (b.x - a.x), y};
    };
  };
  std::vector<Point2> poly = e.points;
  poly = clip_polygon_edge(poly, [&](Point2 p) { return p.x >= r.x_min; }, at_x(r.x_min));
  poly = clip_polygon_edge(poly, [&](Point2 p) { return p.x <= r.x_max; }, at_x(r.x_max));
  poly = clip_polygon_edge(poly, [&](Point2 p) { return p.y >= r.y_min; }, at_y(r.y_min));
  poly = clip_polygon_edge(poly, [&](Point2 p) { return p.y <= r.y_max; }, at_y(r.y_max));
  for (auto & p : poly) {
    p = clamp_to_range(p, r);
  }
  poly = dedupe(std::move(poly), true);
  if (poly.size() < 3 || polyline_length(poly, true) < kMinPieceLength) {
    return {};
  }
  return {MapElement{e.label, std::move(poly), true}};
}

}  // namespace

std::string_view to_string(ClassLabel label)
{
  switch (label) {
    case ClassLabel::ped_crossing:
      return "ped_crossing";
    case ClassLabel::divider:
      return "divider";
    case ClassLabel::boundary:
      return "boundary";
    case ClassLabel::centerline:
      return "centerline";
  }
  return "unknown";
}

std::optional<ClassLabel> parse_class_label(std::string_view name)
{
  for (const auto label : kAllClasses) {
    if (to_string(label) == name) {
      return label;
    }
  }
  return std::nullopt;
}

void MapElement::validate() const
{
  if (points.size() < 2) {
    throw GeometryError("map element needs at least 2 points");
  }
  if (closed != is_closed_class(label)) {
    throw GeometryError(
      "map element of class " + std::string(to_string(label)) +
      (closed ? " must not be closed" : " must be closed"));
  }
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!std::isfinite(points[i].x) || !std::isfinite(points[i].y)) {
      throw GeometryError("non-finite coordinate at point " + std::to_string(i));
    }
    if (i > 0 && distance(points[i - 1], points[i]) <= kMinPointSpacing) {
      throw GeometryError("repeated point at index " + std::to_string(i));
    }
  }
}

MapElement make_element(ClassLabel label, std::vector<Point2> points)
{
  return MapElement{label, std::move(points), is_closed_class(label)};
}

void PerceptionRange::validate() const
{
  if (!(x_min < x_max) || !(y_min < y_max)) {
    throw GeometryError("perception range must satisfy x_min < x_max and y_min < y_max");
  }
}

double wrap_angle(double angle)
{
  double a = std::remainder(angle, 2.0 * kPi);
  if (a <= -kPi) {
    a += 2.0 * kPi;
  }
  return a;
}

double polyline_length(std::span<const Point2> points, bool closed)
{
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < points.size(); ++i) {
    total += distance(points[i], points[i + 1]);
  }
  if (closed && points.size() > 1) {
    total += distance(points.back(), points.front());
  }
  return total;
}

std::vector<Point2> resample_polyline(std::span<const Point2> points, std::size_t n, bool closed)
{
  if (points.size() < 2) {
    throw GeometryError("resample_polyline needs at least 2 input points");
  }
  if (n < 2) {
    throw GeometryError("resample_polyline needs n >= 2");
  }
  std::vector<Point2> verts(points.begin(), points.end());
  if (closed) {
    verts.push_back(points.front());
  }
  std::vector<double> cum(verts.size(), 0.0);
  for (std::size_t i = 1; i < verts.size(); ++i) {
    cum[i] = cum[i - 1] + distance(verts[i - 1], verts[i]);
  }
  const double total = cum.back();
  if (total < kDegenerateLength) {
    throw GeometryError("cannot resample a degenerate polyline");
  }
  // Targets within this distance of a vertex return the vertex itself, so
  // already-uniform inputs come back bit-identical.
  const double snap = 1e-9 * total;
  const double divisor = closed ? static_cast<double>(n) : static_cast<double>(n - 1);

  std::vector<Point2> out;
  out.reserve(n);
  std::size_t seg = 0;
  for (std::size_t k = 0; k < n; ++k) {
    const double s = total * static_cast<double>(k) / divisor;
    while (seg + 2 < verts.size() && cum[seg + 1] < s - snap) {
      ++seg;
    }
    if (std::abs(s - cum[seg]) <= snap) {
      out.push_back(verts[seg]);
    } else if (std::abs(s - cum[seg + 1]) <= snap) {
      out.push_back(verts[seg + 1]);
    } else {
      const double len = cum[seg + 1] - cum[seg];
      const double t = std::clamp((s - cum[seg]) / len, 0.0, 1.0);
      out.push_back(lerp(verts[seg], verts[seg + 1], t));
    }
  }
  if (!closed) {
    out.front() = points.front();
    out.back() = points.back();
  }
  return out;
}

Point2 anchor_point(std::span<const Point2> points)
{
  Point2 sum{};
  for (const auto & p : points) {
    sum = sum + p;
  }
  const double inv = 1.0 / static_cast<double>(points.size());
  return {sum.x * inv, sum.y * inv};
}

Point2 anchor_point(const MapElement & element) { return anchor_point(std::span<const Point2>(element.points)); }

std::vector<double> segment_headings(std::span<const Point2> points)
{
  std::vector<double> headings;
  headings.reserve(points.size() > 0 ? points.size() - 1 : 0);
  for (std::size_t i = 0; i + 1 < points.size(); ++i) {
    const Point2 d = points[i + 1] - points[i];
    headings.push_back(std::atan2(d.y, d.x));
  }
  return headings;
}

std::vector<double> curvature_profile(std::span<const Point2> points)
{
  if (points.size() < 3) {
    throw GeometryError("curvature_profile needs at least 3 points");
  }
  const auto headings = segment_headings(points);
  std::vector<double> kappa;
  kappa.reserve(points.size() - 2);
  for (std::size_t i = 1; i + 1 < points.size(); ++i) {
    const double turn = wrap_angle(headings[i] - headings[i - 1]);
    const double len = distance(points[i], points[i + 1]);
    if (len <= kMinPointSpacing) {
      throw GeometryError("zero-length segment at index " + std::to_string(i));
    }
    kappa.push_back(turn / len);
  }
  return kappa;
}

MapElement transform_to_frame(const MapElement & element, const EgoPose & from, const EgoPose & to)
{
  const double cf = std::cos(from.yaw);
  const double sf = std::sin(from.yaw);
  const double ct = std::cos(to.yaw);
  const double st = std::sin(to.yaw);
  MapElement out{element.label, {}, element.closed};
  out.points.reserve(element.points.size());
  for (const auto & p : element.points) {
    const double wx = cf * p.x - sf * p.y + from.x;
    const double wy = sf * p.x + cf * p.y + from.y;
    const double rx = wx - to.x;
    const double ry = wy - to.y;
    out.points.push_back({ct * rx + st * ry, -st * rx + ct * ry});
  }
  return out;
}

std::vector<MapElement> clip_to_range(const MapElement & element, const PerceptionRange & range)
{
  range.validate();
  return element.closed ? clip_closed(element, range) : clip_open(element, range);
}

std::vector<Point2> normalize_points(std::span<const Point2> points, const PerceptionRange & range)
{
  range.validate();
  std::vector<Point2> out;
  out.reserve(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto & p = points[i];
    if (!range.contains(p, 1e-6)) {
      throw GeometryError("point " + std::to_string(i) + " lies outside the perception range");
    }
    out.push_back({(p.x - range.x_min) / range.x_extent(), (p.y - range.y_min) / range.y_extent()});
  }
  return out;
}

std::vector<Point2> denormalize_points(std::span<const Point2> points, const PerceptionRange & range)
{
  range.validate();
  std::vector<Point2> out;
  out.reserve(points.size());
  for (const auto & p : points) {
    out.push_back({range.x_min + p.x * range.x_extent(), range.y_min + p.y * range.y_extent()});
  }
  return out;
}

double point_segment_distance(Point2 p, Point2 a, Point2 b)
{
  const Point2 ab = b - a;
  const double len2 = dot(ab, ab);
  if (len2 == 0.0) {
    return distance(p, a);
  }
  const double t = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
  return distance(p, lerp(a, b, t));
}

double point_polyline_distance(Point2 p, std::span<const Point2> points, bool closed)
{
  if (points.size() == 1) {
    return distance(p, points.front());
  }
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < points.size(); ++i) {
    best = std::min(best, point_segment_distance(p, points[i], points[i + 1]));
  }
  if (closed && points.size() > 2) {
    best = std::min(best, point_segment_distance(p, points.back(), points.front()));
  }
  return best;
}

}  // namespace mapforge
