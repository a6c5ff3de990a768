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

#ifndef MAPFORGE__MAP_CORE_HPP_
#define MAPFORGE__MAP_CORE_HPP_

#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace mapforge
{

/// Raised when an input violates a documented precondition.
class GeometryError : public std::invalid_argument
{
public:
  using std::invalid_argument::invalid_argument;
};

enum class ClassLabel { ped_crossing = 0, divider = 1, boundary = 2, centerline = 3 };

inline constexpr std::size_t kNumClasses = 4;
inline constexpr std::array<ClassLabel, kNumClasses> kAllClasses = {
  ClassLabel::ped_crossing, ClassLabel::divider, ClassLabel::boundary, ClassLabel::centerline};

std::string_view to_string(ClassLabel label);
/// Parses the lowercase snake-case class name; nullopt for unknown names.
std::optional<ClassLabel> parse_class_label(std::string_view name);
inline std::size_t class_index(ClassLabel label) { return static_cast<std::size_t>(label); }
/// Polygon-shaped classes are stored as closed loops.
inline bool is_closed_class(ClassLabel label) { return label == ClassLabel::ped_crossing; }

/// Ego-frame coordinates in meters: +x right, +y forward.
struct Point2
{
  double x{0.0};
  double y{0.0};

  friend bool operator==(const Point2 &, const Point2 &) = default;
};

inline Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
inline Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
inline Point2 operator*(double s, Point2 p) { return {s * p.x, s * p.y}; }
inline double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point2 a, Point2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Point2 p) { return std::hypot(p.x, p.y); }
inline double distance(Point2 a, Point2 b) { return norm(a - b); }

/// Minimum spacing between consecutive stored points.
inline constexpr double kMinPointSpacing = 1e-9;

/// One vectorized road element. Closed loops do not repeat the first vertex.
struct MapElement
{
  ClassLabel label{ClassLabel::divider};
  std::vector<Point2> points;
  bool closed{false};

  /// Throws GeometryError if the element violates its invariants.
  void validate() const;

  friend bool operator==(const MapElement &, const MapElement &) = default;
};

/// Builds an element whose closed flag follows its class.
MapElement make_element(ClassLabel label, std::vector<Point2> points);

struct PerceptionRange
{
  double x_min{-15.0};
  double x_max{15.0};
  double y_min{-30.0};
  double y_max{30.0};

  void validate() const;
  double x_extent() const { return x_max - x_min; }
  double y_extent() const { return y_max - y_min; }
  bool contains(Point2 p, double tolerance = 0.0) const
  {
    return p.x >= x_min - tolerance && p.x <= x_max + tolerance && p.y >= y_min - tolerance &&
           p.y <= y_max + tolerance;
  }

  friend bool operator==(const PerceptionRange &, const PerceptionRange &) = default;
};

/// 30 m x 60 m base range.
inline constexpr PerceptionRange kBaseRange{-15.0, 15.0, -30.0, 30.0};
/// 60 m x 90 m long range.
inline constexpr PerceptionRange kLongRange{-30.0, 30.0, -45.0, 45.0};

/// SE(2) pose of the ego vehicle in a world frame.
struct EgoPose
{
  double x{0.0};
  double y{0.0};
  double yaw{0.0};
};

/// Wraps an angle to (-pi, pi].
double wrap_angle(double angle);

/// Sum of segment lengths, including the closing edge when `closed`.
double polyline_length(std::span<const Point2> points, bool closed = false);

/// Resamples to `n` points with uniform arc-length spacing. Open polylines keep
/// both endpoints; closed loops start at points[0] and walk the perimeter once
/// without repeating the start.
std::vector<Point2> resample_polyline(std::span<const Point2> points, std::size_t n, bool closed = false);

/// Arithmetic mean of the stored points.
Point2 anchor_point(const MapElement & element);
Point2 anchor_point(std::span<const Point2> points);

/// Discrete curvature at interior vertices (length = points.size() - 2).
/// The tangent at vertex i is the heading of the outgoing segment, and the
/// heading change is divided by that segment's length.
std::vector<double> curvature_profile(std::span<const Point2> points);

/// Segment headings atan2(p[i+1] - p[i]) of an open polyline.
std::vector<double> segment_headings(std::span<const Point2> points);

/// Re-expresses an element observed at pose `from` in the frame of pose `to`.
MapElement transform_to_frame(const MapElement & element, const EgoPose & from, const EgoPose & to);

/// Clips to the range rectangle. Open polylines split into in-range pieces,
/// closed polygons are clipped against the rectangle. Short pieces are dropped.
std::vector<MapElement> clip_to_range(const MapElement & element, const PerceptionRange & range);

/// Affine map from the range rectangle to the unit square.
std::vector<Point2> normalize_points(std::span<const Point2> points, const PerceptionRange & range);
std::vector<Point2> denormalize_points(std::span<const Point2> points, const PerceptionRange & range);

/// Distance from `p` to segment [a, b].
double point_segment_distance(Point2 p, Point2 a, Point2 b);

/// Distance from `p` to the polyline, including the closing edge when `closed`.
double point_polyline_distance(Point2 p, std::span<const Point2> points, bool closed);

}  // namespace mapforge

#endif  // MAPFORGE__MAP_CORE_HPP_
