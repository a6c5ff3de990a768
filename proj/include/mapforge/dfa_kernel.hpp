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

#ifndef MAPFORGE__DFA_KERNEL_HPP_
#define MAPFORGE__DFA_KERNEL_HPP_

// Reference kernel for deformable feature aggregation: keypoints are projected
// into every camera, shifted by per-(keypoint, view, level) offsets in
// normalized image coordinates, bilinearly sampled from each pyramid level,
// and combined with weights renormalized over the valid projections.
//
// Sampling follows the align-corners-false convention with zero padding:
// normalized (u, v) maps to continuous cell coordinates (u * W - 0.5,
// v * H - 0.5), so (u, v) = ((x + 0.5) / W, (y + 0.5) / H) hits cell (x, y).

#include "mapforge/map_core.hpp"

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace mapforge::dfa
{

struct Vec3
{
  double x{0.0};
  double y{0.0};
  double z{0.0};
};

/// Pinhole camera. Both matrices are row-major; extrinsics map world (ego)
/// coordinates to the camera frame (+z along the optical axis).
struct CameraModel
{
  std::array<double, 9> intrinsics{};
  std::array<double, 16> extrinsics{};
  std::size_t width{0};
  std::size_t height{0};

  static CameraModel pinhole(
    double fx, double fy, double cx, double cy, const std::array<double, 16> & extrinsics, std::size_t width,
    std::size_t height);

  void validate() const;
  double fx() const { return intrinsics[0]; }
  double fy() const { return intrinsics[4]; }
  double cx() const { return intrinsics[2]; }
  double cy() const { return intrinsics[5]; }
};

struct Projection
{
  double u{0.0};
  double v{0.0};
  bool valid{false};
};

/// One level of features, stored (row, col, channel) with channel fastest.
struct FeatureGrid
{
  std::size_t height{0};
  std::size_t width{0};
  std::size_t channels{0};
  std::vector<double> values;

  FeatureGrid() = default;
  FeatureGrid(std::size_t h, std::size_t w, std::size_t c) : height(h), width(w), channels(c), values(h * w * c, 0.0) {}

  double & at(std::size_t row, std::size_t col, std::size_t ch) { return values[(row * width + col) * channels + ch]; }
  double at(std::size_t row, std::size_t col, std::size_t ch) const
  {
    return values[(row * width + col) * channels + ch];
  }
};

struct FeaturePyramid
{
  std::vector<FeatureGrid> levels;
  std::vector<double> strides;  // image pixels per cell, increasing

  void validate() const;
  std::size_t channels() const { return levels.empty() ? 0 : levels.front().channels; }
};

/// Keypoints plus per-(keypoint, view, level) offsets and weights, flattened
/// as index ((k * num_views) + view) * num_levels + level.
struct SamplePointSet
{
  std::vector<Vec3> keypoints;
  std::size_t num_views{0};
  std::size_t num_levels{0};
  std::vector<Point2> offsets;
  std::vector<double> weights;

  std::size_t index(std::size_t k, std::size_t view, std::size_t level) const
  {
    return (k * num_views + view) * num_levels + level;
  }
  void validate() const;
};

struct AggregatedFeature
{
  std::vector<double> values;
  /// Per (keypoint, view): 1 when the keypoint projects into the view.
  std::vector<std::uint8_t> valid;
};

/// Four bilinear taps around a sample: corners (x0, y0), (x0 + 1, y0),
/// (x0, y0 + 1), (x0 + 1, y0 + 1). Out-of-grid taps have in_bounds false.
struct BilinearTaps
{
  std::ptrdiff_t x0{0};
  std::ptrdiff_t y0{0};
  double fx{0.0};
  double fy{0.0};
  std::array<double, 4> weights{};
  std::array<bool, 4> in_bounds{};
};

struct BilinearGrad
{
  std::vector<double> d_du;
  std::vector<double> d_dv;
  /// d value_c / d cell_c for the four taps (identical for every channel).
  BilinearTaps taps;
};

Projection project_point(const Vec3 & p, const CameraModel & cam);

BilinearTaps bilinear_taps(const FeatureGrid & level, double u, double v);
std::vector<double> bilinear_sample(const FeatureGrid & level, double u, double v);
BilinearGrad bilinear_sample_grad(const FeatureGrid & level, double u, double v);

AggregatedFeature aggregate(
  std::span<const FeaturePyramid> pyramids, std::span<const CameraModel> cams, const SamplePointSet & sp);

/// Vector-Jacobian products of aggregate() for an upstream gradient.
struct AggregateGrad
{
  std::vector<Point2> d_offsets;                       // per sample, (d/du, d/dv)
  std::vector<double> d_weights;                       // per sample
  std::vector<std::vector<std::vector<double>>> d_features;  // [view][level], same layout as values
};

AggregateGrad aggregate_backward(
  std::span<const FeaturePyramid> pyramids, std::span<const CameraModel> cams, const SamplePointSet & sp,
  std::span<const double> grad_out);

struct DecoupledFeatures
{
  AggregatedFeature cls;
  AggregatedFeature reg;
};

/// Classification and regression branches aggregate from their own sample
/// sets; nothing is shared between them.
DecoupledFeatures decoupled_aggregate(
  std::span<const FeaturePyramid> pyramids, std::span<const CameraModel> cams, const SamplePointSet & cls_sp,
  const SamplePointSet & reg_sp);

struct DecoupledGrad
{
  AggregateGrad cls;
  AggregateGrad reg;
};

DecoupledGrad decoupled_aggregate_backward(
  std::span<const FeaturePyramid> pyramids, std::span<const CameraModel> cams, const SamplePointSet & cls_sp,
  const SamplePointSet & reg_sp, std::span<const double> grad_cls, std::span<const double> grad_reg);

/// Element points resampled to n and lifted to constant height z.
std::vector<Vec3> keypoints_from_element(const MapElement & element, std::size_t n, double z = 0.0);

/// A ring of outward-looking cameras mounted at `mount_height` above the ego
/// origin, the first one facing +y (forward).
std::vector<CameraModel> make_surround_rig(
  std::size_t num_cams, std::size_t width, std::size_t height, double focal, double mount_height = 1.5);

}  // namespace mapforge::dfa

#endif  // MAPFORGE__DFA_KERNEL_HPP_
