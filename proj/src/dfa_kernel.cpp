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

#include "mapforge/dfa_kernel.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace mapforge::dfa
{
namespace
{

constexpr double kMinDepth = 1e-6;

// Checks shapes shared by forward and backward passes; returns channel count.
std::size_t check_inputs(
  std::span<const FeaturePyramid> pyramids, std::span<const CameraModel> cams, const SamplePointSet & sp)
{
  sp.validate();
  if (pyramids.size() != cams.size() || pyramids.size() != sp.num_views) {
    throw GeometryError("aggregate: pyramids, cameras and sample views must have the same count");
  }
  std::size_t channels = 0;
  for (std::size_t v = 0; v < pyramids.size(); ++v) {
    pyramids[v].validate();
    cams[v].validate();
    if (pyramids[v].levels.size() != sp.num_levels) {
      throw GeometryError("aggregate: view " + std::to_string(v) + " has the wrong number of levels");
    }
    if (v == 0) {
      channels = pyramids[v].channels();
    } else if (pyramids[v].channels() != channels) {
      throw GeometryError("aggregate: channel count mismatch in view " + std::to_string(v));
    }
  }
  return channels;
}

struct ForwardState
{
  std::vector<Projection> projections;  // per (keypoint, view)
  double weight_sum{0.0};
};

ForwardState project_all(std::span<const CameraModel> cams, const SamplePointSet & sp)
{
  ForwardState st;
  st.projections.reserve(sp.keypoints.size() * sp.num_views);
  for (std::size_t k = 0; k < sp.keypoints.size(); ++k) {
    for (std::size_t v = 0; v < sp.num_views; ++v) {
      const Projection pr = project_point(sp.keypoints[k], cams[v]);
      st.projections.push_back(pr);
      if (!pr.valid) {
        continue;
      }
      for (std::size_t l = 0; l < sp.num_levels; ++l) {
        st.weight_sum += sp.weights[sp.index(k, v, l)];
      }
    }
  }
  return st;
}

AggregateGrad zero_grad(std::span<const FeaturePyramid> pyramids, const SamplePointSet & sp)
{
  AggregateGrad g;
  g.d_offsets.assign(sp.offsets.size(), Point2{});
  g.d_weights.assign(sp.weights.size(), 0.0);
  g.d_features.resize(pyramids.size());
  for (std::size_t v = 0; v < pyramids.size(); ++v) {
    for (const auto & level : pyramids[v].levels) {
      g.d_features[v].emplace_back(level.values.size(), 0.0);
    }
  }
  return g;
}

}  // namespace

CameraModel CameraModel::pinhole(
  double fx, double fy, double cx, double cy, const std::array<double, 16> & extrinsics, std::size_t width,
  std::size_t height)
{
  CameraModel cam;
  cam.intrinsics = {fx, 0.0, cx, 0.0, fy, cy, 0.0, 0.0, 1.0};
  cam.extrinsics = extrinsics;
  cam.width = width;
  cam.height = height;
  return cam;
}

void CameraModel::validate() const
{
  if (!(fx() > 0.0) || !(fy() > 0.0)) {
    throw GeometryError("camera focal lengths must be positive");
  }
  if (width == 0 || height == 0) {
    throw GeometryError("camera image size must be positive");
  }
  const auto & e = extrinsics;
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) {
      const double d = e[i * 4] * e[j * 4] + e[i * 4 + 1] * e[j * 4 + 1] + e[i * 4 + 2] * e[j * 4 + 2];
      if (std::abs(d - (i == j ? 1.0 : 0.0)) > 1e-9) {
        throw GeometryError("camera extrinsic rotation is not orthonormal");
      }
    }
  }
}

void FeaturePyramid::validate() const
{
  if (levels.empty()) {
    throw GeometryError("feature pyramid has no levels");
  }
  if (strides.size() != levels.size()) {
    throw GeometryError("feature pyramid needs one stride per level");
  }
  for (std::size_t l = 0; l < levels.size(); ++l) {
    const auto & g = levels[l];
    if (g.height == 0 || g.width == 0 || g.values.size() != g.height * g.width * g.channels) {
      throw GeometryError("feature level " + std::to_string(l) + " has an inconsistent shape");
    }
    if (g.channels != levels.front().channels) {
      throw GeometryError("feature levels must share a channel count");
    }
    if (l > 0 && !(strides[l - 1] < strides[l])) {
      throw GeometryError("feature pyramid strides must increase");
    }
  }
}

void SamplePointSet::validate() const
{
  const std::size_t count = keypoints.size() * num_views * num_levels;
  if (offsets.size() != count || weights.size() != count) {
    throw GeometryError("sample point set offsets/weights do not match keypoints x views x levels");
  }
  for (std::size_t i = 0; i < count; ++i) {
    if (!std::isfinite(offsets[i].x) || !std::isfinite(offsets[i].y)) {
      throw GeometryError("non-finite sampling offset at index " + std::to_string(i));
    }
    if (!(weights[i] >= 0.0) || !std::isfinite(weights[i])) {
      throw GeometryError("sampling weight at index " + std::to_string(i) + " must be finite and non-negative");
    }
  }
}

Projection project_point(const Vec3 & p, const CameraModel & cam)
{
  const auto & e = cam.extrinsics;
  const double qx = e[0] * p.x + e[1] * p.y + e[2] * p.z + e[3];
  const double qy = e[4] * p.x + e[5] * p.y + e[6] * p.z + e[7];
  const double qz = e[8] * p.x + e[9] * p.y + e[10] * p.z + e[11];
  if (!(qz > kMinDepth)) {
    return {};
  }
  const auto & k = cam.intrinsics;
  const double px = (k[0] * qx + k[1] * qy + k[2] * qz) / qz;
  const double py = (k[3] * qx + k[4] * qy + k[5] * qz) / qz;
  const double w = static_cast<double>(cam.width);
  const double h = static_cast<double>(cam.height);
  if (!(px >= 0.0 && px < w && py >= 0.0 && py < h)) {
    return {};
  }
  return {px / w, py / h, true};
}

BilinearTaps bilinear_taps(const FeatureGrid & level, double u, double v)
{
  const double gx = u * static_cast<double>(level.width) - 0.5;
  const double gy = v * static_cast<double>(level.height) - 0.5;
  BilinearTaps t;
  const double fx0 = std::floor(gx);
  const double fy0 = std::floor(gy);
  t.x0 = static_cast<std::ptrdiff_t>(fx0);
  t.y0 = static_cast<std::ptrdiff_t>(fy0);
  t.fx = gx - fx0;
  t.fy = gy - fy0;
  t.weights = {(1.0 - t.fx) * (1.0 - t.fy), t.fx * (1.0 - t.fy), (1.0 - t.fx) * t.fy, t.fx * t.fy};
  const auto w = static_cast<std::ptrdiff_t>(level.width);
  const auto h = static_cast<std::ptrdiff_t>(level.height);
  for (int i = 0; i < 4; ++i) {
    const std::ptrdiff_t x = t.x0 + (i & 1);
    const std::ptrdiff_t y = t.y0 + (i >> 1);
    t.in_bounds[static_cast<std::size_t>(i)] = x >= 0 && x < w && y >= 0 && y < h;
  }
  return t;
}

namespace
{
inline const double * tap_values(const FeatureGrid & level, const BilinearTaps & t, int i)
{
  const auto x = static_cast<std::size_t>(t.x0 + (i & 1));
  const auto y = static_cast<std::size_t>(t.y0 + (i >> 1));
  return level.values.data() + (y * level.width + x) * level.channels;
}
}  // namespace

std::vector<double> bilinear_sample(const FeatureGrid & level, double u, double v)
{
  std::vector<double> out(level.channels, 0.0);
  const BilinearTaps t = bilinear_taps(level, u, v);
  for (int i = 0; i < 4; ++i) {
    if (!t.in_bounds[static_cast<std::size_t>(i)]) {
      continue;
    }
    const double * f = tap_values(level, t, i);
    const double w = t.weights[static_cast<std::size_t>(i)];
    for (std::size_t c = 0; c < level.channels; ++c) {
      out[c] += w * f[c];
    }
  }
  return out;
}

BilinearGrad bilinear_sample_grad(const FeatureGrid & level, double u, double v)
{
  BilinearGrad g;
  g.taps = bilinear_taps(level, u, v);
  g.d_du.assign(level.channels, 0.0);
  g.d_dv.assign(level.channels, 0.0);
  const auto & t = g.taps;
  // d weight / d gx and d weight / d gy for the four taps.
  const std::array<double, 4> dwx = {-(1.0 - t.fy), 1.0 - t.fy, -t.fy, t.fy};
  const std::array<double, 4> dwy = {-(1.0 - t.fx), -t.fx, 1.0 - t.fx, t.fx};
  const double sx = static_cast<double>(level.width);
  const double sy = static_cast<double>(level.height);
  for (int i = 0; i < 4; ++i) {
    const auto ii = static_cast<std::size_t>(i);
    if (!t.in_bounds[ii]) {
      continue;
    }
    const double * f = tap_values(level, t, i);
    for (std::size_t c = 0; c < level.channels; ++c) {
      g.d_du[c] += sx * dwx[ii] * f[c];
      g.d_dv[c] += sy * dwy[ii] * f[c];
    }
  }
  return g;
}

AggregatedFeature aggregate(
  std::span<const FeaturePyramid> pyramids, std::span<const CameraModel> cams, const SamplePointSet & sp)
{
  const std::size_t channels = check_inputs(pyramids, cams, sp);
  const ForwardState st = project_all(cams, sp);
  AggregatedFeature out;
  out.values.assign(channels, 0.0);
  out.valid.reserve(st.projections.size());
  for (const auto & pr : st.projections) {
    out.valid.push_back(pr.valid ? 1 : 0);
  }
  if (!(st.weight_sum > 0.0)) {
    return out;
  }
  for (std::size_t k = 0; k < sp.keypoints.size(); ++k) {
    for (std::size_t v = 0; v < sp.num_views; ++v) {
      const Projection & pr = st.projections[k * sp.num_views + v];
      if (!pr.valid) {
        continue;
      }
      for (std::size_t l = 0; l < sp.num_levels; ++l) {
        const std::size_t idx = sp.index(k, v, l);
        const double w = sp.weights[idx] / st.weight_sum;
        if (w == 0.0) {
          continue;
        }
        const auto s = bilinear_sample(pyramids[v].levels[l], pr.u + sp.offsets[idx].x, pr.v + sp.offsets[idx].y);
        for (std::size_t c = 0; c < channels; ++c) {
          out.values[c] += w * s[c];
        }
      }
    }
  }
  return out;
}

AggregateGrad aggregate_backward(
  std::span<const FeaturePyramid> pyramids, std::span<const CameraModel> cams, const SamplePointSet & sp,
  std::span<const double> grad_out)
{
  const std::size_t channels = check_inputs(pyramids, cams, sp);
  if (grad_out.size() != channels) {
    throw GeometryError("aggregate_backward: upstream gradient has the wrong size");
  }
  AggregateGrad g = zero_grad(pyramids, sp);
  const ForwardState st = project_all(cams, sp);
  if (!(st.weight_sum > 0.0)) {
    return g;
  }
  const AggregatedFeature fwd = aggregate(pyramids, cams, sp);
  double g_dot_out = 0.0;
  for (std::size_t c = 0; c < channels; ++c) {
    g_dot_out += grad_out[c] * fwd.values[c];
  }
  for (std::size_t k = 0; k < sp.keypoints.size(); ++k) {
    for (std::size_t v = 0; v < sp.num_views; ++v) {
      const Projection & pr = st.projections[k * sp.num_views + v];
      if (!pr.valid) {
        continue;
      }
      for (std::size_t l = 0; l < sp.num_levels; ++l) {
        const std::size_t idx = sp.index(k, v, l);
        const FeatureGrid & level = pyramids[v].levels[l];
        const double u = pr.u + sp.offsets[idx].x;
        const double vv = pr.v + sp.offsets[idx].y;
        const BilinearGrad bg = bilinear_sample_grad(level, u, vv);
        const auto s = bilinear_sample(level, u, vv);
        const double w = sp.weights[idx] / st.weight_sum;

        double g_du = 0.0;
        double g_dv = 0.0;
        double g_s = 0.0;
        for (std::size_t c = 0; c < channels; ++c) {
          g_du += grad_out[c] * bg.d_du[c];
          g_dv += grad_out[c] * bg.d_dv[c];
          g_s += grad_out[c] * s[c];
        }
        g.d_offsets[idx] = {w * g_du, w * g_dv};
        // out = sum_t w_t s_t / sum_t w_t  =>  d out / d w_t = (s_t - out) / sum.
        g.d_weights[idx] = (g_s - g_dot_out) / st.weight_sum;

        auto & df = g.d_features[v][l];
        for (int i = 0; i < 4; ++i) {
          const auto ii = static_cast<std::size_t>(i);
          if (!bg.taps.in_bounds[ii]) {
            continue;
          }
          const auto x = static_cast<std::size_t>(bg.taps.x0 + (i & 1));
          const auto y = static_cast<std::size_t>(bg.taps.y0 + (i >> 1));
          double * cell = df.data() + (y * level.width + x) * channels;
          const double coeff = w * bg.taps.weights[ii];
          for (std::size_t c = 0; c < channels; ++c) {
            cell[c] += coeff * grad_out[c];
          }
        }
      }
    }
  }
  return g;
}

DecoupledFeatures decoupled_aggregate(
  std::span<const FeaturePyramid> pyramids, std::span<const CameraModel> cams, const SamplePointSet & cls_sp,
  const SamplePointSet & reg_sp)
{
  return {aggregate(pyramids, cams, cls_sp), aggregate(pyramids, cams, reg_sp)};
}

DecoupledGrad decoupled_aggregate_backward(
  std::span<const FeaturePyramid> pyramids, std::span<const CameraModel> cams, const SamplePointSet & cls_sp,
  const SamplePointSet & reg_sp, std::span<const double> grad_cls, std::span<const double> grad_reg)
{
  return {aggregate_backward(pyramids, cams, cls_sp, grad_cls), aggregate_backward(pyramids, cams, reg_sp, grad_reg)};
}

std::vector<Vec3> keypoints_from_element(const MapElement & element, std::size_t n, double z)
{
  const auto pts = resample_polyline(element.points, n, element.closed);
  std::vector<Vec3> out;
  out.reserve(pts.size());
  for (const auto & p : pts) {
    out.push_back({p.x, p.y, z});
  }
  return out;
}

std::vector<CameraModel> make_surround_rig(
  std::size_t num_cams, std::size_t width, std::size_t height, double focal, double mount_height)
{
  std::vector<CameraModel> rig;
  rig.reserve(num_cams);
  for (std::size_t i = 0; i < num_cams; ++i) {
    // Optical axis heading in the ego frame, starting at +y.
    const double psi = std::numbers::pi / 2.0 + 2.0 * std::numbers::pi * static_cast<double>(i) /
                                                    static_cast<double>(std::max<std::size_t>(num_cams, 1));
    const double c = std::cos(psi);
    const double s = std::sin(psi);
    // Rows: camera x (right), y (down), z (forward) expressed in ego axes.
    const std::array<double, 3> rx = {s, -c, 0.0};
    const std::array<double, 3> ry = {0.0, 0.0, -1.0};
    const std::array<double, 3> rz = {c, s, 0.0};
    const std::array<double, 3> center = {0.0, 0.0, mount_height};
    auto t = [&](const std::array<double, 3> & r) {
      return -(r[0] * center[0] + r[1] * center[1] + r[2] * center[2]);
    };
    const std::array<double, 16> ext = {
      rx[0], rx[1], rx[2], t(rx), ry[0], ry[1], ry[2], t(ry), rz[0], rz[1], rz[2], t(rz), 0.0, 0.0, 0.0, 1.0};
    rig.push_back(CameraModel::pinhole(
      focal, focal, static_cast<double>(width) / 2.0, static_cast<double>(height) / 2.0, ext, width, height));
  }
  return rig;
}

}  // namespace mapforge::dfa
