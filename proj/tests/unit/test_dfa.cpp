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

#include "dfa_fixtures.hpp"

#include <gtest/gtest.h>

namespace mapforge::dfa
{
namespace
{

FeatureGrid ramp_grid(std::size_t h, std::size_t w, std::size_t c)
{
  FeatureGrid g(h, w, c);
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) {
      for (std::size_t k = 0; k < c; ++k) {
        g.at(y, x, k) = 0.5 * double(x) - 0.25 * double(y) + double(k);
      }
    }
  }
  return g;
}

// Value at (u, v) written out directly from the bilinear definition.
double hand_bilinear(const FeatureGrid & g, double u, double v, std::size_t c)
{
  const double gx = u * double(g.width) - 0.5;
  const double gy = v * double(g.height) - 0.5;
  const double x0 = std::floor(gx);
  const double y0 = std::floor(gy);
  auto cell = [&](double x, double y) {
    if (x < 0 || y < 0 || x >= double(g.width) || y >= double(g.height)) {
      return 0.0;
    }
    return g.at(std::size_t(y), std::size_t(x), c);
  };
  const double ax = gx - x0;
  const double ay = gy - y0;
  return cell(x0, y0) * (1 - ax) * (1 - ay) + cell(x0 + 1, y0) * ax * (1 - ay) + cell(x0, y0 + 1) * (1 - ax) * ay +
         cell(x0 + 1, y0 + 1) * ax * ay;
}

CameraModel forward_camera()
{
  return make_surround_rig(1, 640, 480, 500.0).front();
}

TEST(Projection, OpticalAxisHitsPrincipalPoint)
{
  const CameraModel cam = forward_camera();
  const Projection p = project_point({0.0, 10.0, 1.5}, cam);
  ASSERT_TRUE(p.valid);
  EXPECT_NEAR(p.u, 0.5, 1e-12);
  EXPECT_NEAR(p.v, 0.5, 1e-12);
  EXPECT_FALSE(project_point({0.0, -10.0, 1.5}, cam).valid);
  EXPECT_FALSE(project_point({100.0, 1.0, 1.5}, cam).valid);
}

TEST(Projection, UnprojectRoundTrip)
{
  const auto rig = make_surround_rig(6, 640, 480, 400.0);
  CounterStream rng(12, 0, 0, 0);
  std::size_t checked = 0;
  for (int t = 0; t < 2000; ++t) {
    const auto & cam = rig[static_cast<std::size_t>(t) % rig.size()];
    const Vec3 p{rng.uniform(-30, 30), rng.uniform(-30, 30), rng.uniform(-1, 3)};
    const Projection pr = project_point(p, cam);
    if (!pr.valid) {
      continue;
    }
    const auto & e = cam.extrinsics;
    const double depth = e[8] * p.x + e[9] * p.y + e[10] * p.z + e[11];
    // Back to the camera frame at that depth, then through the inverse rigid transform.
    const double qx = (pr.u * double(cam.width) - cam.cx()) / cam.fx() * depth;
    const double qy = (pr.v * double(cam.height) - cam.cy()) / cam.fy() * depth;
    const double q[3] = {qx - e[3], qy - e[7], depth - e[11]};
    const Vec3 back{e[0] * q[0] + e[4] * q[1] + e[8] * q[2], e[1] * q[0] + e[5] * q[1] + e[9] * q[2],
                    e[2] * q[0] + e[6] * q[1] + e[10] * q[2]};
    const Projection again = project_point(back, cam);
    ASSERT_TRUE(again.valid);
    EXPECT_NEAR(again.u, pr.u, 1e-9);
    EXPECT_NEAR(again.v, pr.v, 1e-9);
    ++checked;
  }
  EXPECT_GT(checked, 200u);
}

TEST(Camera, ValidateRejectsBadModels)
{
  CameraModel cam = forward_camera();
  EXPECT_NO_THROW(cam.validate());
  cam.extrinsics[0] = 2.0;
  EXPECT_THROW(cam.validate(), GeometryError);
  cam = forward_camera();
  cam.intrinsics[0] = 0.0;
  EXPECT_THROW(cam.validate(), GeometryError);
}

TEST(Bilinear, CellCentersAndMidpoints)
{
  const FeatureGrid g = ramp_grid(6, 8, 2);
  const double u = (3 + 0.5) / 8.0;
  const double v = (2 + 0.5) / 6.0;
  EXPECT_EQ(bilinear_sample(g, u, v)[1], g.at(2, 3, 1));
  const auto mid = bilinear_sample(g, 4.0 / 8.0, 3.0 / 6.0);
  EXPECT_NEAR(mid[0], 0.25 * (g.at(2, 3, 0) + g.at(2, 4, 0) + g.at(3, 3, 0) + g.at(3, 4, 0)), 1e-15);
}

TEST(Bilinear, ZeroPaddingOutside)
{
  FeatureGrid g(2, 2, 1);
  g.values = {1, 1, 1, 1};
  EXPECT_EQ(bilinear_sample(g, -1.0, 0.5)[0], 0.0);
  // Corner half a cell outside blends one tap with three zeros.
  EXPECT_NEAR(bilinear_sample(g, 0.0, 0.0)[0], 0.25, 1e-15);
}

TEST(Bilinear, MatchesHandFormula)
{
  CounterStream rng(13, 0, 0, 0);
  FeatureGrid g(7, 9, 3);
  for (auto & v : g.values) {
    v = rng.uniform(-2, 2);
  }
  for (int t = 0; t < 1000; ++t) {
    const double u = rng.uniform(-0.1, 1.1);
    const double v = rng.uniform(-0.1, 1.1);
    const auto s = bilinear_sample(g, u, v);
    for (std::size_t c = 0; c < 3; ++c) {
      EXPECT_NEAR(s[c], hand_bilinear(g, u, v, c), 1e-12);
    }
  }
}

TEST(BilinearGrad, ConstantAndLinearFields)
{
  FeatureGrid flat(5, 5, 1);
  std::fill(flat.values.begin(), flat.values.end(), 3.0);
  const auto gf = bilinear_sample_grad(flat, 0.45, 0.55);
  EXPECT_EQ(gf.d_du[0], 0.0);
  EXPECT_EQ(gf.d_dv[0], 0.0);
  const FeatureGrid ramp = ramp_grid(6, 8, 1);
  const auto gr = bilinear_sample_grad(ramp, 0.43, 0.52);
  EXPECT_DOUBLE_EQ(gr.d_du[0], 0.5 * 8.0);
  EXPECT_DOUBLE_EQ(gr.d_dv[0], -0.25 * 6.0);
}

TEST(BilinearGrad, FiniteDifferences)
{
  CounterStream rng(14, 0, 0, 0);
  FeatureGrid g(6, 10, 2);
  for (auto & v : g.values) {
    v = rng.uniform(-1, 1);
  }
  const double h = 1e-5;
  int checked = 0;
  while (checked < 200) {
    const double u = rng.uniform(0.1, 0.9);
    const double v = rng.uniform(0.1, 0.9);
    const auto t = bilinear_taps(g, u, v);
    if (t.fx < 1e-3 || t.fx > 1 - 1e-3 || t.fy < 1e-3 || t.fy > 1 - 1e-3) {
      continue;
    }
    const auto grad = bilinear_sample_grad(g, u, v);
    for (std::size_t c = 0; c < 2; ++c) {
      const double du = (bilinear_sample(g, u + h, v)[c] - bilinear_sample(g, u - h, v)[c]) / (2 * h);
      const double dv = (bilinear_sample(g, u, v + h)[c] - bilinear_sample(g, u, v - h)[c]) / (2 * h);
      EXPECT_TRUE(fixture::rel_close(grad.d_du[c], du, 1e-5)) << grad.d_du[c] << " vs " << du;
      EXPECT_TRUE(fixture::rel_close(grad.d_dv[c], dv, 1e-5)) << grad.d_dv[c] << " vs " << dv;
    }
    double wsum = 0.0;
    for (const double w : grad.taps.weights) {
      wsum += w;
    }
    EXPECT_NEAR(wsum, 1.0, 1e-15);
    ++checked;
  }
}

struct SingleView
{
  std::vector<CameraModel> cams{forward_camera()};
  std::vector<FeaturePyramid> pyramids;
  SingleView()
  {
    FeaturePyramid p;
    p.levels.push_back(ramp_grid(30, 40, 2));
    p.strides.push_back(16.0);
    pyramids.push_back(p);
  }
};

TEST(Aggregate, SingleSampleEqualsBilinear)
{
  SingleView sv;
  SamplePointSet sp{{{0.5, 12.0, 0.0}}, 1, 1, {{0.0, 0.0}}, {1.0}};
  const auto out = aggregate(sv.pyramids, sv.cams, sp);
  const auto pr = project_point(sp.keypoints[0], sv.cams[0]);
  ASSERT_TRUE(pr.valid);
  EXPECT_EQ(out.values, bilinear_sample(sv.pyramids[0].levels[0], pr.u, pr.v));
  EXPECT_EQ(out.valid, (std::vector<std::uint8_t>{1}));
}

TEST(Aggregate, AllBehindGivesZero)
{
  SingleView sv;
  SamplePointSet sp{{{0.0, -5.0, 0.0}, {1.0, -8.0, 0.0}}, 1, 1, {{0, 0}, {0, 0}}, {0.5, 0.5}};
  const auto out = aggregate(sv.pyramids, sv.cams, sp);
  EXPECT_EQ(out.values, (std::vector<double>{0.0, 0.0}));
  EXPECT_EQ(out.valid, (std::vector<std::uint8_t>{0, 0}));
}

TEST(Aggregate, MatchesTripleLoopOracle)
{
  for (std::uint32_t id = 0; id < 50; ++id) {
    const auto inst = fixture::random_interior_instance(id);
    const auto out = aggregate(inst.pyramids, inst.cams, inst.sp);
    const std::size_t channels = inst.pyramids[0].channels();
    std::vector<double> acc(channels, 0.0);
    double wsum = 0.0;
    for (std::size_t k = 0; k < inst.sp.keypoints.size(); ++k) {
      for (std::size_t v = 0; v < inst.sp.num_views; ++v) {
        const auto pr = project_point(inst.sp.keypoints[k], inst.cams[v]);
        if (!pr.valid) {
          continue;
        }
        for (std::size_t l = 0; l < inst.sp.num_levels; ++l) {
          const auto idx = inst.sp.index(k, v, l);
          wsum += inst.sp.weights[idx];
          for (std::size_t c = 0; c < channels; ++c) {
            acc[c] += inst.sp.weights[idx] * hand_bilinear(inst.pyramids[v].levels[l], pr.u + inst.sp.offsets[idx].x,
                                                          pr.v + inst.sp.offsets[idx].y, c);
          }
        }
      }
    }
    for (std::size_t c = 0; c < channels; ++c) {
      EXPECT_NEAR(out.values[c], acc[c] / wsum, 1e-12);
    }
  }
}

TEST(Aggregate, LinearInFeaturesAndWeightScaleInvariant)
{
  for (std::uint32_t id = 0; id < 20; ++id) {
    auto inst = fixture::random_interior_instance(100 + id);
    const auto base = aggregate(inst.pyramids, inst.cams, inst.sp);
    auto scaled = inst.sp;
    for (auto & w : scaled.weights) {
      w *= 3.7;
    }
    const auto s = aggregate(inst.pyramids, inst.cams, scaled);
    for (std::size_t c = 0; c < base.values.size(); ++c) {
      EXPECT_NEAR(s.values[c], base.values[c], 1e-12);
    }
    CounterStream rng(15, id, 0, 0);
    auto other = fixture::random_pyramids(rng, 2, 320, 192, inst.pyramids[0].channels());
    auto mixed = inst.pyramids;
    for (std::size_t v = 0; v < mixed.size(); ++v) {
      for (std::size_t l = 0; l < mixed[v].levels.size(); ++l) {
        for (std::size_t i = 0; i < mixed[v].levels[l].values.size(); ++i) {
          mixed[v].levels[l].values[i] = 2.0 * inst.pyramids[v].levels[l].values[i] - 0.5 * other[v].levels[l].values[i];
        }
      }
    }
    const auto o = aggregate(other, inst.cams, inst.sp);
    const auto m = aggregate(mixed, inst.cams, inst.sp);
    for (std::size_t c = 0; c < base.values.size(); ++c) {
      EXPECT_NEAR(m.values[c], 2.0 * base.values[c] - 0.5 * o.values[c], 1e-12);
    }
  }
}

TEST(Aggregate, ShapeErrors)
{
  SingleView sv;
  SamplePointSet sp{{{0.5, 12.0, 0.0}}, 1, 1, {{0.0, 0.0}}, {1.0}};
  SamplePointSet bad = sp;
  bad.weights.push_back(1.0);
  EXPECT_THROW(aggregate(sv.pyramids, sv.cams, bad), GeometryError);
  auto pyr = sv.pyramids;
  pyr.push_back(sv.pyramids[0]);
  pyr[1].levels[0] = FeatureGrid(30, 40, 3);
  auto cams = sv.cams;
  cams.push_back(sv.cams[0]);
  SamplePointSet two = sp;
  two.num_views = 2;
  two.offsets.push_back({0, 0});
  two.weights.push_back(0.0);
  EXPECT_THROW(aggregate(pyr, cams, two), GeometryError);
  const std::vector<double> wrong(5, 1.0);
  EXPECT_THROW(aggregate_backward(sv.pyramids, sv.cams, sp, wrong), GeometryError);
}

TEST(AggregateGrad, MatchesFiniteDifferences)
{
  const double h = 1e-5;
  for (std::uint32_t id = 0; id < 30; ++id) {
    const auto inst = fixture::random_interior_instance(200 + id);
    const auto g = aggregate_backward(inst.pyramids, inst.cams, inst.sp, inst.grad_out);
    for (std::size_t i = 0; i < inst.sp.offsets.size(); ++i) {
      for (int axis = 0; axis < 2; ++axis) {
        auto plus = inst.sp;
        auto minus = inst.sp;
        (axis == 0 ? plus.offsets[i].x : plus.offsets[i].y) += h;
        (axis == 0 ? minus.offsets[i].x : minus.offsets[i].y) -= h;
        const double fd = (fixture::loss(inst, plus, inst.pyramids) - fixture::loss(inst, minus, inst.pyramids)) / (2 * h);
        const double an = axis == 0 ? g.d_offsets[i].x : g.d_offsets[i].y;
        EXPECT_TRUE(fixture::rel_close(an, fd, 1e-5)) << "offset " << i << " axis " << axis << ": " << an << " vs " << fd;
      }
      auto plus = inst.sp;
      auto minus = inst.sp;
      plus.weights[i] += h;
      minus.weights[i] -= h;
      const double fd = (fixture::loss(inst, plus, inst.pyramids) - fixture::loss(inst, minus, inst.pyramids)) / (2 * h);
      EXPECT_TRUE(fixture::rel_close(g.d_weights[i], fd, 1e-5)) << "weight " << i;
    }
    CounterStream pick(16, id, 0, 0);
    for (int t = 0; t < 40; ++t) {
      const auto v = static_cast<std::size_t>(pick.next_unit() * 2.0);
      const auto l = static_cast<std::size_t>(pick.next_unit() * 2.0);
      const auto i = static_cast<std::size_t>(pick.next_unit() * double(inst.pyramids[v].levels[l].values.size()));
      auto plus = inst.pyramids;
      auto minus = inst.pyramids;
      plus[v].levels[l].values[i] += h;
      minus[v].levels[l].values[i] -= h;
      const double fd = (fixture::loss(inst, inst.sp, plus) - fixture::loss(inst, inst.sp, minus)) / (2 * h);
      EXPECT_TRUE(fixture::rel_close(g.d_features[v][l][i], fd, 1e-5));
    }
  }
}

TEST(Decoupled, BranchesAreIndependent)
{
  const auto a = fixture::random_interior_instance(300);
  const auto b = fixture::random_interior_instance(301);
  auto reg_sp = b.sp;
  const auto same = decoupled_aggregate(a.pyramids, a.cams, a.sp, a.sp);
  EXPECT_EQ(same.cls.values, same.reg.values);
  const auto base = decoupled_aggregate(a.pyramids, a.cams, a.sp, reg_sp);
  auto cls_moved = a.sp;
  for (auto & o : cls_moved.offsets) {
    o.x += 0.01;
  }
  const auto moved = decoupled_aggregate(a.pyramids, a.cams, cls_moved, reg_sp);
  EXPECT_EQ(moved.reg.values, base.reg.values);
  EXPECT_NE(moved.cls.values, base.cls.values);
}

TEST(Decoupled, DisjointConstantBlocks)
{
  // Left half of the image holds 1, right half 7.
  FeaturePyramid p;
  FeatureGrid g(12, 16, 1);
  for (std::size_t y = 0; y < 12; ++y) {
    for (std::size_t x = 0; x < 16; ++x) {
      g.at(y, x, 0) = x < 8 ? 1.0 : 7.0;
    }
  }
  p.levels.push_back(g);
  p.strides.push_back(40.0);
  const std::vector<FeaturePyramid> pyr{p};
  const std::vector<CameraModel> cams{forward_camera()};
  const SamplePointSet left{{{-2.0, 10.0, 1.5}}, 1, 1, {{0.0, 0.0}}, {1.0}};
  const SamplePointSet right{{{2.0, 10.0, 1.5}}, 1, 1, {{0.0, 0.0}}, {1.0}};
  const auto out = decoupled_aggregate(pyr, cams, left, right);
  EXPECT_EQ(out.cls.values[0], 1.0);
  EXPECT_EQ(out.reg.values[0], 7.0);
}

TEST(Decoupled, CrossGradientsAreExactlyZero)
{
  const auto a = fixture::random_interior_instance(400);
  const auto b = fixture::random_interior_instance(401);
  const double h = 1e-5;
  const auto base = decoupled_aggregate(a.pyramids, a.cams, a.sp, b.sp);
  for (std::size_t i = 0; i < a.sp.offsets.size(); ++i) {
    auto plus = a.sp;
    auto minus = a.sp;
    plus.offsets[i].x += h;
    minus.offsets[i].x -= h;
    const auto p = decoupled_aggregate(a.pyramids, a.cams, plus, b.sp);
    const auto m = decoupled_aggregate(a.pyramids, a.cams, minus, b.sp);
    for (std::size_t c = 0; c < base.reg.values.size(); ++c) {
      EXPECT_EQ((p.reg.values[c] - m.reg.values[c]) / (2 * h), 0.0);
    }
  }
  for (std::size_t i = 0; i < b.sp.offsets.size(); ++i) {
    auto plus = b.sp;
    auto minus = b.sp;
    plus.offsets[i].y += h;
    minus.offsets[i].y -= h;
    const auto p = decoupled_aggregate(a.pyramids, a.cams, a.sp, plus);
    const auto m = decoupled_aggregate(a.pyramids, a.cams, a.sp, minus);
    for (std::size_t c = 0; c < base.cls.values.size(); ++c) {
      EXPECT_EQ((p.cls.values[c] - m.cls.values[c]) / (2 * h), 0.0);
    }
  }
  // The analytic VJP of each branch only touches its own sample set.
  const std::vector<double> zero(a.pyramids[0].channels(), 0.0);
  const auto g = decoupled_aggregate_backward(a.pyramids, a.cams, a.sp, b.sp, zero, a.grad_out);
  for (const auto & d : g.cls.d_offsets) {
    EXPECT_EQ(d.x, 0.0);
    EXPECT_EQ(d.y, 0.0);
  }
  EXPECT_EQ(g.reg.d_offsets.size(), b.sp.offsets.size());
}

TEST(Keypoints, FromElement)
{
  const auto kp = keypoints_from_element(make_element(ClassLabel::divider, {{0, 0}, {4, 0}}), 5, 0.3);
  ASSERT_EQ(kp.size(), 5u);
  EXPECT_EQ(kp[2].x, 2.0);
  EXPECT_EQ(kp[4].z, 0.3);
}

TEST(Rig, FirstCameraFacesForward)
{
  const auto rig = make_surround_rig(6, 800, 448, 400.0);
  ASSERT_EQ(rig.size(), 6u);
  for (const auto & c : rig) {
    EXPECT_NO_THROW(c.validate());
  }
  EXPECT_TRUE(project_point({0.0, 10.0, 0.0}, rig[0]).valid);
  EXPECT_FALSE(project_point({0.0, -10.0, 0.0}, rig[0]).valid);
  EXPECT_TRUE(project_point({0.0, -10.0, 0.0}, rig[3]).valid);
}

}  // namespace
}  // namespace mapforge::dfa
