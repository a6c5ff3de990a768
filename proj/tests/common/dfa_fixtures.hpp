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

#ifndef MAPFORGE_TESTS__DFA_FIXTURES_HPP_
#define MAPFORGE_TESTS__DFA_FIXTURES_HPP_

#include "mapforge/dfa_kernel.hpp"
#include "mapforge/rng.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace mapforge::fixture
{

struct DfaInstance
{
  std::vector<dfa::CameraModel> cams;
  std::vector<dfa::FeaturePyramid> pyramids;
  dfa::SamplePointSet sp;
  std::vector<double> grad_out;
};

inline std::vector<dfa::FeaturePyramid> random_pyramids(
  CounterStream & rng, std::size_t views, std::size_t width, std::size_t height, std::size_t channels)
{
  std::vector<dfa::FeaturePyramid> out(views);
  for (auto & pyr : out) {
    for (const double stride : {8.0, 16.0}) {
      dfa::FeatureGrid g(
        static_cast<std::size_t>(double(height) / stride), static_cast<std::size_t>(double(width) / stride), channels);
      for (auto & v : g.values) {
        v = rng.uniform(-1.0, 1.0);
      }
      pyr.levels.push_back(std::move(g));
      pyr.strides.push_back(stride);
    }
  }
  return out;
}

// Keypoints in front of a forward/backward camera pair whose samples land
// strictly inside cells and inside the grids, so every tap is differentiable.
inline bool interior(const DfaInstance & inst, double margin)
{
  for (std::size_t k = 0; k < inst.sp.keypoints.size(); ++k) {
    for (std::size_t v = 0; v < inst.sp.num_views; ++v) {
      const auto pr = dfa::project_point(inst.sp.keypoints[k], inst.cams[v]);
      if (!pr.valid) {
        continue;
      }
      for (std::size_t l = 0; l < inst.sp.num_levels; ++l) {
        const auto idx = inst.sp.index(k, v, l);
        const auto & level = inst.pyramids[v].levels[l];
        const auto t = dfa::bilinear_taps(level, pr.u + inst.sp.offsets[idx].x, pr.v + inst.sp.offsets[idx].y);
        if (t.fx < margin || t.fx > 1.0 - margin || t.fy < margin || t.fy > 1.0 - margin) {
          return false;
        }
        if (!std::all_of(t.in_bounds.begin(), t.in_bounds.end(), [](bool b) { return b; })) {
          return false;
        }
      }
    }
  }
  return true;
}

inline dfa::SamplePointSet random_sample_set(
  CounterStream & rng, std::size_t keypoints, std::size_t views, std::size_t levels)
{
  dfa::SamplePointSet sp;
  sp.num_views = views;
  sp.num_levels = levels;
  for (std::size_t k = 0; k < keypoints; ++k) {
    const double y = rng.uniform(6.0, 20.0) * (rng.next_unit() < 0.5 ? 1.0 : -1.0);
    sp.keypoints.push_back({rng.uniform(-3.0, 3.0), y, rng.uniform(-0.2, 0.2)});
  }
  const std::size_t count = keypoints * views * levels;
  double sum = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    sp.offsets.push_back({rng.uniform(-0.05, 0.05), rng.uniform(-0.05, 0.05)});
    sp.weights.push_back(rng.uniform(0.1, 1.0));
    sum += sp.weights.back();
  }
  for (auto & w : sp.weights) {
    w /= sum;
  }
  return sp;
}

// Two views (front, back), two levels, a few keypoints, random features.
inline DfaInstance random_interior_instance(std::uint32_t id)
{
  for (std::uint32_t attempt = 0;; ++attempt) {
    CounterStream rng(0xD0A, id, attempt, 0x44464121u);
    DfaInstance inst;
    inst.cams = dfa::make_surround_rig(2, 320, 192, 200.0);
    const std::size_t channels = 1 + static_cast<std::size_t>(rng.next_unit() * 4.0);
    inst.pyramids = random_pyramids(rng, 2, 320, 192, channels);
    inst.sp = random_sample_set(rng, 1 + static_cast<std::size_t>(rng.next_unit() * 3.0), 2, 2);
    for (std::size_t c = 0; c < channels; ++c) {
      inst.grad_out.push_back(rng.uniform(-1.0, 1.0));
    }
    if (interior(inst, 1e-3)) {
      return inst;
    }
  }
}

inline double loss(const DfaInstance & inst, const dfa::SamplePointSet & sp, const std::vector<dfa::FeaturePyramid> & pyr)
{
  const auto out = dfa::aggregate(pyr, inst.cams, sp);
  double l = 0.0;
  for (std::size_t c = 0; c < out.values.size(); ++c) {
    l += inst.grad_out[c] * out.values[c];
  }
  return l;
}

inline bool rel_close(double analytic, double numeric, double rel)
{
  // Relative error; magnitudes are floored at 1e-3 so exact zeros compare sensibly.
  const double scale = std::max({std::abs(analytic), std::abs(numeric), 1e-3});
  return std::abs(analytic - numeric) <= rel * scale;
}

}  // namespace mapforge::fixture

#endif  // MAPFORGE_TESTS__DFA_FIXTURES_HPP_
