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

#ifndef MAPFORGE__MAP_EVAL_HPP_
#define MAPFORGE__MAP_EVAL_HPP_

#include "mapforge/map_core.hpp"

#include <map>
#include <span>
#include <string>
#include <vector>

namespace mapforge::eval
{

struct Prediction
{
  MapElement element;
  double confidence{0.0};
};

/// Ground truth and predictions of one frame. Matching never crosses frames.
struct EvalFrame
{
  std::vector<MapElement> gts;
  std::vector<Prediction> preds;
};

struct EvalSpec
{
  std::vector<double> thresholds{0.5, 1.0, 1.5};
  std::size_t n_points{100};
  std::vector<ClassLabel> classes{ClassLabel::ped_crossing, ClassLabel::divider, ClassLabel::boundary};

  void validate() const;
};

struct ClassReport
{
  std::vector<double> thresholds;
  std::vector<double> ap;
  double class_ap{0.0};
  /// Neither ground truth nor predictions existed; AP was set to 1.
  bool empty_convention{false};
};

struct APReport
{
  std::map<ClassLabel, ClassReport> per_class;
  double map_ap{0.0};
  EvalSpec spec;
};

/// Symmetric Chamfer distance between the two elements resampled to n points:
/// 0.5 * (mean_i min_j |a_i - b_j| + mean_j min_i |b_j - a_i|).
double chamfer_distance(const MapElement & a, const MapElement & b, std::size_t n);

/// Chamfer distance between already resampled point sets.
double chamfer_distance_points(std::span<const Point2> a, std::span<const Point2> b);

/// All-point interpolated AP of one class at Chamfer threshold tau over all
/// frames. Predictions are ranked by confidence (stable on input order) and
/// greedily matched to the closest unmatched ground truth of their own frame
/// with CD < tau.
double ap_at_threshold(std::span<const EvalFrame> frames, ClassLabel label, double tau, std::size_t n);

/// Single-frame convenience overload.
double ap_at_threshold(
  std::span<const Prediction> preds, std::span<const MapElement> gts, ClassLabel label, double tau, std::size_t n);

/// Per-class AP at each threshold, class AP as the threshold mean, and mAP as
/// the mean over spec.classes.
APReport evaluate(std::span<const EvalFrame> frames, const EvalSpec & spec);

/// Arithmetic mean of the class APs.
double mean_ap(std::span<const double> class_aps);

/// Percentage with one decimal, as reported in result tables ("58.7").
std::string format_percent(double fraction);

}  // namespace mapforge::eval

#endif  // MAPFORGE__MAP_EVAL_HPP_
