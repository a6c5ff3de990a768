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

#include "mapforge/map_eval.hpp"

#include "mapforge/simd/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>

namespace mapforge::eval
{
namespace
{

struct SoaPoints
{
  std::vector<double> x;
  std::vector<double> y;

  explicit SoaPoints(std::span<const Point2> pts) : x(pts.size()), y(pts.size())
  {
    for (std::size_t i = 0; i < pts.size(); ++i) {
      x[i] = pts[i].x;
      y[i] = pts[i].y;
    }
  }
  std::size_t size() const { return x.size(); }
};

double mean_nearest(const SoaPoints & from, const SoaPoints & to, std::vector<double> & scratch)
{
  scratch.resize(from.size());
  simd::kernels().nearest_sq_dist(
    from.x.data(), from.y.data(), from.size(), to.x.data(), to.y.data(), to.size(), scratch.data());
  double sum = 0.0;
  for (const double d2 : scratch) {
    sum += std::sqrt(d2);
  }
  return sum / static_cast<double>(from.size());
}

double chamfer_soa(const SoaPoints & a, const SoaPoints & b, std::vector<double> & scratch)
{
  return 0.5 * (mean_nearest(a, b, scratch) + mean_nearest(b, a, scratch));
}

struct RankedPrediction
{
  std::size_t frame{0};
  std::size_t row{0};  // index among the frame's predictions of this class
  double confidence{0.0};
};

// Everything about one class that does not depend on the threshold.
struct ClassCache
{
  std::vector<RankedPrediction> ranked;
  std::vector<std::vector<double>> cd;  // per frame, row-major preds x gts
  std::vector<std::size_t> gt_count;    // per frame
  std::size_t total_gts{0};
};

ClassCache build_cache(std::span<const EvalFrame> frames, ClassLabel label, std::size_t n)
{
  ClassCache cache;
  cache.cd.resize(frames.size());
  cache.gt_count.resize(frames.size());
  std::vector<double> scratch;
  for (std::size_t f = 0; f < frames.size(); ++f) {
    std::vector<SoaPoints> gts;
    for (const auto & gt : frames[f].gts) {
      if (gt.label == label) {
        gts.emplace_back(resample_polyline(gt.points, n, gt.closed));
      }
    }
    std::vector<SoaPoints> preds;
    for (const auto & pred : frames[f].preds) {
      if (pred.element.label != label) {
        continue;
      }
      if (!(pred.confidence >= 0.0 && pred.confidence <= 1.0)) {
        throw GeometryError("prediction confidence must lie in [0, 1]");
      }
      cache.ranked.push_back({f, preds.size(), pred.confidence});
      preds.emplace_back(resample_polyline(pred.element.points, n, pred.element.closed));
    }
    cache.gt_count[f] = gts.size();
    cache.total_gts += gts.size();
    auto & cd = cache.cd[f];
    cd.resize(preds.size() * gts.size());
    for (std::size_t i = 0; i < preds.size(); ++i) {
      for (std::size_t j = 0; j < gts.size(); ++j) {
        cd[i * gts.size() + j] = chamfer_soa(preds[i], gts[j], scratch);
      }
    }
  }
  std::stable_sort(cache.ranked.begin(), cache.ranked.end(), [](const auto & a, const auto & b) {
    return a.confidence > b.confidence;
  });
  return cache;
}

// Returns the AP and whether the empty-class convention applied.
std::pair<double, bool> ap_from_cache(const ClassCache & cache, double tau)
{
  if (cache.total_gts == 0) {
    return cache.ranked.empty() ? std::pair{1.0, true} : std::pair{0.0, false};
  }
  std::vector<std::vector<bool>> taken(cache.gt_count.size());
  for (std::size_t f = 0; f < taken.size(); ++f) {
    taken[f].assign(cache.gt_count[f], false);
  }
  const std::size_t k_total = cache.ranked.size();
  std::vector<bool> is_tp(k_total, false);
  std::vector<double> precision(k_total, 0.0);
  std::size_t tp = 0;
  for (std::size_t k = 0; k < k_total; ++k) {
    const auto & rp = cache.ranked[k];
    const std::size_t ng = cache.gt_count[rp.frame];
    const double * row = cache.cd[rp.frame].data() + rp.row * ng;
    std::size_t best = ng;
    double best_cd = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < ng; ++j) {
      if (!taken[rp.frame][j] && row[j] < tau && row[j] < best_cd) {
        best = j;
        best_cd = row[j];
      }
    }
    if (best < ng) {
      taken[rp.frame][best] = true;
      is_tp[k] = true;
      ++tp;
    }
    precision[k] = static_cast<double>(tp) / static_cast<double>(k + 1);
  }
  // Precision envelope from the right, summed at each recall step and scaled
  // once, so a perfect ranking gives exactly 1.
  double envelope = 0.0;
  double sum = 0.0;
  for (std::size_t k = k_total; k-- > 0;) {
    envelope = std::max(envelope, precision[k]);
    if (is_tp[k]) {
      sum += envelope;
    }
  }
  return {std::min(sum / static_cast<double>(cache.total_gts), 1.0), false};
}

}  // namespace

void EvalSpec::validate() const
{
  if (thresholds.empty()) {
    throw GeometryError("at least one Chamfer threshold is required");
  }
  for (std::size_t i = 0; i < thresholds.size(); ++i) {
    if (!(thresholds[i] > 0.0)) {
      throw GeometryError("Chamfer thresholds must be positive");
    }
    if (i > 0 && !(thresholds[i - 1] < thresholds[i])) {
      throw GeometryError("Chamfer thresholds must be strictly increasing");
    }
  }
  if (n_points < 2) {
    throw GeometryError("n_points must be at least 2");
  }
  if (classes.empty()) {
    throw GeometryError("at least one class must be evaluated");
  }
  for (std::size_t i = 0; i < classes.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (classes[i] == classes[j]) {
        throw GeometryError("duplicate class " + std::string(to_string(classes[i])) + " in evaluation spec");
      }
    }
  }
}

double chamfer_distance_points(std::span<const Point2> a, std::span<const Point2> b)
{
  if (a.empty() || b.empty()) {
    throw GeometryError("chamfer distance needs non-empty point sets");
  }
  std::vector<double> scratch;
  return chamfer_soa(SoaPoints(a), SoaPoints(b), scratch);
}

double chamfer_distance(const MapElement & a, const MapElement & b, std::size_t n)
{
  const auto ra = resample_polyline(a.points, n, a.closed);
  const auto rb = resample_polyline(b.points, n, b.closed);
  return chamfer_distance_points(ra, rb);
}

double ap_at_threshold(std::span<const EvalFrame> frames, ClassLabel label, double tau, std::size_t n)
{
  if (!(tau > 0.0)) {
    throw GeometryError("Chamfer threshold must be positive");
  }
  return ap_from_cache(build_cache(frames, label, n), tau).first;
}

double ap_at_threshold(
  std::span<const Prediction> preds, std::span<const MapElement> gts, ClassLabel label, double tau, std::size_t n)
{
  EvalFrame frame{std::vector<MapElement>(gts.begin(), gts.end()), std::vector<Prediction>(preds.begin(), preds.end())};
  return ap_at_threshold(std::span<const EvalFrame>(&frame, 1), label, tau, n);
}

APReport evaluate(std::span<const EvalFrame> frames, const EvalSpec & spec)
{
  spec.validate();
  APReport report;
  report.spec = spec;
  std::vector<double> class_aps;
  for (const auto label : spec.classes) {
    const ClassCache cache = build_cache(frames, label, spec.n_points);
    ClassReport cr;
    cr.thresholds = spec.thresholds;
    for (const double tau : spec.thresholds) {
      const auto [ap, empty] = ap_from_cache(cache, tau);
      cr.ap.push_back(ap);
      cr.empty_convention = empty;
    }
    cr.class_ap = std::accumulate(cr.ap.begin(), cr.ap.end(), 0.0) / static_cast<double>(cr.ap.size());
    class_aps.push_back(cr.class_ap);
    report.per_class.emplace(label, std::move(cr));
  }
  report.map_ap = mean_ap(class_aps);
  return report;
}

double mean_ap(std::span<const double> class_aps)
{
  if (class_aps.empty()) {
    return 0.0;
  }
  return std::accumulate(class_aps.begin(), class_aps.end(), 0.0) / static_cast<double>(class_aps.size());
}

std::string format_percent(double fraction)
{
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.1f", fraction * 100.0);
  return buf;
}

}  // namespace mapforge::eval
