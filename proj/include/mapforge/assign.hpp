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

#ifndef MAPFORGE__ASSIGN_HPP_
#define MAPFORGE__ASSIGN_HPP_

#include "mapforge/map_core.hpp"

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace mapforge::assign
{

/// Row-major dense matrix.
class CostMatrix
{
public:
  CostMatrix() = default;
  CostMatrix(std::size_t rows, std::size_t cols, double fill = 0.0) : rows_(rows), cols_(cols), values_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double & operator()(std::size_t r, std::size_t c) { return values_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return values_[r * cols_ + c]; }

private:
  std::size_t rows_{0};
  std::size_t cols_{0};
  std::vector<double> values_;
};

struct MatchedPair
{
  std::size_t row{0};
  std::size_t col{0};
};

struct LinearAssignment
{
  std::vector<MatchedPair> pairs;  // sorted by row
  double total_cost{0.0};          // summed in row order
};

/// Optimal rectangular assignment of min(R, C) pairs. Among optimal
/// solutions, the row-sorted pair list that is lexicographically smallest is
/// returned. Entries must be finite.
LinearAssignment hungarian(const CostMatrix & cost);

/// Point order of the ground truth that achieved the minimum cost. Ground
/// truth index i is compared with prediction index i after the variant maps
/// gt[(reversed ? shift - i : shift + i) mod n] onto position i.
struct PointOrderVariant
{
  bool reversed{false};
  std::size_t shift{0};

  friend bool operator==(const PointOrderVariant &, const PointOrderVariant &) = default;
};

struct PointSetCost
{
  double cost{0.0};
  PointOrderVariant variant;
};

/// Applies a variant to an n-point sequence.
std::vector<Point2> apply_variant(std::span<const Point2> pts, const PointOrderVariant & variant);

/// Mean point-wise L1 distance minimized over the ground truth's equivalent
/// point orders: forward/reversed for open elements, every cyclic shift in
/// both directions for closed ones. Both sides are resampled to n points; the
/// prediction is read with the ground truth's topology.
PointSetCost point_set_cost(std::span<const Point2> pred_pts, const MapElement & gt, std::size_t n);

struct CostSpec
{
  double w_cls{1.0};
  double w_pts{1.0};
  std::size_t n_points{20};

  void validate() const;
};

struct ScoredElement
{
  MapElement element;
  std::array<double, kNumClasses> scores{};
};

struct AssignmentPair
{
  std::size_t pred_index{0};
  std::size_t gt_index{0};
  double cost{0.0};
  double point_cost{0.0};
  PointOrderVariant best_variant;
};

struct Assignment
{
  std::vector<AssignmentPair> pairs;  // sorted by pred_index
  std::vector<std::size_t> unmatched_preds;
  std::vector<std::size_t> unmatched_gts;
};

/// cost[i][j] = -w_cls * score_i[class_j] + w_pts * point_set_cost(pred_i, gt_j).
Assignment match_predictions(
  std::span<const ScoredElement> preds, std::span<const MapElement> gts, const CostSpec & spec);

}  // namespace mapforge::assign

#endif  // MAPFORGE__ASSIGN_HPP_
