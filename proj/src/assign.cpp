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

#include "mapforge/assign.hpp"

#include "mapforge/simd/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace mapforge::assign
{
namespace
{

constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

struct SquareSolution
{
  std::vector<std::size_t> row_to_col;
  std::vector<double> u;  // row potentials
  std::vector<double> v;  // column potentials
  double value{0.0};
};

// Shortest augmenting path Hungarian method on an n x n matrix (row-major).
// Potentials satisfy a[i][j] - u[i] - v[j] >= 0 with equality on the matching.
SquareSolution solve_square(const std::vector<double> & a, std::size_t n)
{
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0);
  std::vector<double> v(n + 1, 0.0);
  std::vector<std::size_t> p(n + 1, 0);
  std::vector<std::size_t> way(n + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<bool> used(n + 1, false);
    do {
      used[j0] = true;
      const std::size_t i0 = p[j0];
      double delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) {
          continue;
        }
        const double cur = a[(i0 - 1) * n + (j - 1)] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  SquareSolution sol;
  sol.row_to_col.assign(n, kNone);
  for (std::size_t j = 1; j <= n; ++j) {
    sol.row_to_col[p[j] - 1] = j - 1;
  }
  sol.u.assign(u.begin() + 1, u.end());
  sol.v.assign(v.begin() + 1, v.end());
  for (std::size_t i = 0; i < n; ++i) {
    sol.value += a[i * n + sol.row_to_col[i]];
  }
  return sol;
}

// Optimal assignment restricted to the given real rows and columns, padded
// with zero-cost dummies. Returns a map from original row to original column
// (kNone for dummy) for the listed rows.
struct SubSolution
{
  std::vector<std::size_t> col_of_row;  // indexed like `rows`
  double value{0.0};
  std::vector<double> u;
  std::vector<double> v;
};

SubSolution solve_restricted(
  const CostMatrix & cost, const std::vector<std::size_t> & rows, const std::vector<std::size_t> & cols)
{
  const std::size_t n = std::max(rows.size(), cols.size());
  SubSolution out;
  out.col_of_row.assign(rows.size(), kNone);
  if (n == 0) {
    return out;
  }
  std::vector<double> a(n * n, 0.0);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < cols.size(); ++c) {
      a[r * n + c] = cost(rows[r], cols[c]);
    }
  }
  SquareSolution sol = solve_square(a, n);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const std::size_t c = sol.row_to_col[r];
    out.col_of_row[r] = c < cols.size() ? cols[c] : kNone;
  }
  out.value = sol.value;
  out.u = std::move(sol.u);
  out.v = std::move(sol.v);
  return out;
}

double sum_in_row_order(const CostMatrix & cost, const std::vector<MatchedPair> & pairs)
{
  double total = 0.0;
  for (const auto & pr : pairs) {
    total += cost(pr.row, pr.col);
  }
  return total;
}

}  // namespace

LinearAssignment hungarian(const CostMatrix & cost)
{
  const std::size_t R = cost.rows();
  const std::size_t C = cost.cols();
  LinearAssignment result;
  if (R == 0 || C == 0) {
    return result;
  }
  double scale = 1.0;
  for (std::size_t r = 0; r < R; ++r) {
    for (std::size_t c = 0; c < C; ++c) {
      if (!std::isfinite(cost(r, c))) {
        throw GeometryError("hungarian: cost matrix entries must be finite");
      }
      scale = std::max(scale, std::abs(cost(r, c)));
    }
  }
  const double eps = 1e-9 * scale * static_cast<double>(std::max(R, C));

  std::vector<std::size_t> rows(R);
  std::vector<std::size_t> cols(C);
  for (std::size_t i = 0; i < R; ++i) {
    rows[i] = i;
  }
  for (std::size_t j = 0; j < C; ++j) {
    cols[j] = j;
  }
  const SubSolution full = solve_restricted(cost, rows, cols);
  const double optimum = full.value;

  // current[i]: column of row i in an optimal solution consistent with the
  // decisions taken so far.
  std::vector<std::size_t> current = full.col_of_row;
  std::vector<bool> col_free(C, true);
  std::vector<bool> row_open(R, true);
  double fixed_sum = 0.0;

  // Greedy lexicographic refinement: settle rows in order, each to the
  // smallest column that still admits an optimal completion. Complementary
  // slackness restricts candidates to zero reduced cost edges.
  for (std::size_t i = 0; i < R; ++i) {
    row_open[i] = false;
    std::size_t chosen = kNone;
    for (std::size_t c = 0; c < C; ++c) {
      if (!col_free[c]) {
        continue;
      }
      if (c == current[i]) {
        chosen = c;
        break;
      }
      const double reduced = cost(i, c) - full.u[i] - full.v[c];
      if (reduced > eps) {
        continue;
      }
      std::vector<std::size_t> sub_rows;
      std::vector<std::size_t> sub_cols;
      for (std::size_t r = 0; r < R; ++r) {
        if (row_open[r]) {
          sub_rows.push_back(r);
        }
      }
      for (std::size_t cc = 0; cc < C; ++cc) {
        if (col_free[cc] && cc != c) {
          sub_cols.push_back(cc);
        }
      }
      const SubSolution sub = solve_restricted(cost, sub_rows, sub_cols);
      if (fixed_sum + cost(i, c) + sub.value <= optimum + eps) {
        chosen = c;
        for (std::size_t k = 0; k < sub_rows.size(); ++k) {
          current[sub_rows[k]] = sub.col_of_row[k];
        }
        break;
      }
    }
    if (chosen != kNone) {
      current[i] = chosen;
      col_free[chosen] = false;
      fixed_sum += cost(i, chosen);
      result.pairs.push_back({i, chosen});
    }
  }
  result.total_cost = sum_in_row_order(cost, result.pairs);
  return result;
}

std::vector<Point2> apply_variant(std::span<const Point2> pts, const PointOrderVariant & variant)
{
  const std::size_t n = pts.size();
  std::vector<Point2> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t idx = variant.reversed ? (variant.shift + n - (i % n)) % n : (variant.shift + i) % n;
    out[i] = pts[idx];
  }
  return out;
}

PointSetCost point_set_cost(std::span<const Point2> pred_pts, const MapElement & gt, std::size_t n)
{
  if (pred_pts.size() < 2 || gt.points.size() < 2) {
    throw GeometryError("point_set_cost needs at least 2 points on each side");
  }
  const auto pred = resample_polyline(pred_pts, n, gt.closed);
  const auto target = resample_polyline(gt.points, n, gt.closed);

  // Terms are summed in gt index order, so an equivalent reordering of pred
  // produces the same terms in the same order and an identical cost.
  std::vector<double> tx(n);
  std::vector<double> ty(n);
  for (std::size_t b = 0; b < n; ++b) {
    tx[b] = target[b].x;
    ty[b] = target[b].y;
  }
  const std::size_t shifts = gt.closed ? n : 1;
  const std::size_t span = n + shifts - 1;
  // ex[m] = pred[m mod n]; rx[m] = pred[(n - 1 - m) mod n].
  std::vector<double> ex(span);
  std::vector<double> ey(span);
  std::vector<double> rx(span);
  std::vector<double> ry(span);
  for (std::size_t m = 0; m < span; ++m) {
    ex[m] = pred[m % n].x;
    ey[m] = pred[m % n].y;
    const std::size_t r = (n - 1 + n - (m % n)) % n;
    rx[m] = pred[r].x;
    ry[m] = pred[r].y;
  }
  const auto & k = simd::kernels();
  std::vector<double> fwd(shifts);
  std::vector<double> rev(shifts);
  k.l1_shift_sums(tx.data(), ty.data(), n, ex.data(), ey.data(), shifts, fwd.data());
  k.l1_shift_sums(tx.data(), ty.data(), n, rx.data(), ry.data(), shifts, rev.data());

  // Forward shift s pairs target[b] with pred[(b - s) mod n], found at offset
  // (n - s) mod n; reversed shift s pairs it with pred[(s - b) mod n], found
  // at offset (n - 1 - s) mod n. Ties: forward shifts ascending, then
  // reversed shifts ascending.
  double best = fwd[0];
  PointOrderVariant best_variant{false, 0};
  for (std::size_t s = 1; s < shifts; ++s) {
    if (fwd[n - s] < best) {
      best = fwd[n - s];
      best_variant = {false, s};
    }
  }
  for (std::size_t s = 0; s < n; ++s) {
    const std::size_t o = (n - 1 - s) % n;
    if (o >= shifts) {
      continue;
    }
    if (rev[o] < best) {
      best = rev[o];
      best_variant = {true, s};
    }
  }
  return {best / static_cast<double>(n), best_variant};
}

void CostSpec::validate() const
{
  if (!(w_cls >= 0.0) || !(w_pts >= 0.0)) {
    throw GeometryError("cost weights must be non-negative");
  }
  if (n_points < 2) {
    throw GeometryError("n_points must be at least 2");
  }
}

Assignment match_predictions(
  std::span<const ScoredElement> preds, std::span<const MapElement> gts, const CostSpec & spec)
{
  spec.validate();
  CostMatrix cost(preds.size(), gts.size());
  std::vector<PointSetCost> point_costs(preds.size() * gts.size());
  for (std::size_t i = 0; i < preds.size(); ++i) {
    for (std::size_t j = 0; j < gts.size(); ++j) {
      const PointSetCost pc = point_set_cost(preds[i].element.points, gts[j], spec.n_points);
      point_costs[i * gts.size() + j] = pc;
      cost(i, j) = -spec.w_cls * preds[i].scores[class_index(gts[j].label)] + spec.w_pts * pc.cost;
    }
  }
  const LinearAssignment la = hungarian(cost);
  Assignment out;
  std::vector<bool> pred_used(preds.size(), false);
  std::vector<bool> gt_used(gts.size(), false);
  for (const auto & pr : la.pairs) {
    const PointSetCost & pc = point_costs[pr.row * gts.size() + pr.col];
    out.pairs.push_back({pr.row, pr.col, cost(pr.row, pr.col), pc.cost, pc.variant});
    pred_used[pr.row] = true;
    gt_used[pr.col] = true;
  }
  for (std::size_t i = 0; i < preds.size(); ++i) {
    if (!pred_used[i]) {
      out.unmatched_preds.push_back(i);
    }
  }
  for (std::size_t j = 0; j < gts.size(); ++j) {
    if (!gt_used[j]) {
      out.unmatched_gts.push_back(j);
    }
  }
  return out;
}

}  // namespace mapforge::assign
