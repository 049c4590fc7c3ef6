// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cstddef>
#include <limits>
#include <span>
#include <utility>
#include <vector>

namespace fsim {

inline constexpr int kUnmatched = -1;

/// Dense rows x cols weight matrix with a per-cell feasibility flag.
struct WeightGrid {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> weight;
  std::vector<char> feasible;

  void reset(std::size_t r, std::size_t c) {
    rows = r;
    cols = c;
    weight.assign(r * c, 0.0);
    feasible.assign(r * c, 0);
  }
  double w(std::size_t i, std::size_t j) const { return weight[i * cols + j]; }
  bool ok(std::size_t i, std::size_t j) const {
    return feasible[i * cols + j] != 0;
  }
  void set(std::size_t i, std::size_t j, double value) {
    weight[i * cols + j] = value;
    feasible[i * cols + j] = 1;
  }
};

/// Maximum-cardinality bipartite matching by augmenting paths (Kuhn).
/// `adj[i]` lists the right vertices adjacent to left vertex i.
/// Returns left -> right assignment (kUnmatched where free).
inline std::vector<int> max_cardinality_matching(
    std::size_t n_right, const std::vector<std::vector<int>>& adj) {
  const std::size_t n_left = adj.size();
  std::vector<int> left_to_right(n_left, kUnmatched);
  std::vector<int> right_to_left(n_right, kUnmatched);
  std::vector<char> visited(n_right);

  auto augment = [&](auto&& self, int i) -> bool {
    for (int j : adj[i]) {
      if (visited[j]) continue;
      visited[j] = 1;
      if (right_to_left[j] == kUnmatched || self(self, right_to_left[j])) {
        right_to_left[j] = i;
        left_to_right[i] = j;
        return true;
      }
    }
    return false;
  };
  for (std::size_t i = 0; i < n_left; ++i) {
    std::fill(visited.begin(), visited.end(), 0);
    augment(augment, static_cast<int>(i));
  }
  return left_to_right;
}

inline std::size_t matching_size(std::span<const int> assignment) {
  return static_cast<std::size_t>(
      std::count_if(assignment.begin(), assignment.end(),
                    [](int j) { return j != kUnmatched; }));
}

/// Maximum-cardinality bipartite matching size over the feasible cells.
inline std::size_t max_feasible_matching_size(const WeightGrid& grid) {
  std::vector<std::vector<int>> adj(grid.rows);
  for (std::size_t i = 0; i < grid.rows; ++i) {
    for (std::size_t j = 0; j < grid.cols; ++j) {
      if (grid.ok(i, j)) adj[i].push_back(static_cast<int>(j));
    }
  }
  return matching_size(max_cardinality_matching(grid.cols, adj));
}

namespace detail {

/// Minimum-cost assignment of every row to a distinct column (rows <= cols),
/// O(rows^2 * cols) Hungarian method with potentials.
inline std::vector<int> min_cost_assignment(std::size_t rows, std::size_t cols,
                                            const std::vector<double>& cost) {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  // 1-based arrays; column 0 is the virtual start.
  std::vector<double> u(rows + 1, 0.0), v(cols + 1, 0.0), minv(cols + 1);
  std::vector<std::size_t> p(cols + 1, 0), way(cols + 1, 0);
  std::vector<char> used(cols + 1);
  for (std::size_t i = 1; i <= rows; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::fill(minv.begin(), minv.end(), kInf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = p[j0];
      double delta = kInf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= cols; ++j) {
        if (used[j]) continue;
        const double cur = cost[(i0 - 1) * cols + (j - 1)] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= cols; ++j) {
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
  std::vector<int> row_to_col(rows, kUnmatched);
  for (std::size_t j = 1; j <= cols; ++j) {
    if (p[j] != 0) row_to_col[p[j] - 1] = static_cast<int>(j - 1);
  }
  return row_to_col;
}

}  // namespace detail

/// Exact matching over feasible cells that first maximizes the number of
/// matched pairs and then the weight sum. Weights must lie in [0,1].
/// Returns row -> column (kUnmatched for rows left free).
inline std::vector<int> exact_max_matching(const WeightGrid& grid) {
  const bool transpose = grid.rows > grid.cols;
  const std::size_t r = transpose ? grid.cols : grid.rows;
  const std::size_t c = transpose ? grid.rows : grid.cols;
  // A bonus larger than any attainable weight sum makes cardinality dominate.
  const double bonus = static_cast<double>(r) + 1.0;
  std::vector<double> cost(r * c);
  for (std::size_t i = 0; i < r; ++i) {
    for (std::size_t j = 0; j < c; ++j) {
      const std::size_t gi = transpose ? j : i;
      const std::size_t gj = transpose ? i : j;
      cost[i * c + j] = grid.ok(gi, gj) ? -(bonus + grid.w(gi, gj)) : 0.0;
    }
  }
  auto assignment = detail::min_cost_assignment(r, c, cost);
  std::vector<int> result(grid.rows, kUnmatched);
  for (std::size_t i = 0; i < r; ++i) {
    const int j = assignment[i];
    if (j == kUnmatched) continue;
    const std::size_t gi = transpose ? static_cast<std::size_t>(j) : i;
    const std::size_t gj = transpose ? i : static_cast<std::size_t>(j);
    if (grid.ok(gi, gj)) result[gi] = static_cast<int>(gj);
  }
  return result;
}

/// Greedy matching: feasible cells by weight descending, then row, then
/// column; each taken while both endpoints are free. `row_key`/`col_key`
/// give the tie-break order (typically node ids).
inline std::vector<int> greedy_matching(const WeightGrid& grid,
                                        std::span<const unsigned> row_key,
                                        std::span<const unsigned> col_key) {
  struct Cell {
    double w;
    unsigned rk, ck;
    unsigned i, j;
  };
  std::vector<Cell> cells;
  cells.reserve(grid.rows * grid.cols);
  for (std::size_t i = 0; i < grid.rows; ++i) {
    for (std::size_t j = 0; j < grid.cols; ++j) {
      if (grid.ok(i, j)) {
        cells.push_back({grid.w(i, j), row_key[i], col_key[j],
                         static_cast<unsigned>(i), static_cast<unsigned>(j)});
      }
    }
  }
  std::sort(cells.begin(), cells.end(), [](const Cell& a, const Cell& b) {
    if (a.w != b.w) return a.w > b.w;
    if (a.rk != b.rk) return a.rk < b.rk;
    return a.ck < b.ck;
  });
  std::vector<int> result(grid.rows, kUnmatched);
  std::vector<char> col_used(grid.cols, 0);
  std::size_t taken = 0;
  const std::size_t limit = std::min(grid.rows, grid.cols);
  for (const auto& cell : cells) {
    if (taken == limit) break;
    if (result[cell.i] != kUnmatched || col_used[cell.j]) continue;
    result[cell.i] = static_cast<int>(cell.j);
    col_used[cell.j] = 1;
    ++taken;
  }
  return result;
}

}  // namespace fsim
