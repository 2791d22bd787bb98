#pragma once

// Minimum-cost one-to-one assignment (Jonker/Kuhn-Munkres with potentials,
// shortest augmenting paths). Rectangular inputs are padded internally.

#include <algorithm>
#include <limits>
#include <vector>

#include "emo/core.hpp"

namespace emo {

using CostMatrix = std::vector<std::vector<double>>;  // rows x cols

struct AssignmentResult {
  std::vector<std::pair<int, int>> matches;  // (row index, col index)
  std::vector<int> unmatched_rows;
  std::vector<int> unmatched_cols;
};

// row_to_col[i] = assigned column for row i over an n x n matrix, or the pad
// region when rows != cols. Deterministic: rows processed in order, the
// augmenting path scan takes the lowest column index on ties.
inline std::vector<int> solve_square_assignment(const CostMatrix& costs, int n) {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, kInf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      int i0 = p[j0], j1 = 0;
      double delta = kInf;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        double cur = costs[i0 - 1][j - 1] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
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
      int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0);
  }
  std::vector<int> row_to_col(n, -1);
  for (int j = 1; j <= n; ++j)
    if (p[j] > 0) row_to_col[p[j] - 1] = j - 1;
  return row_to_col;
}

// Minimum-total-cost assignment, then pairs with cost >= gate are released
// into the unmatched sets. Pads with the gate value so leaving an entry
// unmatched is never more expensive than a gated-out pairing. `n_cols` covers
// the zero-row case, where the column count cannot be read off the matrix.
inline AssignmentResult solve_assignment(const CostMatrix& costs, double gate, int n_cols = -1) {
  AssignmentResult result;
  const int rows = (int)costs.size();
  const int cols = rows ? (int)costs[0].size() : std::max(0, n_cols);
  const int n = std::max(rows, cols);
  if (n == 0) return result;

  CostMatrix padded(n, std::vector<double>(n, gate));
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) padded[i][j] = costs[i][j];

  const auto row_to_col = solve_square_assignment(padded, n);
  std::vector<char> col_matched(cols, 0);
  for (int i = 0; i < rows; ++i) {
    int j = row_to_col[i];
    if (j >= 0 && j < cols && costs[i][j] < gate) {
      result.matches.emplace_back(i, j);
      col_matched[j] = 1;
    } else {
      result.unmatched_rows.push_back(i);
    }
  }
  for (int j = 0; j < cols; ++j)
    if (!col_matched[j]) result.unmatched_cols.push_back(j);
  return result;
}

}  // namespace emo
