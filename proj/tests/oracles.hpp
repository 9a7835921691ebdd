// Test-only oracles, independent of the library implementation paths they
// check: factorial assignment enumeration and small helpers.
#pragma once

#include <lvbench/numerics.hpp>

#include <limits>
#include <numeric>
#include <vector>

namespace oracles {

inline void assignment_recurse(const lvbench::Matrix& cost, int row, std::vector<char>& used,
                               std::vector<int>& current, double acc, double& best,
                               std::vector<int>& best_assign) {
  const int rows = static_cast<int>(cost.rows());
  const int cols = static_cast<int>(cost.cols());
  if (row == rows) {
    if (acc < best) {
      best = acc;
      best_assign = current;
    }
    return;
  }
  if (acc >= best) return;
  // When rows > cols, some rows stay unassigned; allow skipping only as many
  // rows as the surplus requires.
  int assigned = 0;
  for (int r = 0; r < row; ++r)
    if (current[r] >= 0) ++assigned;
  const int remaining_rows = rows - row;
  const int remaining_cols = cols - assigned;
  if (remaining_rows > remaining_cols) {
    current[row] = -1;
    assignment_recurse(cost, row + 1, used, current, acc, best, best_assign);
  }
  for (int c = 0; c < cols; ++c) {
    if (used[c]) continue;
    used[c] = 1;
    current[row] = c;
    assignment_recurse(cost, row + 1, used, current, acc + cost(row, c), best, best_assign);
    used[c] = 0;
    current[row] = -1;
  }
}

// Exhaustive minimum-cost assignment covering min(rows, cols) pairs.
inline double brute_force_assignment(const lvbench::Matrix& cost,
                                     std::vector<int>* assign_out = nullptr) {
  const int rows = static_cast<int>(cost.rows());
  const int cols = static_cast<int>(cost.cols());
  if (rows == 0 || cols == 0) {
    if (assign_out) assign_out->assign(rows, -1);
    return 0.0;
  }
  std::vector<char> used(cols, 0);
  std::vector<int> current(rows, -1), best_assign(rows, -1);
  double best = std::numeric_limits<double>::infinity();
  assignment_recurse(cost, 0, used, current, 0.0, best, best_assign);
  if (assign_out) *assign_out = best_assign;
  return best;
}

}  // namespace oracles
