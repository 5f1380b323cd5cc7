#include "ovtrack/assignment.hpp"

#include <algorithm>
#include <limits>

#include "ovtrack/error.hpp"

namespace ovtrack {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Classic shortest-augmenting-path solver for the square min-cost problem.
// Returns row -> column over an n x n cost matrix.
std::vector<int> solve_min_square(const std::vector<std::vector<double>>& cost) {
  const int n = static_cast<int>(cost.size());
  std::vector<double> u(static_cast<std::size_t>(n) + 1, 0.0);
  std::vector<double> v(static_cast<std::size_t>(n) + 1, 0.0);
  std::vector<int> p(static_cast<std::size_t>(n) + 1, 0);
  std::vector<int> way(static_cast<std::size_t>(n) + 1, 0);

  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(static_cast<std::size_t>(n) + 1, kInf);
    std::vector<char> used(static_cast<std::size_t>(n) + 1, 0);
    do {
      used[static_cast<std::size_t>(j0)] = 1;
      const int i0 = p[static_cast<std::size_t>(j0)];
      int j1 = -1;
      double delta = kInf;
      for (int j = 1; j <= n; ++j) {
        if (used[static_cast<std::size_t>(j)]) continue;
        const double cur = cost[static_cast<std::size_t>(i0 - 1)]
                               [static_cast<std::size_t>(j - 1)] -
                           u[static_cast<std::size_t>(i0)] -
                           v[static_cast<std::size_t>(j)];
        if (cur < minv[static_cast<std::size_t>(j)]) {
          minv[static_cast<std::size_t>(j)] = cur;
          way[static_cast<std::size_t>(j)] = j0;
        }
        if (minv[static_cast<std::size_t>(j)] < delta) {
          delta = minv[static_cast<std::size_t>(j)];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[static_cast<std::size_t>(j)]) {
          u[static_cast<std::size_t>(p[static_cast<std::size_t>(j)])] += delta;
          v[static_cast<std::size_t>(j)] -= delta;
        } else {
          minv[static_cast<std::size_t>(j)] -= delta;
        }
      }
      j0 = j1;
    } while (p[static_cast<std::size_t>(j0)] != 0);
    do {
      const int j1 = way[static_cast<std::size_t>(j0)];
      p[static_cast<std::size_t>(j0)] = p[static_cast<std::size_t>(j1)];
      j0 = j1;
    } while (j0 != 0);
  }

  std::vector<int> row_to_col(static_cast<std::size_t>(n), -1);
  for (int j = 1; j <= n; ++j) {
    if (p[static_cast<std::size_t>(j)] > 0) {
      row_to_col[static_cast<std::size_t>(p[static_cast<std::size_t>(j)] - 1)] =
          j - 1;
    }
  }
  return row_to_col;
}

void check_weights(const std::vector<std::vector<double>>& w) {
  const std::size_t cols = w.empty() ? 0 : w.front().size();
  for (const auto& row : w) {
    if (row.size() != cols) throw InputError("assignment: ragged weight matrix");
    for (double x : row) {
      if (!(x >= 0.0)) throw InputError("assignment: weights must be >= 0");
    }
  }
}

double max_weight(const std::vector<std::vector<double>>& w) {
  double m = 0.0;
  for (const auto& row : w)
    for (double x : row) m = std::max(m, x);
  return m;
}

// Best achievable total over a sub-problem given masked-out rows/columns.
double optimal_rest(const std::vector<std::vector<double>>& w, int first_row,
                    const std::vector<char>& used_col) {
  const int rows = static_cast<int>(w.size());
  const int cols = rows == 0 ? 0 : static_cast<int>(w.front().size());
  std::vector<int> free_cols;
  for (int j = 0; j < cols; ++j) {
    if (!used_col[static_cast<std::size_t>(j)]) free_cols.push_back(j);
  }
  if (first_row >= rows || free_cols.empty()) return 0.0;

  std::vector<std::vector<double>> sub;
  sub.reserve(static_cast<std::size_t>(rows - first_row));
  for (int i = first_row; i < rows; ++i) {
    std::vector<double> row;
    row.reserve(free_cols.size());
    for (int j : free_cols) {
      row.push_back(w[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]);
    }
    sub.push_back(std::move(row));
  }
  return assignment_total(sub, max_total_assignment(sub));
}

}  // namespace

std::vector<int> max_total_assignment(
    const std::vector<std::vector<double>>& weights) {
  check_weights(weights);
  const int rows = static_cast<int>(weights.size());
  const int cols = rows == 0 ? 0 : static_cast<int>(weights.front().size());
  if (rows == 0 || cols == 0) return std::vector<int>(static_cast<std::size_t>(rows), -1);

  // Pad to square and convert to min-cost; padding cells behave like
  // "unmatched" since they carry the zero weight.
  const int n = std::max(rows, cols);
  const double top = max_weight(weights);
  std::vector<std::vector<double>> cost(
      static_cast<std::size_t>(n),
      std::vector<double>(static_cast<std::size_t>(n), top));
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) {
      cost[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
          top - weights[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    }
  }

  std::vector<int> solved = solve_min_square(cost);
  std::vector<int> out(static_cast<std::size_t>(rows), -1);
  for (int i = 0; i < rows; ++i) {
    const int j = solved[static_cast<std::size_t>(i)];
    if (j >= 0 && j < cols &&
        weights[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] > 0.0) {
      out[static_cast<std::size_t>(i)] = j;
    }
  }
  return out;
}

double assignment_total(const std::vector<std::vector<double>>& weights,
                        const std::vector<int>& row_to_col) {
  double total = 0.0;
  for (std::size_t i = 0; i < row_to_col.size(); ++i) {
    const int j = row_to_col[i];
    if (j >= 0) total += weights[i][static_cast<std::size_t>(j)];
  }
  return total;
}

std::vector<int> lexicographic_max_assignment(
    const std::vector<std::vector<double>>& weights, double tol) {
  check_weights(weights);
  const int rows = static_cast<int>(weights.size());
  const int cols = rows == 0 ? 0 : static_cast<int>(weights.front().size());
  std::vector<int> out(static_cast<std::size_t>(rows), -1);
  if (rows == 0 || cols == 0) return out;

  const double best = assignment_total(weights, max_total_assignment(weights));
  std::vector<char> used(static_cast<std::size_t>(cols), 0);
  double prefix = 0.0;
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) {
      if (used[static_cast<std::size_t>(j)]) continue;
      const double wij =
          weights[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
      if (wij <= 0.0) continue;
      used[static_cast<std::size_t>(j)] = 1;
      const double rest = optimal_rest(weights, i + 1, used);
      if (prefix + wij + rest >= best - tol) {
        out[static_cast<std::size_t>(i)] = j;
        prefix += wij;
        break;
      }
      used[static_cast<std::size_t>(j)] = 0;
    }
    // Leaving row i unmatched is always feasible here: some within-tol
    // completion of the current prefix exists, and it is not through any
    // rejected column.
  }
  return out;
}

}  // namespace ovtrack
