#pragma once

#include <vector>

namespace ovtrack {

/// Maximum-total-weight bipartite assignment over a dense, non-negative
/// weight matrix (rows x cols, not necessarily square). Entries that are
/// exactly 0 are treated as "no edge". Returns, per row, the assigned
/// column or -1.
std::vector<int> max_total_assignment(
    const std::vector<std::vector<double>>& weights);

/// Total weight of an assignment, accumulated in row order so that two
/// callers comparing totals of the same assignment agree bitwise.
double assignment_total(const std::vector<std::vector<double>>& weights,
                        const std::vector<int>& row_to_col);

/// Deterministic variant: among all assignments whose total is within
/// `tol` of the optimum, returns the one whose row -> column vector is
/// lexicographically smallest (unmatched sorts after any column index).
std::vector<int> lexicographic_max_assignment(
    const std::vector<std::vector<double>>& weights, double tol = 1e-9);

}  // namespace ovtrack
