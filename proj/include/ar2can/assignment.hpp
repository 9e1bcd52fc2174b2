#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "ar2can/geometry.hpp"

namespace ar2can {

// Dense row-major N x O cost matrix. Entries must be finite and >= 0.
class CostMatrix {
 public:
  CostMatrix(std::size_t rows, std::size_t cols, std::vector<double> values);
  CostMatrix(std::size_t rows, std::size_t cols, double fill = 0.0);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double operator()(std::size_t i, std::size_t j) const { return values_[i * cols_ + j]; }
  double& at(std::size_t i, std::size_t j) { return values_[i * cols_ + j]; }
  std::span<const double> values() const { return values_; }

  // Re-checks the finite / non-negative invariant after in-place edits via at().
  void validate() const;

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> values_;
};

struct Assignment {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;  // ascending row index
  std::vector<std::size_t> unmatched_rows;
  std::vector<std::size_t> unmatched_cols;
  double total_cost = 0.0;

  // Column matched to row i, or -1 when unmatched.
  long col_for_row(std::size_t i) const;
};

// C[i][j] = |pred[i] - det[j]|_2. Throws DomainError on an empty side.
CostMatrix centroid_cost_matrix(std::span<const Point> pred, std::span<const Point> det);

// Minimum-cost injective assignment of size min(N, O). Among optimal
// assignments the lexicographically smallest pair list is returned, so the
// result does not depend on input iteration quirks. O(n^3), n = max(N, O).
Assignment hungarian(const CostMatrix& c);

}  // namespace ar2can
