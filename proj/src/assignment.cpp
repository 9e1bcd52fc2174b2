#include "ar2can/assignment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "ar2can/error.hpp"

namespace ar2can {

CostMatrix::CostMatrix(std::size_t rows, std::size_t cols, std::vector<double> values)
    : rows_(rows), cols_(cols), values_(std::move(values)) {
  if (rows_ == 0 || cols_ == 0) throw DomainError("cost matrix must be at least 1x1");
  if (values_.size() != rows_ * cols_)
    throw DomainError("cost matrix expects " + std::to_string(rows_ * cols_) + " values, got " +
                      std::to_string(values_.size()));
  validate();
}

CostMatrix::CostMatrix(std::size_t rows, std::size_t cols, double fill)
    : CostMatrix(rows, cols, std::vector<double>(rows * cols, fill)) {}

void CostMatrix::validate() const {
  for (std::size_t k = 0; k < values_.size(); ++k) {
    if (!std::isfinite(values_[k]))
      throw DomainError("non-finite cost at (" + std::to_string(k / cols_) + ", " +
                        std::to_string(k % cols_) + ")");
    if (values_[k] < 0.0)
      throw DomainError("negative cost at (" + std::to_string(k / cols_) + ", " +
                        std::to_string(k % cols_) + ")");
  }
}

long Assignment::col_for_row(std::size_t i) const {
  for (const auto& [r, c] : pairs)
    if (r == i) return static_cast<long>(c);
  return -1;
}

CostMatrix centroid_cost_matrix(std::span<const Point> pred, std::span<const Point> det) {
  if (pred.empty() || det.empty()) throw DomainError("centroid cost matrix needs non-empty inputs");
  std::vector<double> values;
  values.reserve(pred.size() * det.size());
  for (const auto& p : pred)
    for (const auto& d : det) values.push_back(euclidean(p, d));
  return CostMatrix(pred.size(), det.size(), std::move(values));
}

namespace {

// Square shortest-augmenting-path Hungarian with row/column potentials.
// Returns the row matched to each column (1-based internally, converted here)
// and leaves the optimal duals in u/v: c(i, j) - u[i] - v[j] >= 0 everywhere
// and == 0 on matched edges.
struct SquareSolution {
  std::vector<std::size_t> row_of_col;
  std::vector<std::size_t> col_of_row;
  std::vector<double> u;
  std::vector<double> v;
};

SquareSolution solve_square(const std::vector<double>& a, std::size_t n) {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1);
  std::vector<std::size_t> p(n + 1, 0), way(n + 1, 0);
  std::vector<char> used(n + 1);
  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::fill(minv.begin(), minv.end(), kInf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = p[j0];
      double delta = kInf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
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
  SquareSolution s;
  s.row_of_col.resize(n);
  s.col_of_row.resize(n);
  s.u.assign(u.begin() + 1, u.end());
  s.v.assign(v.begin() + 1, v.end());
  for (std::size_t j = 1; j <= n; ++j) {
    s.row_of_col[j - 1] = p[j] - 1;
    s.col_of_row[p[j] - 1] = j - 1;
  }
  return s;
}

// Walks rows in order and moves each one onto the smallest column it can hold
// in some optimal matching. Optimal matchings are exactly the perfect
// matchings of the tight-edge graph, so each step is a search for an
// alternating cycle through row i that stays among unfixed rows. O(n^2) per
// row.
void make_lexicographic(const std::vector<double>& a, std::size_t n, SquareSolution& s,
                        double tight_eps, std::size_t rows_to_fix) {
  auto tight = [&](std::size_t i, std::size_t j) {
    return a[i * n + j] - s.u[i] - s.v[j] <= tight_eps;
  };
  constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> next(n);
  std::vector<char> absorbing(n);
  std::vector<std::size_t> queue;
  queue.reserve(n);
  for (std::size_t i = 0; i < rows_to_fix; ++i) {
    const std::size_t home = s.col_of_row[i];
    // Columns whose owner could shift, directly or through a chain, onto the
    // column row i gives up.
    std::fill(next.begin(), next.end(), kNone);
    std::fill(absorbing.begin(), absorbing.end(), 0);
    absorbing[home] = 1;
    queue.assign(1, home);
    for (std::size_t q = 0; q < queue.size(); ++q) {
      const std::size_t target = queue[q];
      for (std::size_t r = i + 1; r < n; ++r) {
        const std::size_t owned = s.col_of_row[r];
        if (absorbing[owned] || !tight(r, target)) continue;
        absorbing[owned] = 1;
        next[owned] = target;
        queue.push_back(owned);
      }
    }
    std::size_t best = home;
    for (std::size_t j = 0; j < home; ++j) {
      if (absorbing[j] && tight(i, j)) {
        best = j;
        break;
      }
    }
    if (best == home) continue;
    // Shift owners along the chain best -> ... -> home, then give best to i.
    std::size_t col = best;
    while (col != home) {
      const std::size_t owner = s.row_of_col[col];
      const std::size_t dest = next[col];
      s.col_of_row[owner] = dest;
      col = dest;
    }
    s.col_of_row[i] = best;
    for (std::size_t r = 0; r < n; ++r) s.row_of_col[s.col_of_row[r]] = r;
  }
}

}  // namespace

Assignment hungarian(const CostMatrix& c) {
  c.validate();
  const std::size_t rows = c.rows();
  const std::size_t cols = c.cols();
  const std::size_t n = std::max(rows, cols);
  // Padding cells share one constant value; every perfect matching of the
  // padded square uses exactly |N - O| of them, so the constant never changes
  // which real pairs are optimal. Zero keeps the duals well conditioned.
  std::vector<double> a(n * n, 0.0);
  double max_abs = 0.0;
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) {
      a[i * n + j] = c(i, j);
      max_abs = std::max(max_abs, c(i, j));
    }
  SquareSolution s = solve_square(a, n);
  const double tight_eps = 1e-12 * static_cast<double>(n) * (1.0 + max_abs);
  make_lexicographic(a, n, s, tight_eps, rows);

  Assignment out;
  std::vector<char> col_used(cols, 0);
  for (std::size_t i = 0; i < rows; ++i) {
    const std::size_t j = s.col_of_row[i];
    if (j < cols) {
      out.pairs.emplace_back(i, j);
      out.total_cost += c(i, j);
      col_used[j] = 1;
    } else {
      out.unmatched_rows.push_back(i);
    }
  }
  for (std::size_t j = 0; j < cols; ++j)
    if (!col_used[j]) out.unmatched_cols.push_back(j);
  return out;
}

}  // namespace ar2can
