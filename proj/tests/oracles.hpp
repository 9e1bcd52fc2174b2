#pragma once

// Independent reference computations used only by tests. Nothing here calls
// into the code paths it checks.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <random>
#include <utility>
#include <vector>

#include "ar2can/assignment.hpp"
#include "ar2can/geometry.hpp"
#include "ar2can/token_plan.hpp"

namespace oracle {

// Number of grid sample centers (k + 0.5) / n lying in [lo, hi).
inline long samples_in(double lo, double hi, int n) {
  long count = 0;
  for (int k = 0; k < n; ++k) {
    const double s = (k + 0.5) / n;
    if (s >= lo && s < hi) ++count;
  }
  return count;
}

struct GridAreas {
  double iou = 0.0;
  double giou = 0.0;
};

// IoU / GIoU from sample counts on an n x n grid over the unit square. Boxes
// are axis-aligned, so counts factor into per-axis counts.
inline GridAreas grid_areas(const ar2can::BBox& a, const ar2can::BBox& b, int n = 512) {
  auto count = [n](double x0, double x1, double y0, double y1) {
    if (x1 <= x0 || y1 <= y0) return 0.0;
    return static_cast<double>(samples_in(x0, x1, n) * samples_in(y0, y1, n));
  };
  const double ca = count(a.x, a.x + a.w, a.y, a.y + a.h);
  const double cb = count(b.x, b.x + b.w, b.y, b.y + b.h);
  const double ci = count(std::max(a.x, b.x), std::min(a.x + a.w, b.x + b.w), std::max(a.y, b.y),
                          std::min(a.y + a.h, b.y + b.h));
  const double cc = count(std::min(a.x, b.x), std::max(a.x + a.w, b.x + b.w), std::min(a.y, b.y),
                          std::max(a.y + a.h, b.y + b.h));
  const double cu = ca + cb - ci;
  return {ci / cu, ci / cu - (cc - cu) / cc};
}

struct BruteAssignment {
  double cost = std::numeric_limits<double>::infinity();
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
};

// Exhaustive search over every injective map of size min(N, O). Rows are
// visited in order, columns ascending before "unmatched", so the first
// strictly-better solution found is the lexicographically smallest optimum.
inline BruteAssignment brute_force_assignment(const ar2can::CostMatrix& c) {
  const std::size_t n = c.rows(), m = c.cols();
  const std::size_t need = std::min(n, m);
  BruteAssignment best;
  std::vector<std::pair<std::size_t, std::size_t>> cur;
  std::vector<char> used(m, 0);
  std::function<void(std::size_t)> dfs = [&](std::size_t row) {
    if (cur.size() == need) {
      double cost = 0.0;
      for (const auto& [i, j] : cur) cost += c(i, j);
      if (cost < best.cost) {
        best.cost = cost;
        best.pairs = cur;
      }
      return;
    }
    if (row == n) return;
    for (std::size_t j = 0; j < m; ++j) {
      if (used[j]) continue;
      used[j] = 1;
      cur.emplace_back(row, j);
      dfs(row + 1);
      cur.pop_back();
      used[j] = 0;
    }
    if (n - row - 1 >= need - cur.size()) dfs(row + 1);
  };
  dfs(0);
  return best;
}

// Two-pass mean and population standard deviation in extended precision.
inline std::pair<double, double> mean_std(const std::vector<double>& v) {
  long double s = 0;
  for (double x : v) s += x;
  const long double mu = s / v.size();
  long double ss = 0;
  for (double x : v) ss += (x - mu) * (x - mu);
  return {static_cast<double>(mu), static_cast<double>(std::sqrt(ss / v.size()))};
}

// Central differences of f at x.
inline std::vector<double> central_gradient(const std::function<double(const std::vector<double>&)>& f,
                                            std::vector<double> x, double h = 1e-5) {
  std::vector<double> g(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double orig = x[k];
    x[k] = orig + h;
    const double fp = f(x);
    x[k] = orig - h;
    const double fm = f(x);
    x[k] = orig;
    g[k] = (fp - fm) / (2 * h);
  }
  return g;
}

// Cell-by-cell overlap test in normalized coordinates: positive-area overlap
// between the half-open cell and the box.
inline std::vector<std::size_t> kept_cells(const ar2can::PatchGrid& g, const ar2can::BBox& b) {
  std::vector<std::size_t> out;
  const double cw = static_cast<double>(g.patch_size) / g.width;
  const double ch = static_cast<double>(g.patch_size) / g.height;
  for (int r = 0; r < g.rows; ++r)
    for (int c = 0; c < g.cols; ++c) {
      const double ox = std::min(b.x + b.w, (c + 1) * cw) - std::max(b.x, c * cw);
      const double oy = std::min(b.y + b.h, (r + 1) * ch) - std::max(b.y, r * ch);
      if (ox > 0 && oy > 0) out.push_back(static_cast<std::size_t>(r) * g.cols + c);
    }
  return out;
}

inline ar2can::BBox random_box(std::mt19937_64& rng, double min_side = 0.05, double max_side = 0.6) {
  std::uniform_real_distribution<double> side(min_side, max_side);
  const double w = side(rng), h = side(rng);
  std::uniform_real_distribution<double> px(0.0, 1.0 - w), py(0.0, 1.0 - h);
  return {px(rng), py(rng), w, h};
}

}  // namespace oracle
