#include "ar2can/token_plan.hpp"

#include <algorithm>
#include <map>

#include "ar2can/error.hpp"

namespace ar2can {

PatchGrid PatchGrid::for_image(int width, int height, int patch_size) {
  if (width <= 0 || height <= 0) throw DomainError("patch grid needs a positive image size");
  if (patch_size <= 0) throw DomainError("patch size must be positive");
  PatchGrid g;
  g.patch_size = patch_size;
  g.width = width;
  g.height = height;
  g.cols = (width + patch_size - 1) / patch_size;
  g.rows = (height + patch_size - 1) / patch_size;
  return g;
}

std::size_t TokenPlan::total_kept() const {
  std::size_t total = 0;
  for (const auto& k : kept) total += k.size();
  return total;
}

const PositionId* TokenPlan::find(std::size_t canvas, std::size_t patch) const {
  if (canvas >= kept.size()) return nullptr;
  const auto& tokens = kept[canvas];
  auto it = std::lower_bound(tokens.begin(), tokens.end(), patch,
                             [](const PlannedToken& t, std::size_t p) { return t.patch < p; });
  return it != tokens.end() && it->patch == patch ? &it->id : nullptr;
}

bool cell_intersects(const PatchGrid& grid, int row, int col, const BBox& box) {
  // Pixel units keep cell edges exact integers.
  const double bx0 = box.x * grid.width, bx1 = box.right() * grid.width;
  const double by0 = box.y * grid.height, by1 = box.bottom() * grid.height;
  const double cx0 = static_cast<double>(col) * grid.patch_size;
  const double cy0 = static_cast<double>(row) * grid.patch_size;
  const double cx1 = cx0 + grid.patch_size, cy1 = cy0 + grid.patch_size;
  return std::max(bx0, cx0) < std::min(bx1, cx1) && std::max(by0, cy0) < std::min(by1, cy1);
}

TokenPlan plan_tokens(const PatchGrid& grid, const Layout& layout, const TokenPlanOptions& options) {
  if (grid.cols <= 0 || grid.rows <= 0) throw DomainError("patch grid is empty");
  for (const auto& b : layout.boxes) validate_box(b);
  for (auto c : options.unshared_canvases)
    if (c >= layout.count()) throw DomainError("unshared canvas index outside the layout");

  const std::size_t n = layout.count();
  std::vector<char> shares(n, 1);
  for (auto c : options.unshared_canvases) shares[c] = 0;

  TokenPlan plan;
  plan.grid = grid;
  plan.kept.resize(n);
  std::map<std::size_t, std::set<TokenRef>> by_cell;
  for (std::size_t i = 0; i < n; ++i) {
    const BBox& b = layout.boxes[i];
    // Only cells overlapping the box's pixel extent can intersect it.
    const int c0 = std::max(0, static_cast<int>(b.x * grid.width) / grid.patch_size - 1);
    const int c1 = std::min(grid.cols - 1, static_cast<int>(b.right() * grid.width) / grid.patch_size + 1);
    const int r0 = std::max(0, static_cast<int>(b.y * grid.height) / grid.patch_size - 1);
    const int r1 = std::min(grid.rows - 1, static_cast<int>(b.bottom() * grid.height) / grid.patch_size + 1);
    const int plane = shares[i] ? 0 : static_cast<int>(i) + 1;
    for (int r = r0; r <= r1; ++r)
      for (int c = c0; c <= c1; ++c) {
        if (!cell_intersects(grid, r, c, b)) continue;
        const std::size_t patch = grid.index(r, c);
        plan.kept[i].push_back({patch, {plane, r, c}});
        if (shares[i]) by_cell[patch].insert({i, patch});
      }
  }
  for (auto& [cell, members] : by_cell)
    if (members.size() >= 2) plan.shared_groups.push_back(std::move(members));
  return plan;
}

double reduction_factor(const TokenPlan& plan) {
  const std::size_t kept = plan.total_kept();
  if (kept == 0) throw DomainError("token plan keeps no tokens");
  return static_cast<double>(plan.grid.cells() * plan.kept.size()) / static_cast<double>(kept);
}

double reduction_factor(const PatchGrid& grid, const Layout& layout) {
  return reduction_factor(plan_tokens(grid, layout));
}

}  // namespace ar2can
