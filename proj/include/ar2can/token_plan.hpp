#pragma once

#include <cstddef>
#include <set>
#include <span>
#include <utility>
#include <vector>

#include "ar2can/geometry.hpp"

namespace ar2can {

inline constexpr int kDefaultPatchSize = 16;

// Patch tokenization of a width x height canvas. When patch_size does not
// divide a dimension the grid is padded up to the next whole patch; padded
// cells extend past the image edge.
struct PatchGrid {
  int patch_size = kDefaultPatchSize;
  int width = 0;
  int height = 0;
  int cols = 0;
  int rows = 0;

  static PatchGrid for_image(int width, int height, int patch_size = kDefaultPatchSize);
  std::size_t cells() const { return static_cast<std::size_t>(cols) * rows; }
  std::size_t index(int row, int col) const { return static_cast<std::size_t>(row) * cols + col; }
};

// Positional ID consumed by the rotary embedding. row/col are absolute grid
// coordinates; plane is 0 for canvases that share positions and 1 + canvas
// index for canvases with sharing disabled.
struct PositionId {
  int plane = 0;
  int row = 0;
  int col = 0;

  friend auto operator<=>(const PositionId&, const PositionId&) = default;
};

struct PlannedToken {
  std::size_t patch = 0;
  PositionId id;

  friend bool operator==(const PlannedToken&, const PlannedToken&) = default;
};

using TokenRef = std::pair<std::size_t, std::size_t>;  // (canvas, patch)

struct TokenPlan {
  PatchGrid grid;
  std::vector<std::vector<PlannedToken>> kept;  // per canvas, ascending patch index
  std::vector<std::set<TokenRef>> shared_groups;  // ascending by cell, then canvas

  std::size_t total_kept() const;
  // Positional ID of (canvas, patch), or nullptr when that token was dropped.
  const PositionId* find(std::size_t canvas, std::size_t patch) const;
};

struct TokenPlanOptions {
  // Canvases whose overlap tokens get their own positions ("place behind").
  std::vector<std::size_t> unshared_canvases;
};

// Half-open cell/box intersection with positive overlap area.
bool cell_intersects(const PatchGrid& grid, int row, int col, const BBox& box);

// Canvas i keeps every cell that intersects box i. Tokens from several
// canvases in the same cell carry the same position and form one shared group.
TokenPlan plan_tokens(const PatchGrid& grid, const Layout& layout, const TokenPlanOptions& options = {});

// (cells * canvases) / kept tokens.
double reduction_factor(const PatchGrid& grid, const Layout& layout);
double reduction_factor(const TokenPlan& plan);

}  // namespace ar2can
