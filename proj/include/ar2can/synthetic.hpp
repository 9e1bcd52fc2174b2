#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "ar2can/geometry.hpp"
#include "ar2can/raster.hpp"
#include "ar2can/rewards.hpp"

namespace ar2can {

// Procedural multi-person scene with exact ground truth: head-proxy ellipses
// fill the face boxes, and each person gets a stick-figure skeleton below it.
struct SyntheticScene {
  RasterImage image;
  std::vector<BBox> faces;
  std::vector<PoseSkeleton> poses;
};

SyntheticScene generate_scene(int people, int width, int height, std::uint64_t seed);

// Square face-like crop whose colors are a pure function of `identity`.
RasterImage synthetic_face_crop(std::uint64_t identity, int size);

struct LayoutSamplerConfig {
  int min_people = 2;
  int max_people = 7;
  double max_box_area = 0.2;
  double min_side = 0.05;
};

// Boxes drawn independently inside the unit square, each with area <= max_box_area.
Layout random_layout(std::mt19937_64& rng, const LayoutSamplerConfig& cfg = {});

}  // namespace ar2can
