#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "ar2can/geometry.hpp"
#include "ar2can/oracles.hpp"
#include "ar2can/raster.hpp"
#include "ar2can/rewards.hpp"

namespace ar2can {

enum class ReferenceSource : int { kMultiView = 1, kSingleView = 2, kSynthetic = 3 };

// Probabilities of drawing a reference from the multi-view, single-view and
// synthetic pools.
struct SourceMix {
  double p1 = 0.5;
  double p2 = 0.4;
  double p3 = 0.1;

  void validate() const;
};

ReferenceSource sample_source(const SourceMix& mix, std::mt19937_64& rng);

struct AugmentParams {
  double rotation_deg = 0.0;
  bool flip = false;
  double brightness = 1.0;
};

inline constexpr double kMaxRotationDeg = 15.0;
inline constexpr double kMinBrightness = 0.8;
inline constexpr double kMaxBrightness = 1.2;

// rotation ~ U[-15, 15] degrees, flip ~ Bernoulli(0.5), brightness ~ U[0.8, 1.2].
AugmentParams sample_augment_params(std::mt19937_64& rng);
// Rotate about the center (bilinear, border replicate), then flip, then scale
// brightness with rounding and clamping. Output keeps the input dimensions.
RasterImage apply_augmentation(const RasterImage& crop, const AugmentParams& params);
RasterImage augment_reference(const RasterImage& crop, std::mt19937_64& rng);
RasterImage flip_horizontal(const RasterImage& img);

// Colors used for limb segments, in the order of kCocoLimbs.
struct Limb {
  std::size_t a;
  std::size_t b;
  Rgb color;
};
extern const std::vector<Limb> kCocoLimbs;
inline constexpr double kFaceOverlayAlpha = 0.35;
inline constexpr int kLimbRadiusPx = 1;

// Pixels a skeleton overlay may touch on a width x height canvas.
std::vector<bool> skeleton_mask(const PoseSkeleton& pose, int width, int height);
// Draws limbs of visible keypoints; inside any of `face_boxes` the color is
// blended at kFaceOverlayAlpha instead of painted opaque.
void overlay_skeleton(RasterImage& canvas, const PoseSkeleton& pose,
                      std::span<const BBox> face_boxes);

struct CanvasSample {
  std::vector<RasterImage> canvases;  // one per identity, blank outside its box
  std::vector<ReferenceIdentity> refs;
  std::vector<RasterImage> reference_images;
  std::vector<ReferenceSource> sources;
  Layout layout;
  RasterImage target;
  std::optional<std::vector<PoseSkeleton>> pose_overlays;
};

struct CanvasExtras {
  std::vector<PoseSkeleton> poses;   // required when use_pose is set
  std::vector<std::string> ref_ids;  // defaults to "ref_<i>"
  const Embedder* embedder = nullptr;  // defaults to HashEmbedder
};

// Builds one canvas per detected face: pick a reference source, produce the
// secondary view (as-is for multi-view, augmented otherwise; synthetic
// sources reuse the scene's own face), and paste it into the face box on a
// blank canvas at scene resolution. Deterministic for a fixed seed.
CanvasSample construct_canvas(const RasterImage& scene, std::span<const BBox> detections,
                              std::span<const RasterImage> reference_crops, const SourceMix& mix,
                              bool use_pose, std::uint64_t seed, const CanvasExtras& extras = {});

// Writes sample_<id>/canvas_<i>.ppm, layout.json, refs.json and target.ppm
// under `root`; returns the sample directory.
std::filesystem::path write_canvas_sample(const std::filesystem::path& root, const std::string& id,
                                          const CanvasSample& sample);

}  // namespace ar2can
