#include "ar2can/canvas.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>

#include "ar2can/error.hpp"
#include "ar2can/io.hpp"

namespace ar2can {

void SourceMix::validate() const {
  for (double p : {p1, p2, p3})
    if (!std::isfinite(p) || p < 0.0) throw DomainError("source probabilities must be >= 0");
  if (std::abs(p1 + p2 + p3 - 1.0) > 1e-9) throw DomainError("source probabilities must sum to 1");
}

ReferenceSource sample_source(const SourceMix& mix, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double r = u(rng);
  if (r < mix.p1) return ReferenceSource::kMultiView;
  if (r < mix.p1 + mix.p2 || mix.p3 == 0.0) return ReferenceSource::kSingleView;
  return ReferenceSource::kSynthetic;
}

AugmentParams sample_augment_params(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> rot(-kMaxRotationDeg, kMaxRotationDeg);
  std::bernoulli_distribution flip(0.5);
  std::uniform_real_distribution<double> bright(kMinBrightness, kMaxBrightness);
  AugmentParams p;
  p.rotation_deg = rot(rng);
  p.flip = flip(rng);
  p.brightness = bright(rng);
  return p;
}

RasterImage flip_horizontal(const RasterImage& img) {
  RasterImage out = img;
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x) out.set_pixel(x, y, img.pixel(img.width() - 1 - x, y));
  return out;
}

namespace {

RasterImage rotate(const RasterImage& img, double deg) {
  if (deg == 0.0) return img;
  const double rad = deg * std::numbers::pi / 180.0;
  const double c = std::cos(rad), s = std::sin(rad);
  const double cx = (img.width() - 1) / 2.0, cy = (img.height() - 1) / 2.0;
  RasterImage out(img.width(), img.height());
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x) {
      // Inverse map: source = R(-deg) * (dest - center) + center.
      const double dx = x - cx, dy = y - cy;
      const double sx = std::clamp(c * dx + s * dy + cx, 0.0, img.width() - 1.0);
      const double sy = std::clamp(-s * dx + c * dy + cy, 0.0, img.height() - 1.0);
      const int x0 = static_cast<int>(sx), y0 = static_cast<int>(sy);
      const int x1 = std::min(x0 + 1, img.width() - 1), y1 = std::min(y0 + 1, img.height() - 1);
      const double tx = sx - x0, ty = sy - y0;
      for (int ch = 0; ch < 3; ++ch) {
        const double top = img.at(x0, y0, ch) * (1 - tx) + img.at(x1, y0, ch) * tx;
        const double bot = img.at(x0, y1, ch) * (1 - tx) + img.at(x1, y1, ch) * tx;
        out.at(x, y, ch) = static_cast<std::uint8_t>(std::lround(top * (1 - ty) + bot * ty));
      }
    }
  return out;
}

}  // namespace

RasterImage apply_augmentation(const RasterImage& crop, const AugmentParams& params) {
  if (crop.empty()) throw DomainError("cannot augment an empty crop");
  RasterImage out = rotate(crop, params.rotation_deg);
  if (params.flip) out = flip_horizontal(out);
  if (params.brightness != 1.0) {
    for (int y = 0; y < out.height(); ++y)
      for (int x = 0; x < out.width(); ++x)
        for (int ch = 0; ch < 3; ++ch) {
          const double v = std::round(out.at(x, y, ch) * params.brightness);
          out.at(x, y, ch) = static_cast<std::uint8_t>(std::clamp(v, 0.0, 255.0));
        }
  }
  return out;
}

RasterImage augment_reference(const RasterImage& crop, std::mt19937_64& rng) {
  return apply_augmentation(crop, sample_augment_params(rng));
}

// Fixed per-limb colors: head in yellow tones, arms warm, torso white, legs cool.
const std::vector<Limb> kCocoLimbs{
    {kKpNose, kKpLeftEye, {255, 255, 0}},          {kKpNose, kKpRightEye, {255, 220, 0}},
    {kKpLeftEye, kKpLeftEar, {255, 190, 0}},       {kKpRightEye, kKpRightEar, {255, 160, 0}},
    {kKpLeftShoulder, kKpRightShoulder, {255, 255, 255}},
    {kKpLeftShoulder, kKpLeftElbow, {255, 0, 0}},  {kKpLeftElbow, kKpLeftWrist, {255, 85, 0}},
    {kKpRightShoulder, kKpRightElbow, {255, 0, 170}}, {kKpRightElbow, kKpRightWrist, {255, 0, 255}},
    {kKpLeftShoulder, kKpLeftHip, {230, 230, 230}}, {kKpRightShoulder, kKpRightHip, {200, 200, 200}},
    {kKpLeftHip, kKpRightHip, {170, 170, 170}},
    {kKpLeftHip, kKpLeftKnee, {0, 255, 0}},        {kKpLeftKnee, kKpLeftAnkle, {0, 255, 170}},
    {kKpRightHip, kKpRightKnee, {0, 170, 255}},    {kKpRightKnee, kKpRightAnkle, {0, 0, 255}},
};

namespace {

template <typename Fn>
void for_each_limb_pixel(const PoseSkeleton& pose, int width, int height, Fn&& fn) {
  for (const auto& limb : kCocoLimbs) {
    if (limb.a >= pose.keypoints.size() || limb.b >= pose.keypoints.size()) continue;
    const auto& ka = pose.keypoints[limb.a];
    const auto& kb = pose.keypoints[limb.b];
    if (!ka.visible || !kb.visible) continue;
    const double ax = ka.position.cx * width, ay = ka.position.cy * height;
    const double bx = kb.position.cx * width, by = kb.position.cy * height;
    const int x0 = std::max(0, static_cast<int>(std::floor(std::min(ax, bx))) - kLimbRadiusPx - 1);
    const int x1 = std::min(width - 1, static_cast<int>(std::ceil(std::max(ax, bx))) + kLimbRadiusPx + 1);
    const int y0 = std::max(0, static_cast<int>(std::floor(std::min(ay, by))) - kLimbRadiusPx - 1);
    const int y1 = std::min(height - 1, static_cast<int>(std::ceil(std::max(ay, by))) + kLimbRadiusPx + 1);
    const double vx = bx - ax, vy = by - ay;
    const double len2 = vx * vx + vy * vy;
    for (int y = y0; y <= y1; ++y)
      for (int x = x0; x <= x1; ++x) {
        const double px = x + 0.5 - ax, py = y + 0.5 - ay;
        const double t = len2 > 0.0 ? std::clamp((px * vx + py * vy) / len2, 0.0, 1.0) : 0.0;
        const double ex = px - t * vx, ey = py - t * vy;
        if (ex * ex + ey * ey <= (kLimbRadiusPx + 0.5) * (kLimbRadiusPx + 0.5)) fn(x, y, limb.color);
      }
  }
}

}  // namespace

std::vector<bool> skeleton_mask(const PoseSkeleton& pose, int width, int height) {
  std::vector<bool> mask(static_cast<std::size_t>(width) * height, false);
  for_each_limb_pixel(pose, width, height,
                      [&](int x, int y, Rgb) { mask[static_cast<std::size_t>(y) * width + x] = true; });
  return mask;
}

void overlay_skeleton(RasterImage& canvas, const PoseSkeleton& pose,
                      std::span<const BBox> face_boxes) {
  const int w = canvas.width(), h = canvas.height();
  std::vector<PixelRect> faces;
  for (const auto& b : face_boxes) faces.push_back(pixel_rect(b, w, h));
  // Later limbs win where segments overlap; each pixel is blended once.
  std::vector<std::optional<Rgb>> paint(static_cast<std::size_t>(w) * h);
  for_each_limb_pixel(pose, w, h, [&](int x, int y, Rgb color) {
    paint[static_cast<std::size_t>(y) * w + x] = color;
  });
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const auto& color = paint[static_cast<std::size_t>(y) * w + x];
      if (!color) continue;
      const bool in_face =
          std::any_of(faces.begin(), faces.end(), [&](const PixelRect& r) { return r.contains(x, y); });
      if (!in_face) {
        canvas.set_pixel(x, y, *color);
        continue;
      }
      for (int ch = 0; ch < 3; ++ch) {
        const double v = (1.0 - kFaceOverlayAlpha) * canvas.at(x, y, ch) + kFaceOverlayAlpha * (*color)[ch];
        canvas.at(x, y, ch) = static_cast<std::uint8_t>(std::lround(v));
      }
    }
}

CanvasSample construct_canvas(const RasterImage& scene, std::span<const BBox> detections,
                              std::span<const RasterImage> reference_crops, const SourceMix& mix,
                              bool use_pose, std::uint64_t seed, const CanvasExtras& extras) {
  mix.validate();
  const std::size_t n = detections.size();
  if (n < 2) throw DomainError("canvas construction needs at least two faces");
  if (reference_crops.size() != n)
    throw DomainError("canvas construction needs one reference crop per detected face");
  if (scene.empty()) throw DomainError("canvas construction needs a non-empty scene");
  for (const auto& d : detections) {
    if (!is_valid_box(d)) throw DomainError("detection outside the scene bounds");
    if (pixel_rect(d, scene.width(), scene.height()).empty())
      throw DomainError("detection covers no pixel centers at scene resolution");
  }
  for (const auto& r : reference_crops)
    if (r.empty()) throw DomainError("reference crop is empty");
  if (use_pose && extras.poses.size() != n)
    throw DomainError("pose mode needs one skeleton per detected face");
  if (!extras.ref_ids.empty() && extras.ref_ids.size() != n)
    throw DomainError("reference id list does not match the face count");

  const HashEmbedder default_embedder;
  const Embedder& embedder = extras.embedder ? *extras.embedder : default_embedder;
  std::mt19937_64 rng(seed);

  CanvasSample out;
  out.target = scene;
  out.layout.boxes.assign(detections.begin(), detections.end());
  for (std::size_t i = 0; i < n; ++i) {
    const ReferenceSource source = sample_source(mix, rng);
    RasterImage reference = source == ReferenceSource::kSynthetic
                                ? crop_box(scene, detections[i])
                                : reference_crops[i];
    RasterImage secondary = source == ReferenceSource::kMultiView
                                ? reference
                                : augment_reference(reference, rng);

    const PixelRect r = pixel_rect(detections[i], scene.width(), scene.height());
    const RasterImage patch = resize_bilinear(secondary, r.width(), r.height());
    RasterImage canvas(scene.width(), scene.height(), kBlank);
    for (int y = 0; y < r.height(); ++y)
      for (int x = 0; x < r.width(); ++x) canvas.set_pixel(r.x0 + x, r.y0 + y, patch.pixel(x, y));
    if (use_pose) overlay_skeleton(canvas, extras.poses[i], detections);

    const std::string id = extras.ref_ids.empty() ? "ref_" + std::to_string(i) : extras.ref_ids[i];
    out.refs.push_back({id, normalized(embedder.embed(reference))});
    out.reference_images.push_back(std::move(reference));
    out.sources.push_back(source);
    out.canvases.push_back(std::move(canvas));
  }
  if (use_pose) out.pose_overlays = extras.poses;
  return out;
}

std::filesystem::path write_canvas_sample(const std::filesystem::path& root, const std::string& id,
                                          const CanvasSample& sample) {
  namespace fs = std::filesystem;
  const fs::path dir = root / ("sample_" + id);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw InputError("cannot create " + dir.string() + ": " + ec.message());
  for (std::size_t i = 0; i < sample.canvases.size(); ++i)
    write_ppm(dir / ("canvas_" + std::to_string(i) + ".ppm"), sample.canvases[i]);
  write_ppm(dir / "target.ppm", sample.target);
  write_text(dir / "layout.json", layout_to_json(sample.layout).dump(2) + "\n");
  auto refs = refs_to_json(sample.refs);
  for (std::size_t i = 0; i < sample.sources.size(); ++i)
    refs["refs"][i]["source"] = static_cast<int>(sample.sources[i]);
  write_text(dir / "refs.json", refs.dump(2) + "\n");
  if (sample.pose_overlays)
    write_text(dir / "poses.json", poses_to_json(*sample.pose_overlays).dump(2) + "\n");
  return dir;
}

}  // namespace ar2can
