#include "ar2can/synthetic.hpp"

#include <algorithm>
#include <cmath>

#include "ar2can/error.hpp"

namespace ar2can {

namespace {

Rgb random_color(std::mt19937_64& rng, int lo, int hi) {
  std::uniform_int_distribution<int> d(lo, hi);
  return {static_cast<std::uint8_t>(d(rng)), static_cast<std::uint8_t>(d(rng)),
          static_cast<std::uint8_t>(d(rng))};
}

void fill_ellipse(RasterImage& img, const PixelRect& r, Rgb color) {
  const double cx = (r.x0 + r.x1) / 2.0, cy = (r.y0 + r.y1) / 2.0;
  const double rx = r.width() / 2.0, ry = r.height() / 2.0;
  for (int y = r.y0; y < r.y1; ++y)
    for (int x = r.x0; x < r.x1; ++x) {
      const double dx = (x + 0.5 - cx) / rx, dy = (y + 0.5 - cy) / ry;
      if (dx * dx + dy * dy <= 1.0) img.set_pixel(x, y, color);
    }
}

void fill_rect(RasterImage& img, const PixelRect& r, Rgb color) {
  for (int y = r.y0; y < r.y1; ++y)
    for (int x = r.x0; x < r.x1; ++x) img.set_pixel(x, y, color);
}

bool overlaps(const BBox& a, const BBox& b, double margin) {
  return a.x < b.right() + margin && b.x < a.right() + margin && a.y < b.bottom() + margin &&
         b.y < a.bottom() + margin;
}

PoseSkeleton stick_figure(const BBox& head, double body_bottom) {
  const Point c = centroid(head);
  const double s = head.w;
  const double shoulder_y = head.bottom() + 0.2 * s;
  const double hip_y = std::min(shoulder_y + 2.0 * s, body_bottom - 0.6 * s);
  const double knee_y = (hip_y + body_bottom) / 2.0;
  auto kp = [](double x, double y) {
    return Keypoint{{std::clamp(x, 0.0, 1.0), std::clamp(y, 0.0, 1.0)}, true};
  };
  PoseSkeleton p;
  p.keypoints = {
      kp(c.cx, c.cy + 0.1 * head.h),                          // nose
      kp(c.cx - 0.2 * s, c.cy - 0.1 * head.h),                // left eye
      kp(c.cx + 0.2 * s, c.cy - 0.1 * head.h),                // right eye
      kp(head.x, c.cy), kp(head.right(), c.cy),               // ears
      kp(c.cx - 0.8 * s, shoulder_y), kp(c.cx + 0.8 * s, shoulder_y),
      kp(c.cx - 1.0 * s, shoulder_y + 0.9 * s), kp(c.cx + 1.0 * s, shoulder_y + 0.9 * s),
      kp(c.cx - 1.1 * s, shoulder_y + 1.7 * s), kp(c.cx + 1.1 * s, shoulder_y + 1.7 * s),
      kp(c.cx - 0.5 * s, hip_y), kp(c.cx + 0.5 * s, hip_y),
      kp(c.cx - 0.5 * s, knee_y), kp(c.cx + 0.5 * s, knee_y),
      kp(c.cx - 0.5 * s, body_bottom), kp(c.cx + 0.5 * s, body_bottom),
  };
  const double bw = 2.4 * s;
  p.area = bw * std::max(body_bottom - head.y, s);
  return p;
}

}  // namespace

SyntheticScene generate_scene(int people, int width, int height, std::uint64_t seed) {
  if (people < 1) throw DomainError("a scene needs at least one person");
  std::mt19937_64 rng(seed);
  SyntheticScene scene;
  scene.image = RasterImage(width, height, random_color(rng, 30, 90));

  std::uniform_real_distribution<double> side(0.06, 0.12);
  for (int attempt = 0; static_cast<int>(scene.faces.size()) < people; ++attempt) {
    if (attempt > 10000) throw DomainError("could not place " + std::to_string(people) + " faces");
    const double w = side(rng);
    const double h = w * static_cast<double>(width) / height * 1.2;
    std::uniform_real_distribution<double> px(0.02, 0.98 - w), py(0.05, 0.55 - h);
    const BBox b{px(rng), py(rng), w, h};
    if (std::any_of(scene.faces.begin(), scene.faces.end(),
                    [&](const BBox& o) { return overlaps(o, b, 0.01); }))
      continue;
    scene.faces.push_back(b);
  }
  for (const auto& f : scene.faces) {
    const double bottom = std::min(0.98, f.bottom() + 5.0 * f.w);
    const BBox torso{std::max(0.0, f.x - 0.4 * f.w), f.bottom(), std::min(1.8 * f.w, 1.0 - f.x),
                     bottom - f.bottom()};
    fill_rect(scene.image, pixel_rect(torso, width, height), random_color(rng, 60, 200));
    scene.poses.push_back(stick_figure(f, bottom));
  }
  for (const auto& f : scene.faces) {
    const PixelRect r = pixel_rect(f, width, height);
    fill_ellipse(scene.image, r, random_color(rng, 150, 240));
  }
  return scene;
}

RasterImage synthetic_face_crop(std::uint64_t identity, int size) {
  std::mt19937_64 rng(identity * 0x2545F4914F6CDD1DULL + 1);
  RasterImage img(size, size, random_color(rng, 20, 80));
  const Rgb skin = random_color(rng, 140, 240);
  const Rgb eye = random_color(rng, 0, 70);
  const Rgb mouth = random_color(rng, 100, 200);
  fill_ellipse(img, {size / 8, size / 16, size - size / 8, size - size / 16}, skin);
  const int e = std::max(1, size / 10);
  const int ey = size * 2 / 5;
  fill_ellipse(img, {size * 3 / 10 - e, ey - e, size * 3 / 10 + e, ey + e}, eye);
  fill_ellipse(img, {size * 7 / 10 - e, ey - e, size * 7 / 10 + e, ey + e}, eye);
  fill_rect(img, {size / 3, size * 7 / 10, size * 2 / 3, size * 7 / 10 + std::max(1, size / 16)}, mouth);
  return img;
}

Layout random_layout(std::mt19937_64& rng, const LayoutSamplerConfig& cfg) {
  if (cfg.min_people < 1 || cfg.max_people < cfg.min_people)
    throw DomainError("invalid people range for layout sampling");
  std::uniform_int_distribution<int> count(cfg.min_people, cfg.max_people);
  const int n = count(rng);
  const double max_side = std::min(1.0, cfg.max_box_area / cfg.min_side);
  std::uniform_real_distribution<double> side(cfg.min_side, max_side);
  Layout l;
  while (static_cast<int>(l.boxes.size()) < n) {
    const double w = side(rng);
    const double h = side(rng);
    if (w * h > cfg.max_box_area) continue;
    std::uniform_real_distribution<double> px(0.0, 1.0 - w), py(0.0, 1.0 - h);
    l.boxes.push_back({px(rng), py(rng), w, h});
  }
  return l;
}

}  // namespace ar2can
