#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "ar2can/geometry.hpp"

namespace ar2can {

using Rgb = std::array<std::uint8_t, 3>;

inline constexpr Rgb kBlank{128, 128, 128};

// Interleaved 8-bit RGB raster, row-major.
class RasterImage {
 public:
  RasterImage() = default;
  RasterImage(int width, int height, Rgb fill = kBlank);
  RasterImage(int width, int height, std::vector<std::uint8_t> pixels);

  int width() const { return width_; }
  int height() const { return height_; }
  bool empty() const { return width_ == 0 || height_ == 0; }
  std::span<const std::uint8_t> bytes() const { return pixels_; }

  std::uint8_t& at(int x, int y, int c) {
    return pixels_[(static_cast<std::size_t>(y) * width_ + x) * 3 + c];
  }
  std::uint8_t at(int x, int y, int c) const {
    return pixels_[(static_cast<std::size_t>(y) * width_ + x) * 3 + c];
  }
  Rgb pixel(int x, int y) const { return {at(x, y, 0), at(x, y, 1), at(x, y, 2)}; }
  void set_pixel(int x, int y, Rgb v);

  friend bool operator==(const RasterImage&, const RasterImage&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> pixels_;
};

// Half-open pixel span [x0, x1) x [y0, y1) of the pixels whose centers lie
// inside a normalized box. Canvas pasting and the blank-outside-box check
// both use this rule.
struct PixelRect {
  int x0 = 0, y0 = 0, x1 = 0, y1 = 0;
  int width() const { return x1 - x0; }
  int height() const { return y1 - y0; }
  bool empty() const { return x1 <= x0 || y1 <= y0; }
  bool contains(int x, int y) const { return x >= x0 && x < x1 && y >= y0 && y < y1; }
};

PixelRect pixel_rect(const BBox& b, int width, int height);

RasterImage crop(const RasterImage& img, const PixelRect& r);
// Crop at a normalized box, clipped to the image bounds.
RasterImage crop_box(const RasterImage& img, const BBox& b);
RasterImage resize_bilinear(const RasterImage& img, int width, int height);

// Binary PPM (P6, maxval 255).
void write_ppm(const std::filesystem::path& path, const RasterImage& img);
RasterImage read_ppm(const std::filesystem::path& path);

}  // namespace ar2can
