#include "ar2can/raster.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <string>

#include "ar2can/error.hpp"

namespace ar2can {

RasterImage::RasterImage(int width, int height, Rgb fill) : width_(width), height_(height) {
  if (width <= 0 || height <= 0) throw DomainError("raster dimensions must be positive");
  pixels_.resize(static_cast<std::size_t>(width) * height * 3);
  for (std::size_t k = 0; k < pixels_.size(); k += 3) {
    pixels_[k] = fill[0];
    pixels_[k + 1] = fill[1];
    pixels_[k + 2] = fill[2];
  }
}

RasterImage::RasterImage(int width, int height, std::vector<std::uint8_t> pixels)
    : width_(width), height_(height), pixels_(std::move(pixels)) {
  if (width <= 0 || height <= 0) throw DomainError("raster dimensions must be positive");
  if (pixels_.size() != static_cast<std::size_t>(width) * height * 3)
    throw DomainError("raster buffer length does not match 3 * width * height");
}

void RasterImage::set_pixel(int x, int y, Rgb v) {
  for (int c = 0; c < 3; ++c) at(x, y, c) = v[c];
}

PixelRect pixel_rect(const BBox& b, int width, int height) {
  // Pixel p is inside when x <= p + 0.5 < x + w (in pixel units).
  auto lo = [](double edge) { return static_cast<int>(std::ceil(edge - 0.5)); };
  PixelRect r;
  r.x0 = std::clamp(lo(b.x * width), 0, width);
  r.x1 = std::clamp(lo(b.right() * width), 0, width);
  r.y0 = std::clamp(lo(b.y * height), 0, height);
  r.y1 = std::clamp(lo(b.bottom() * height), 0, height);
  return r;
}

RasterImage crop(const RasterImage& img, const PixelRect& r) {
  PixelRect c{std::clamp(r.x0, 0, img.width()), std::clamp(r.y0, 0, img.height()),
              std::clamp(r.x1, 0, img.width()), std::clamp(r.y1, 0, img.height())};
  if (c.empty()) throw DomainError("crop region is empty after clipping to the image");
  RasterImage out(c.width(), c.height());
  for (int y = 0; y < c.height(); ++y)
    for (int x = 0; x < c.width(); ++x) out.set_pixel(x, y, img.pixel(c.x0 + x, c.y0 + y));
  return out;
}

RasterImage crop_box(const RasterImage& img, const BBox& b) {
  return crop(img, pixel_rect(b, img.width(), img.height()));
}

RasterImage resize_bilinear(const RasterImage& img, int width, int height) {
  if (img.width() == width && img.height() == height) return img;
  RasterImage out(width, height);
  const double sx = static_cast<double>(img.width()) / width;
  const double sy = static_cast<double>(img.height()) / height;
  for (int y = 0; y < height; ++y) {
    const double fy = std::clamp((y + 0.5) * sy - 0.5, 0.0, img.height() - 1.0);
    const int y0 = static_cast<int>(fy);
    const int y1 = std::min(y0 + 1, img.height() - 1);
    const double ty = fy - y0;
    for (int x = 0; x < width; ++x) {
      const double fx = std::clamp((x + 0.5) * sx - 0.5, 0.0, img.width() - 1.0);
      const int x0 = static_cast<int>(fx);
      const int x1 = std::min(x0 + 1, img.width() - 1);
      const double tx = fx - x0;
      for (int c = 0; c < 3; ++c) {
        const double top = img.at(x0, y0, c) * (1 - tx) + img.at(x1, y0, c) * tx;
        const double bot = img.at(x0, y1, c) * (1 - tx) + img.at(x1, y1, c) * tx;
        out.at(x, y, c) = static_cast<std::uint8_t>(std::lround(top * (1 - ty) + bot * ty));
      }
    }
  }
  return out;
}

void write_ppm(const std::filesystem::path& path, const RasterImage& img) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw InputError("cannot open " + path.string() + " for writing");
  os << "P6\n" << img.width() << " " << img.height() << "\n255\n";
  os.write(reinterpret_cast<const char*>(img.bytes().data()),
           static_cast<std::streamsize>(img.bytes().size()));
  if (!os) throw InputError("failed writing " + path.string());
}

namespace {

// Reads the next header token, skipping whitespace and '#' comments.
std::string next_token(std::istream& is) {
  std::string tok;
  while (is) {
    const int ch = is.get();
    if (ch == EOF) break;
    if (ch == '#') {
      std::string ignored;
      std::getline(is, ignored);
      if (!tok.empty()) break;
      continue;
    }
    if (std::isspace(ch)) {
      if (!tok.empty()) break;
      continue;
    }
    tok.push_back(static_cast<char>(ch));
  }
  return tok;
}

}  // namespace

RasterImage read_ppm(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw InputError("cannot open " + path.string());
  if (next_token(is) != "P6") throw InputError(path.string() + " is not a binary PPM (P6)");
  int w = 0, h = 0, maxval = 0;
  try {
    w = std::stoi(next_token(is));
    h = std::stoi(next_token(is));
    maxval = std::stoi(next_token(is));
  } catch (const std::exception&) {
    throw InputError("malformed PPM header in " + path.string());
  }
  if (w <= 0 || h <= 0 || maxval != 255)
    throw InputError("unsupported PPM geometry or maxval in " + path.string());
  std::vector<std::uint8_t> px(static_cast<std::size_t>(w) * h * 3);
  is.read(reinterpret_cast<char*>(px.data()), static_cast<std::streamsize>(px.size()));
  if (is.gcount() != static_cast<std::streamsize>(px.size()))
    throw InputError("truncated PPM payload in " + path.string());
  return RasterImage(w, h, std::move(px));
}

}  // namespace ar2can
