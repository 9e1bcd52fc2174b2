#include "ar2can/oracles.hpp"

#include <random>

namespace ar2can {

namespace {
constexpr std::uint64_t kFnvOffset = 1469598103934665603ULL;
constexpr std::uint64_t kFnvPrime = 1099511628211ULL;
}  // namespace

std::uint64_t fnv1a(std::span<const std::uint8_t> bytes, std::uint64_t seed) {
  std::uint64_t h = kFnvOffset ^ seed;
  for (auto b : bytes) {
    h ^= b;
    h *= kFnvPrime;
  }
  return h;
}

std::uint64_t fnv1a(std::string_view text, std::uint64_t seed) {
  return fnv1a(std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()), seed);
}

std::vector<double> unit_vector_from_seed(std::uint64_t seed, std::size_t dim) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  std::vector<double> v(dim);
  for (auto& x : v) x = normal(rng);
  return normalized(v);
}

std::vector<double> HashEmbedder::embed(const RasterImage& crop) const {
  std::uint64_t h = fnv1a(crop.bytes(), seed_);
  h ^= static_cast<std::uint64_t>(crop.width()) << 32 | static_cast<std::uint32_t>(crop.height());
  return unit_vector_from_seed(h, dim_);
}

double HashQualityOracle::score(const RasterImage& image, std::string_view prompt) const {
  const std::uint64_t h = fnv1a(prompt, fnv1a(image.bytes(), seed_));
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

FaceMatchResult face_match_reward(const RasterImage& generated, const Layout& layout,
                                  std::span<const FaceObservation> observations,
                                  std::span<const ReferenceIdentity> refs,
                                  const Embedder& embedder) {
  std::vector<FaceObservation> embedded(observations.begin(), observations.end());
  for (auto& o : embedded) o.embedding = embedder.embed(crop_box(generated, o.box));
  return face_match_reward(layout, embedded, refs);
}

}  // namespace ar2can
