#pragma once

#include <cstdint>
#include <memory>
#include <mutex>
#include <string_view>
#include <vector>

#include "ar2can/raster.hpp"
#include "ar2can/rewards.hpp"

namespace ar2can {

// Stand-ins for the neural scorers. Implementations must be deterministic for
// fixed inputs; wrap non-thread-safe ones in Serialized<> before batch use.

class Detector {
 public:
  virtual ~Detector() = default;
  virtual std::vector<FaceObservation> detect(const RasterImage& image) const = 0;
};

class Embedder {
 public:
  virtual ~Embedder() = default;
  virtual std::vector<double> embed(const RasterImage& crop) const = 0;
};

class QualityOracle {
 public:
  virtual ~QualityOracle() = default;
  virtual double score(const RasterImage& image, std::string_view prompt) const = 0;
};

class PoseEstimator {
 public:
  virtual ~PoseEstimator() = default;
  virtual std::vector<PoseSkeleton> estimate(const RasterImage& image) const = 0;
};

std::uint64_t fnv1a(std::span<const std::uint8_t> bytes, std::uint64_t seed = 0);
std::uint64_t fnv1a(std::string_view text, std::uint64_t seed = 0);

// Deterministic unit vector drawn from a Gaussian seeded by `seed`.
std::vector<double> unit_vector_from_seed(std::uint64_t seed, std::size_t dim = kEmbeddingDim);

// Hash of the crop bytes -> unit vector. Identical crops embed identically;
// any byte change produces an unrelated direction.
class HashEmbedder final : public Embedder {
 public:
  explicit HashEmbedder(std::size_t dim = kEmbeddingDim, std::uint64_t seed = 0)
      : dim_(dim), seed_(seed) {}
  std::vector<double> embed(const RasterImage& crop) const override;

 private:
  std::size_t dim_;
  std::uint64_t seed_;
};

// Hash of (image bytes, prompt) -> score in [0, 1).
class HashQualityOracle final : public QualityOracle {
 public:
  explicit HashQualityOracle(std::uint64_t seed = 0) : seed_(seed) {}
  double score(const RasterImage& image, std::string_view prompt) const override;

 private:
  std::uint64_t seed_;
};

// Always reports the same detections.
class FixedDetector final : public Detector {
 public:
  explicit FixedDetector(std::vector<FaceObservation> faces) : faces_(std::move(faces)) {}
  std::vector<FaceObservation> detect(const RasterImage&) const override { return faces_; }

 private:
  std::vector<FaceObservation> faces_;
};

class FixedPoseEstimator final : public PoseEstimator {
 public:
  explicit FixedPoseEstimator(std::vector<PoseSkeleton> people) : people_(std::move(people)) {}
  std::vector<PoseSkeleton> estimate(const RasterImage&) const override { return people_; }

 private:
  std::vector<PoseSkeleton> people_;
};

// Serializes every call into a wrapped oracle with a mutex.
class SerializedEmbedder final : public Embedder {
 public:
  explicit SerializedEmbedder(std::shared_ptr<const Embedder> inner) : inner_(std::move(inner)) {}
  std::vector<double> embed(const RasterImage& crop) const override {
    std::lock_guard lock(mu_);
    return inner_->embed(crop);
  }

 private:
  std::shared_ptr<const Embedder> inner_;
  mutable std::mutex mu_;
};

class SerializedQualityOracle final : public QualityOracle {
 public:
  explicit SerializedQualityOracle(std::shared_ptr<const QualityOracle> inner)
      : inner_(std::move(inner)) {}
  double score(const RasterImage& image, std::string_view prompt) const override {
    std::lock_guard lock(mu_);
    return inner_->score(image, prompt);
  }

 private:
  std::shared_ptr<const QualityOracle> inner_;
  mutable std::mutex mu_;
};

// Fills in observation embeddings from crops of the generated image at each
// detected box (clipped to the image), then runs face_match_reward.
FaceMatchResult face_match_reward(const RasterImage& generated, const Layout& layout,
                                  std::span<const FaceObservation> observations,
                                  std::span<const ReferenceIdentity> refs,
                                  const Embedder& embedder);

}  // namespace ar2can
