#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ar2can/assignment.hpp"
#include "ar2can/geometry.hpp"

namespace ar2can {

inline constexpr double kDetectionThreshold = 0.5;
inline constexpr std::size_t kEmbeddingDim = 512;
inline constexpr std::size_t kNumLandmarks = 5;
inline constexpr std::size_t kNumKeypoints = 17;

// Landmark order: left eye, right eye, nose, left mouth corner, right mouth corner.
enum LandmarkIndex : std::size_t { kLeftEye = 0, kRightEye, kNose, kLeftMouth, kRightMouth };

using Landmarks = std::array<Point, kNumLandmarks>;

struct FaceObservation {
  BBox box;
  double confidence = 1.0;
  Landmarks landmarks{};
  std::optional<std::vector<double>> embedding;
};

struct ReferenceIdentity {
  std::string id;
  std::vector<double> embedding;
};

struct Keypoint {
  Point position;
  bool visible = false;
};

// COCO 17-keypoint order; area is the person's bounding area in normalized units^2.
struct PoseSkeleton {
  std::vector<Keypoint> keypoints;
  double area = 0.0;
};

struct RewardWeights {
  double alpha = 0.2;  // count
  double beta = 0.4;   // quality
  double zeta = 0.3;   // face identity
  double eta = 0.1;    // pose

  void validate() const;

  static RewardWeights artist() { return {0.2, 0.4, 0.3, 0.1}; }
  // Count + quality only; face and pose weights are zero.
  static RewardWeights architect_b() { return {0.5, 0.25, 0.0, 0.0}; }
};

struct RewardComponents {
  double count = 0.0;
  double quality = 0.0;
  double face = 0.0;
  double pose = 0.0;
};

struct RewardBreakdown {
  double count = 0.0;
  double quality = 0.0;
  double face = 0.0;
  double pose = 0.0;
  double composite = 0.0;
};

double count_reward(std::size_t detected, std::size_t target);

// Unclamped cosine; inputs need not be unit length. Throws on zero vectors or
// dimension mismatch.
double cosine_similarity(std::span<const double> a, std::span<const double> b);

// Divides by the L2 norm. Throws DomainError for a zero or non-finite vector.
std::vector<double> normalized(std::span<const double> v);

struct FaceMatchResult {
  double reward = 0.0;
  Assignment assignment;
  std::vector<double> similarities;  // s_i per reference, 0 when unmatched
};

// Hungarian centroid matching between layout boxes and detections, then mean
// cosine identity similarity over the N references (unmatched references
// contribute 0). Every observation must carry an embedding.
FaceMatchResult face_match_reward(const Layout& layout,
                                  std::span<const FaceObservation> observations,
                                  std::span<const ReferenceIdentity> refs);

// Naive baseline: reference i is compared with detection i, no spatial matching.
double index_paired_face_reward(std::span<const FaceObservation> observations,
                                std::span<const ReferenceIdentity> refs);

struct FrontalParams {
  double sigma_roll_deg = 15.0;
  double sigma_yaw = 0.25;
  double threshold = 0.9;
};

struct FrontalTerms {
  double roll_deg = 0.0;
  double asymmetry = 0.0;  // normalized by inter-ocular distance
  double raw = 0.0;        // before thresholding
};

FrontalTerms frontal_terms(const Landmarks& lm, const FrontalParams& params = {});
// Thresholded frontality delta: 0 or in [threshold, 1].
double frontal_score(const Landmarks& lm, const FrontalParams& params = {});
// Mean frontal_score over detections; 0 when nothing was detected.
double frontal_pose_reward(std::span<const FaceObservation> observations,
                           const FrontalParams& params = {});

// Prompts carrying this tag activate the frontal reward during training.
inline constexpr std::string_view kFrontalPromptTag = "Everyone is looking at the camera";
bool prompt_requests_frontal(std::string_view prompt);

// Per-keypoint falloff constants in COCO order. Shoulders are 0.026 and eyes
// 0.107; the other entries are the COCO keypoint-evaluation sigmas.
inline constexpr std::array<double, kNumKeypoints> kKeypointKappa{
    0.026, 0.107, 0.107, 0.035, 0.035, 0.026, 0.026, 0.072, 0.072,
    0.062, 0.062, 0.107, 0.107, 0.087, 0.087, 0.089, 0.089};
// The unmodified COCO evaluation table (nose .026, eyes .025, shoulders .079, ...).
inline constexpr std::array<double, kNumKeypoints> kCocoKappa{
    0.026, 0.025, 0.025, 0.035, 0.035, 0.079, 0.079, 0.072, 0.072,
    0.062, 0.062, 0.107, 0.107, 0.087, 0.087, 0.089, 0.089};

enum CocoKeypoint : std::size_t {
  kKpNose = 0, kKpLeftEye, kKpRightEye, kKpLeftEar, kKpRightEar,
  kKpLeftShoulder, kKpRightShoulder, kKpLeftElbow, kKpRightElbow,
  kKpLeftWrist, kKpRightWrist, kKpLeftHip, kKpRightHip,
  kKpLeftKnee, kKpRightKnee, kKpLeftAnkle, kKpRightAnkle
};

double oks(const PoseSkeleton& reference, const PoseSkeleton& generated,
           std::span<const double, kNumKeypoints> kappa = kKeypointKappa);

struct BodyPoseResult {
  double reward = 0.0;
  Assignment assignment;
};

// Hungarian matching on (1 - OKS), mean OKS over matched pairs. 0 if either side is empty.
BodyPoseResult body_pose_reward(std::span<const PoseSkeleton> reference_persons,
                                std::span<const PoseSkeleton> generated_persons);

RewardBreakdown composite_reward(const RewardComponents& c, const RewardWeights& w);

std::vector<FaceObservation> filter_by_confidence(std::span<const FaceObservation> observations,
                                                  double threshold = kDetectionThreshold);

// Count, face matching and frontal pose for one generated sample, combined
// with an externally scored quality value.
struct ArtistRewardResult {
  RewardBreakdown breakdown;
  Assignment assignment;
};

ArtistRewardResult evaluate_artist_reward(const Layout& layout,
                                          std::span<const FaceObservation> observations,
                                          std::span<const ReferenceIdentity> refs, double quality,
                                          const RewardWeights& weights, bool frontal_active = true);

}  // namespace ar2can
