#include "ar2can/rewards.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "ar2can/error.hpp"

namespace ar2can {

void RewardWeights::validate() const {
  for (double w : {alpha, beta, zeta, eta})
    if (!std::isfinite(w) || w < 0.0) throw DomainError("reward weights must be finite and >= 0");
  if (alpha == 0.0 && beta == 0.0 && zeta == 0.0 && eta == 0.0)
    throw DomainError("at least one reward weight must be positive");
}

double count_reward(std::size_t detected, std::size_t target) {
  return detected == target ? 1.0 : 0.0;
}

double cosine_similarity(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size())
    throw DomainError("embedding dimension mismatch (" + std::to_string(a.size()) + " vs " +
                      std::to_string(b.size()) + ")");
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    dot += a[k] * b[k];
    na += a[k] * a[k];
    nb += b[k] * b[k];
  }
  if (!(na > 0.0) || !(nb > 0.0)) throw DomainError("cosine similarity of a zero vector");
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

std::vector<double> normalized(std::span<const double> v) {
  double n2 = 0.0;
  for (double x : v) n2 += x * x;
  if (!(n2 > 0.0) || !std::isfinite(n2)) throw DomainError("cannot normalize a zero or non-finite vector");
  const double n = std::sqrt(n2);
  std::vector<double> out(v.begin(), v.end());
  for (double& x : out) x /= n;
  return out;
}

FaceMatchResult face_match_reward(const Layout& layout,
                                  std::span<const FaceObservation> observations,
                                  std::span<const ReferenceIdentity> refs) {
  const std::size_t n = layout.count();
  if (n == 0) throw DomainError("face matching needs at least one planned face");
  if (refs.size() != n)
    throw DomainError("face matching needs one reference per layout box (" +
                      std::to_string(refs.size()) + " refs, " + std::to_string(n) + " boxes)");
  for (std::size_t j = 0; j < observations.size(); ++j)
    if (!observations[j].embedding)
      throw DomainError("detection " + std::to_string(j) + " has no identity embedding");

  FaceMatchResult out;
  out.similarities.assign(n, 0.0);
  if (observations.empty()) {
    for (std::size_t i = 0; i < n; ++i) out.assignment.unmatched_rows.push_back(i);
    return out;
  }

  std::vector<Point> planned, detected;
  planned.reserve(n);
  detected.reserve(observations.size());
  for (const auto& b : layout.boxes) planned.push_back(centroid(b));
  for (const auto& o : observations) detected.push_back(centroid(o.box));
  out.assignment = hungarian(centroid_cost_matrix(planned, detected));

  for (const auto& [i, j] : out.assignment.pairs)
    out.similarities[i] = cosine_similarity(refs[i].embedding, *observations[j].embedding);
  double total = 0.0;
  for (double s : out.similarities) total += s;
  out.reward = total / static_cast<double>(n);
  return out;
}

double index_paired_face_reward(std::span<const FaceObservation> observations,
                                std::span<const ReferenceIdentity> refs) {
  if (refs.empty()) throw DomainError("face matching needs at least one reference");
  double total = 0.0;
  for (std::size_t i = 0; i < refs.size() && i < observations.size(); ++i) {
    if (!observations[i].embedding)
      throw DomainError("detection " + std::to_string(i) + " has no identity embedding");
    total += cosine_similarity(refs[i].embedding, *observations[i].embedding);
  }
  return total / static_cast<double>(refs.size());
}

FrontalTerms frontal_terms(const Landmarks& lm, const FrontalParams& params) {
  const Point& le = lm[kLeftEye];
  const Point& re = lm[kRightEye];
  const Point& nose = lm[kNose];
  const double dx = re.cx - le.cx;
  const double dy = re.cy - le.cy;
  const double inter_ocular = std::hypot(dx, dy);
  if (!(inter_ocular > 0.0)) throw DomainError("eye landmarks coincide");

  FrontalTerms t;
  t.roll_deg = std::abs(std::atan2(dy, dx)) * 180.0 / std::numbers::pi;
  t.asymmetry = std::abs(euclidean(le, nose) - euclidean(re, nose)) / inter_ocular;
  const double sr = params.sigma_roll_deg;
  const double sy = params.sigma_yaw;
  t.raw = std::exp(-(t.roll_deg * t.roll_deg) / (2.0 * sr * sr)) *
          std::exp(-(t.asymmetry * t.asymmetry) / (2.0 * sy * sy));
  return t;
}

double frontal_score(const Landmarks& lm, const FrontalParams& params) {
  const double raw = frontal_terms(lm, params).raw;
  return raw < params.threshold ? 0.0 : raw;
}

double frontal_pose_reward(std::span<const FaceObservation> observations,
                           const FrontalParams& params) {
  if (observations.empty()) return 0.0;
  double total = 0.0;
  for (const auto& o : observations) total += frontal_score(o.landmarks, params);
  return total / static_cast<double>(observations.size());
}

bool prompt_requests_frontal(std::string_view prompt) {
  return prompt.find(kFrontalPromptTag) != std::string_view::npos;
}

double oks(const PoseSkeleton& reference, const PoseSkeleton& generated,
           std::span<const double, kNumKeypoints> kappa) {
  if (reference.keypoints.size() != kNumKeypoints || generated.keypoints.size() != kNumKeypoints)
    throw DomainError("skeletons must carry 17 COCO-ordered keypoints");
  if (!(reference.area > 0.0)) throw DomainError("reference skeleton area must be positive");
  double total = 0.0;
  std::size_t visible = 0;
  for (std::size_t k = 0; k < kNumKeypoints; ++k) {
    if (!reference.keypoints[k].visible) continue;
    const double d = euclidean(reference.keypoints[k].position, generated.keypoints[k].position);
    total += std::exp(-(d * d) / (2.0 * reference.area * kappa[k] * kappa[k]));
    ++visible;
  }
  if (visible == 0) throw DomainError("reference skeleton has no visible keypoints");
  return total / static_cast<double>(visible);
}

BodyPoseResult body_pose_reward(std::span<const PoseSkeleton> reference_persons,
                                std::span<const PoseSkeleton> generated_persons) {
  BodyPoseResult out;
  if (reference_persons.empty() || generated_persons.empty()) return out;
  const std::size_t n = reference_persons.size();
  const std::size_t m = generated_persons.size();
  std::vector<double> similarity(n * m);
  CostMatrix cost(n, m);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j) {
      similarity[i * m + j] = oks(reference_persons[i], generated_persons[j]);
      cost.at(i, j) = 1.0 - similarity[i * m + j];
    }
  out.assignment = hungarian(cost);
  double total = 0.0;
  for (const auto& [i, j] : out.assignment.pairs) total += similarity[i * m + j];
  out.reward = total / static_cast<double>(out.assignment.pairs.size());
  return out;
}

RewardBreakdown composite_reward(const RewardComponents& c, const RewardWeights& w) {
  w.validate();
  RewardBreakdown b;
  b.count = c.count;
  b.quality = c.quality;
  b.face = c.face;
  b.pose = c.pose;
  b.composite = w.alpha * c.count + w.beta * c.quality + w.zeta * c.face + w.eta * c.pose;
  return b;
}

std::vector<FaceObservation> filter_by_confidence(std::span<const FaceObservation> observations,
                                                  double threshold) {
  std::vector<FaceObservation> kept;
  for (const auto& o : observations)
    if (o.confidence >= threshold) kept.push_back(o);
  return kept;
}

ArtistRewardResult evaluate_artist_reward(const Layout& layout,
                                          std::span<const FaceObservation> observations,
                                          std::span<const ReferenceIdentity> refs, double quality,
                                          const RewardWeights& weights, bool frontal_active) {
  RewardComponents c;
  c.count = count_reward(observations.size(), layout.count());
  c.quality = quality;
  FaceMatchResult face = face_match_reward(layout, observations, refs);
  c.face = face.reward;
  c.pose = frontal_active ? frontal_pose_reward(observations) : 0.0;
  return {composite_reward(c, weights), std::move(face.assignment)};
}

}  // namespace ar2can
