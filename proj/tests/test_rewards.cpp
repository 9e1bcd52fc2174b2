#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "ar2can/error.hpp"
#include "ar2can/oracles.hpp"
#include "ar2can/rewards.hpp"
#include "oracles.hpp"

using namespace ar2can;

namespace {

std::vector<double> basis(std::size_t k, std::size_t dim = kEmbeddingDim) {
  std::vector<double> v(dim, 0.0);
  v[k] = 1.0;
  return v;
}

// Unit vector at cosine `c` from basis(0), inside the (e0, e1) plane.
std::vector<double> at_cosine(double c) {
  std::vector<double> v(kEmbeddingDim, 0.0);
  v[0] = c;
  v[1] = std::sqrt(1.0 - c * c);
  return v;
}

FaceObservation face(const BBox& b, std::vector<double> emb) {
  FaceObservation o;
  o.box = b;
  o.confidence = 0.99;
  o.embedding = std::move(emb);
  return o;
}

// Eyes one unit apart along a line rolled by `roll_deg`, nose placed so the
// eye-nose distance difference equals `asym` (found by bisection).
Landmarks landmarks_for(double roll_deg, double asym) {
  auto diff = [](double u) {
    const double v = 0.6;
    return std::hypot(u, v) - std::hypot(1.0 - u, v);
  };
  double lo = 0.0, hi = 1.0;
  for (int k = 0; k < 200; ++k) {
    const double mid = (lo + hi) / 2;
    (diff(mid) < asym ? lo : hi) = mid;
  }
  const double u = (lo + hi) / 2, v = 0.6;
  const double r = roll_deg * std::numbers::pi / 180.0;
  auto place = [&](double a, double b) {
    return Point{0.4 + 0.1 * (a * std::cos(r) - b * std::sin(r)),
                 0.4 + 0.1 * (a * std::sin(r) + b * std::cos(r))};
  };
  return {place(0, 0), place(1, 0), place(u, v), place(0.2, 1.0), place(0.8, 1.0)};
}

PoseSkeleton skeleton_at(std::size_t keypoint, Point p, double area) {
  PoseSkeleton s;
  s.area = area;
  s.keypoints.assign(kNumKeypoints, Keypoint{{0.5, 0.5}, false});
  s.keypoints[keypoint] = {p, true};
  return s;
}

// Distance giving OKS `s` on a single keypoint with falloff kappa and area a.
double distance_for(double s, double kappa, double area) {
  return std::sqrt(-2.0 * area * kappa * kappa * std::log(s));
}

}  // namespace

TEST_CASE("count_reward") {
  CHECK(count_reward(3, 3) == 1.0);
  CHECK(count_reward(2, 3) == 0.0);
  CHECK(count_reward(0, 1) == 0.0);
}

TEST_CASE("face_match_reward perfect two-person match") {
  const Layout l{{{0.1, 0.2, 0.2, 0.2}, {0.6, 0.2, 0.2, 0.2}}};
  const std::vector<ReferenceIdentity> refs{{"a", basis(0)}, {"b", basis(1)}};
  const std::vector<FaceObservation> obs{face(l.boxes[0], basis(0)), face(l.boxes[1], basis(1))};
  CHECK(face_match_reward(l, obs, refs).reward == 1.0);
}

TEST_CASE("face_match_reward zero-similarity rule for missing faces") {
  const Layout l{{{0.05, 0.2, 0.2, 0.2}, {0.4, 0.2, 0.2, 0.2}, {0.75, 0.2, 0.2, 0.2}}};
  const std::vector<ReferenceIdentity> refs{{"a", basis(0)}, {"b", basis(1)}, {"c", basis(2)}};
  const std::vector<FaceObservation> obs{face(l.boxes[0], basis(0)), face(l.boxes[1], basis(1))};
  const FaceMatchResult r = face_match_reward(l, obs, refs);
  CHECK(r.reward == 2.0 / 3.0);
  CHECK(r.similarities == std::vector<double>{1.0, 1.0, 0.0});
  CHECK(r.assignment.unmatched_rows == std::vector<std::size_t>{2});
}

TEST_CASE("face_match_reward: crossed layout needs spatial matching") {
  // A is planned on the left, B on the right; the detector lists the right face first.
  const Layout l{{{0.1, 0.3, 0.2, 0.2}, {0.7, 0.3, 0.2, 0.2}}};
  const auto a = basis(0);
  const auto b = at_cosine(0.2);
  const std::vector<ReferenceIdentity> refs{{"A", a}, {"B", b}};
  const std::vector<FaceObservation> obs{face({0.68, 0.32, 0.2, 0.2}, b), face({0.12, 0.28, 0.2, 0.2}, a)};

  const FaceMatchResult r = face_match_reward(l, obs, refs);
  CHECK(r.reward == doctest::Approx(1.0).epsilon(1e-15));
  const double naive = index_paired_face_reward(obs, refs);
  CHECK(naive == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(naive < 1.0);

  std::vector<Point> planned{centroid(l.boxes[0]), centroid(l.boxes[1])};
  std::vector<Point> detected{centroid(obs[0].box), centroid(obs[1].box)};
  const auto brute = oracle::brute_force_assignment(centroid_cost_matrix(planned, detected));
  CHECK(r.assignment.pairs == brute.pairs);
  CHECK(r.assignment.pairs == decltype(r.assignment.pairs){{0, 1}, {1, 0}});
}

TEST_CASE("face_match_reward errors and empty detections") {
  const Layout l{{{0.1, 0.2, 0.2, 0.2}}};
  const std::vector<ReferenceIdentity> refs{{"a", basis(0)}};
  FaceObservation no_emb;
  no_emb.box = l.boxes[0];
  CHECK_THROWS_AS(face_match_reward(l, std::vector{no_emb}, refs), DomainError);
  CHECK_THROWS_AS(face_match_reward(Layout{}, {}, {}), DomainError);
  const std::vector<ReferenceIdentity> two{{"a", basis(0)}, {"b", basis(1)}};
  CHECK_THROWS_AS(face_match_reward(l, {}, two), DomainError);
  const FaceMatchResult none = face_match_reward(l, {}, refs);
  CHECK(none.reward == 0.0);
  CHECK(none.assignment.unmatched_rows == std::vector<std::size_t>{0});
}

TEST_CASE("face_match_reward properties") {
  std::mt19937_64 rng(21);
  const Layout l{{{0.05, 0.1, 0.15, 0.15}, {0.35, 0.1, 0.15, 0.15}, {0.65, 0.5, 0.15, 0.15}}};
  std::vector<ReferenceIdentity> refs;
  for (int i = 0; i < 3; ++i) refs.push_back({std::to_string(i), unit_vector_from_seed(100 + i)});

  SUBCASE("monotone in rotation away from the reference") {
    double prev = 2.0;
    for (int step = 0; step <= 20; ++step) {
      const double theta = std::numbers::pi * step / 20.0;
      std::vector<FaceObservation> obs;
      for (int i = 0; i < 3; ++i) {
        // Rotate within the plane of ref i and a fixed orthogonal direction.
        auto ortho = unit_vector_from_seed(900 + i);
        const double d = cosine_similarity(ortho, refs[i].embedding);
        for (std::size_t k = 0; k < ortho.size(); ++k) ortho[k] -= d * refs[i].embedding[k];
        ortho = normalized(ortho);
        std::vector<double> e(kEmbeddingDim);
        for (std::size_t k = 0; k < e.size(); ++k)
          e[k] = std::cos(theta) * refs[i].embedding[k] + std::sin(theta) * ortho[k];
        obs.push_back(face(l.boxes[i], e));
      }
      const double r = face_match_reward(l, obs, refs).reward;
      CHECK(r <= prev + 1e-12);
      CHECK(r >= -1.0 - 1e-12);
      CHECK(r <= 1.0 + 1e-12);
      prev = r;
    }
    CHECK(prev == doctest::Approx(-1.0).epsilon(1e-9));
  }

  SUBCASE("embedding scale does not matter") {
    for (int t = 0; t < 50; ++t) {
      std::vector<FaceObservation> obs, scaled;
      for (int i = 0; i < 3; ++i) {
        auto e = unit_vector_from_seed(rng());
        obs.push_back(face(l.boxes[i], e));
        for (auto& x : e) x *= 3.7;
        scaled.push_back(face(l.boxes[i], e));
      }
      CHECK(face_match_reward(l, obs, refs).reward ==
            doctest::Approx(face_match_reward(l, scaled, refs).reward).epsilon(1e-12));
    }
  }

  SUBCASE("coincident centroids reduce to index pairing") {
    for (int t = 0; t < 50; ++t) {
      std::vector<FaceObservation> obs;
      for (int i = 0; i < 3; ++i) obs.push_back(face(l.boxes[i], unit_vector_from_seed(rng())));
      const auto r = face_match_reward(l, obs, refs);
      CHECK(r.assignment.pairs == decltype(r.assignment.pairs){{0, 0}, {1, 1}, {2, 2}});
      CHECK(r.reward == doctest::Approx(index_paired_face_reward(obs, refs)).epsilon(1e-14));
    }
  }

  SUBCASE("count mismatch keeps the reward below 1") {
    std::vector<FaceObservation> obs;
    for (int i = 0; i < 3; ++i) obs.push_back(face(l.boxes[i], refs[i].embedding));
    obs.push_back(face({0.4, 0.7, 0.1, 0.1}, refs[0].embedding));
    CHECK(face_match_reward(l, obs, refs).reward == doctest::Approx(1.0).epsilon(1e-12));
    obs.pop_back();
    obs.pop_back();
    CHECK(face_match_reward(l, obs, refs).reward < 1.0);
  }
}

TEST_CASE("cosine similarity is unclamped and rejects zero vectors") {
  const std::vector<double> a{1, 0}, b{-1, 0}, z{0, 0};
  CHECK(cosine_similarity(a, b) == -1.0);
  CHECK_THROWS_AS(cosine_similarity(a, z), DomainError);
  CHECK_THROWS_AS(cosine_similarity(a, std::vector<double>{1, 0, 0}), DomainError);
}

TEST_CASE("face_match_reward via embedder crops the detected boxes") {
  RasterImage generated(64, 64, Rgb{10, 20, 30});
  const Layout l{{{0.1, 0.1, 0.25, 0.25}, {0.6, 0.1, 0.25, 0.25}}};
  std::vector<FaceObservation> obs(2);
  obs[0].box = {0.6, 0.1, 0.25, 0.25};
  obs[1].box = {0.1, 0.1, 0.25, 0.25};
  // Paint a distinct pattern into each face region.
  for (int y = 6; y < 22; ++y)
    for (int x = 6; x < 22; ++x) generated.set_pixel(x, y, Rgb{200, static_cast<std::uint8_t>(x), 0});
  for (int y = 6; y < 22; ++y)
    for (int x = 38; x < 54; ++x) generated.set_pixel(x, y, Rgb{0, static_cast<std::uint8_t>(y), 250});
  const HashEmbedder embedder;
  const std::vector<ReferenceIdentity> refs{
      {"left", embedder.embed(crop_box(generated, l.boxes[0]))},
      {"right", embedder.embed(crop_box(generated, l.boxes[1]))}};
  CHECK(face_match_reward(generated, l, obs, refs, embedder).reward == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("frontal_score examples") {
  const Landmarks level = landmarks_for(0.0, 0.0);
  CHECK(frontal_score(level) == doctest::Approx(1.0).epsilon(1e-12));

  const FrontalTerms rolled = frontal_terms(landmarks_for(15.0, 0.0));
  CHECK(rolled.roll_deg == doctest::Approx(15.0).epsilon(1e-9));
  CHECK(rolled.raw == doctest::Approx(std::exp(-0.5)).epsilon(1e-9));
  CHECK(frontal_score(landmarks_for(15.0, 0.0)) == 0.0);

  const FrontalTerms mild = frontal_terms(landmarks_for(5.0, 0.05));
  CHECK(mild.roll_deg == doctest::Approx(5.0).epsilon(1e-9));
  CHECK(mild.asymmetry == doctest::Approx(0.05).epsilon(1e-9));
  // exp(-25/450) * exp(-0.0025/0.125), evaluated independently.
  CHECK(frontal_score(landmarks_for(5.0, 0.05)) == doctest::Approx(0.9272282164243743).epsilon(1e-9));

  Landmarks bad = level;
  bad[kRightEye] = bad[kLeftEye];
  CHECK_THROWS_AS(frontal_score(bad), DomainError);
}

TEST_CASE("frontal_pose_reward") {
  auto obs_with = [](const Landmarks& lm) {
    FaceObservation o;
    o.box = {0.1, 0.1, 0.2, 0.2};
    o.landmarks = lm;
    return o;
  };
  CHECK(frontal_pose_reward({}) == 0.0);
  const std::vector all{obs_with(landmarks_for(0, 0)), obs_with(landmarks_for(0, 0))};
  CHECK(frontal_pose_reward(all) == doctest::Approx(1.0).epsilon(1e-12));
  const std::vector half{obs_with(landmarks_for(0, 0)), obs_with(landmarks_for(15, 0))};
  CHECK(frontal_pose_reward(half) == doctest::Approx(0.5).epsilon(1e-12));
  // Roll angles that produce delta = 0.95 and 0.92 exactly.
  const double r95 = std::sqrt(-450.0 * std::log(0.95));
  const double r92 = std::sqrt(-450.0 * std::log(0.92));
  const std::vector three{obs_with(landmarks_for(r95, 0)), obs_with(landmarks_for(r92, 0)),
                          obs_with(landmarks_for(40, 0.3))};
  CHECK(frontal_pose_reward(three) == doctest::Approx(0.6233333333333334).epsilon(1e-9));
}

TEST_CASE("frontal_score output is 0 or in [0.9, 1]") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 10000; ++t) {
    Landmarks lm;
    for (auto& p : lm) p = {u(rng), u(rng)};
    if (lm[kLeftEye] == lm[kRightEye]) continue;
    const double d = frontal_score(lm);
    CHECK((d == 0.0 || (d >= 0.9 && d <= 1.0)));
  }
}

TEST_CASE("prompt tag activates frontal reward") {
  CHECK(prompt_requests_frontal("Three friends at a cafe. Everyone is looking at the camera"));
  CHECK_FALSE(prompt_requests_frontal("Three friends at a cafe"));
}

TEST_CASE("oks examples") {
  CHECK(kKeypointKappa[kKpLeftShoulder] == 0.026);
  CHECK(kKeypointKappa[kKpRightShoulder] == 0.026);
  CHECK(kKeypointKappa[kKpLeftEye] == 0.107);
  CHECK(kKeypointKappa[kKpRightEye] == 0.107);

  PoseSkeleton full;
  full.area = 0.05;
  for (std::size_t k = 0; k < kNumKeypoints; ++k) full.keypoints.push_back({{0.3 + 0.01 * k, 0.2 + 0.02 * k}, true});
  CHECK(oks(full, full) == 1.0);

  const double area = 0.04;
  const double kappa = kKeypointKappa[kKpLeftShoulder];
  const double d = std::sqrt(2.0 * area * kappa * kappa);
  const PoseSkeleton ref = skeleton_at(kKpLeftShoulder, {0.5, 0.5}, area);
  const PoseSkeleton gen = skeleton_at(kKpLeftShoulder, {0.5 + d, 0.5}, area);
  CHECK(std::abs(oks(ref, gen) - std::exp(-1.0)) < 1e-12);

  PoseSkeleton ref2 = skeleton_at(kKpNose, {0.5, 0.5}, area);
  ref2.keypoints[kKpLeftHip] = {{0.5, 0.8}, true};
  PoseSkeleton gen2 = ref2;
  const double kh = kKeypointKappa[kKpLeftHip];
  gen2.keypoints[kKpLeftHip].position.cy += std::sqrt(2.0 * area * kh * kh * std::log(2.0));
  CHECK(oks(ref2, gen2) == doctest::Approx(0.75).epsilon(1e-12));

  PoseSkeleton blind = ref;
  blind.keypoints[kKpLeftShoulder].visible = false;
  CHECK_THROWS_AS(oks(blind, gen), DomainError);
}

TEST_CASE("oks depends only on distance and decreases with it") {
  const double area = 0.03;
  const PoseSkeleton ref = skeleton_at(kKpLeftElbow, {0.5, 0.5}, area);
  double prev = 1.1;
  for (int s = 0; s <= 30; ++s) {
    const double dist = 0.002 * s;
    const double along_x = oks(ref, skeleton_at(kKpLeftElbow, {0.5 + dist, 0.5}, area));
    const double diag = oks(ref, skeleton_at(kKpLeftElbow, {0.5 - dist / std::sqrt(2.0), 0.5 + dist / std::sqrt(2.0)}, area));
    CHECK(along_x == doctest::Approx(diag).epsilon(1e-12));
    CHECK(along_x < prev);
    prev = along_x;
  }
}

TEST_CASE("body_pose_reward picks the OKS-maximizing pairing") {
  const double area = 0.02;
  const double kappa = kKeypointKappa[kKpNose];
  const double scale = kappa * std::sqrt(2.0 * area);
  const double sep = 1.2 * scale;
  // Refs at (0,0) and (sep,0). G1 sits at OKS 0.3 from R1 and 0.8 from R2;
  // G2 at 0.9 from R1 and 0.2 from R2, placed by circle intersection.
  auto place = [&](double s1, double s2) {
    const double d1 = distance_for(s1, kappa, area), d2 = distance_for(s2, kappa, area);
    const double x = (d1 * d1 - d2 * d2 + sep * sep) / (2 * sep);
    const double y = std::sqrt(d1 * d1 - x * x);
    return Point{0.3 + x, 0.5 + y};
  };
  const std::vector refs{skeleton_at(kKpNose, {0.3, 0.5}, area), skeleton_at(kKpNose, {0.3 + sep, 0.5}, area)};
  const std::vector gens{skeleton_at(kKpNose, place(0.3, 0.8), area), skeleton_at(kKpNose, place(0.9, 0.2), area)};
  CHECK(oks(refs[0], gens[0]) == doctest::Approx(0.3).epsilon(1e-9));
  CHECK(oks(refs[1], gens[0]) == doctest::Approx(0.8).epsilon(1e-9));
  CHECK(oks(refs[0], gens[1]) == doctest::Approx(0.9).epsilon(1e-9));
  CHECK(oks(refs[1], gens[1]) == doctest::Approx(0.2).epsilon(1e-9));

  const BodyPoseResult r = body_pose_reward(refs, gens);
  CHECK(r.reward == doctest::Approx(0.85).epsilon(1e-9));
  CHECK(r.assignment.pairs == decltype(r.assignment.pairs){{0, 1}, {1, 0}});

  CHECK(body_pose_reward({}, gens).reward == 0.0);
  CHECK(body_pose_reward(refs, {}).reward == 0.0);
  CHECK(body_pose_reward(std::vector{refs[0]}, std::vector{refs[0]}).reward == 1.0);
}

TEST_CASE("body_pose_reward averages matched pairs only") {
  const double area = 0.02;
  const double kappa = kKeypointKappa[kKpNose];
  const std::vector refs{skeleton_at(kKpNose, {0.1, 0.5}, area), skeleton_at(kKpNose, {0.5, 0.5}, area),
                         skeleton_at(kKpNose, {0.9, 0.5}, area)};
  const std::vector gens{skeleton_at(kKpNose, {0.1, 0.5}, area),
                         skeleton_at(kKpNose, {0.5 + distance_for(0.6, kappa, area), 0.5}, area)};
  CHECK(body_pose_reward(refs, gens).reward == doctest::Approx(0.8).epsilon(1e-9));
}

TEST_CASE("composite_reward") {
  const RewardBreakdown b = composite_reward({1, 0.5, 0.8, 1.0}, RewardWeights::artist());
  CHECK(b.composite == doctest::Approx(0.74).epsilon(1e-12));
  CHECK(composite_reward({}, RewardWeights::artist()).composite == 0.0);
  CHECK(composite_reward({1, 0.6, 0.9, 0.3}, RewardWeights::architect_b()).composite ==
        doctest::Approx(0.65).epsilon(1e-12));
  CHECK_THROWS_AS(composite_reward({}, RewardWeights{0, 0, 0, 0}), DomainError);
  CHECK_THROWS_AS(composite_reward({}, RewardWeights{-0.1, 1, 0, 0}), DomainError);
}

TEST_CASE("composite_reward is linear in each component") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-1.0, 1.0), w(0.0, 1.0);
  for (int t = 0; t < 1000; ++t) {
    const RewardWeights wt{w(rng), w(rng), w(rng), w(rng)};
    const RewardComponents c{u(rng), u(rng), u(rng), u(rng)};
    const double base = composite_reward(c, wt).composite;
    CHECK(base == wt.alpha * c.count + wt.beta * c.quality + wt.zeta * c.face + wt.eta * c.pose);
    RewardComponents bumped = c;
    bumped.face += 1.0;
    CHECK(composite_reward(bumped, wt).composite - base == doctest::Approx(wt.zeta).epsilon(1e-9));
  }
}

TEST_CASE("evaluate_artist_reward composes the four terms") {
  const Layout l{{{0.1, 0.2, 0.2, 0.2}, {0.6, 0.2, 0.2, 0.2}}};
  const std::vector<ReferenceIdentity> refs{{"a", basis(0)}, {"b", basis(1)}};
  std::vector<FaceObservation> obs{face(l.boxes[0], basis(0)), face(l.boxes[1], basis(1))};
  for (auto& o : obs) o.landmarks = landmarks_for(0, 0);
  const auto r = evaluate_artist_reward(l, obs, refs, 0.5, RewardWeights::artist());
  CHECK(r.breakdown.count == 1.0);
  CHECK(r.breakdown.face == 1.0);
  CHECK(r.breakdown.pose == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(r.breakdown.composite == doctest::Approx(0.2 + 0.4 * 0.5 + 0.3 + 0.1).epsilon(1e-12));

  const auto empty = evaluate_artist_reward(l, {}, refs, 0.5, RewardWeights::artist());
  CHECK(empty.breakdown.count == 0.0);
  CHECK(empty.breakdown.face == 0.0);
  CHECK(empty.breakdown.pose == 0.0);
}

TEST_CASE("filter_by_confidence drops low-confidence detections") {
  std::vector<FaceObservation> obs(3);
  obs[0].confidence = 0.49;
  obs[1].confidence = 0.5;
  obs[2].confidence = 0.9;
  CHECK(filter_by_confidence(obs).size() == 2);
}
