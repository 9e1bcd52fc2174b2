#include <doctest.h>

#include <cstdlib>
#include <random>

#include "ar2can/batch.hpp"
#include "ar2can/error.hpp"
#include "ar2can/oracles.hpp"
#include "ar2can/synthetic.hpp"
#include "oracles.hpp"

using namespace ar2can;

namespace {

struct ThreadLimitGuard {
  explicit ThreadLimitGuard(int n) { batch::set_thread_limit(n); }
  ~ThreadLimitGuard() { batch::set_thread_limit(0); }
};

bool same(const RewardBreakdown& a, const RewardBreakdown& b) {
  return a.count == b.count && a.quality == b.quality && a.face == b.face && a.pose == b.pose &&
         a.composite == b.composite;
}

}  // namespace

TEST_CASE("evaluate_group matches the serial kernel bit for bit") {
  std::mt19937_64 rng(8);
  const Layout layout = random_layout(rng);
  std::vector<ReferenceIdentity> refs;
  for (std::size_t i = 0; i < layout.count(); ++i) refs.push_back({"r" + std::to_string(i), unit_vector_from_seed(i)});
  std::vector<batch::SampleInputs> samples(21);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (auto& s : samples) {
    const std::size_t o = rng() % (layout.count() + 2);
    for (std::size_t k = 0; k < o; ++k) {
      FaceObservation f;
      f.box = oracle::random_box(rng, 0.05, 0.3);
      f.confidence = u(rng);
      f.embedding = unit_vector_from_seed(rng());
      for (auto& p : f.landmarks) p = {u(rng), u(rng)};
      s.observations.push_back(f);
    }
    s.quality = u(rng);
  }
  const auto serial = batch::evaluate_group_serial(layout, samples, refs, RewardWeights::artist());
  for (int threads : {1, 2, 4}) {
    ThreadLimitGuard g(threads);
    const auto par = batch::evaluate_group(layout, samples, refs, RewardWeights::artist());
    REQUIRE(par.size() == serial.size());
    for (std::size_t i = 0; i < par.size(); ++i) CHECK(same(par[i], serial[i]));
  }
}

TEST_CASE("geometry and assignment kernels match their serial twins") {
  std::mt19937_64 rng(5);
  std::vector<BBox> a, b;
  for (int i = 0; i < 40; ++i) a.push_back(oracle::random_box(rng));
  for (int i = 0; i < 33; ++i) b.push_back(oracle::random_box(rng));
  std::vector<CostMatrix> mats;
  std::uniform_real_distribution<double> u(0.0, 5.0);
  for (int t = 0; t < 200; ++t) {
    const std::size_t r = 1 + rng() % 7, c = 1 + rng() % 7;
    std::vector<double> v(r * c);
    for (auto& x : v) x = u(rng);
    mats.emplace_back(r, c, v);
  }
  std::vector<Layout> layouts;
  for (int t = 0; t < 100; ++t) layouts.push_back(random_layout(rng));
  const PatchGrid grid = PatchGrid::for_image(512, 512, 16);

  for (int threads : {1, 3}) {
    ThreadLimitGuard g(threads);
    CHECK(batch::pairwise_giou(a, b) == batch::pairwise_giou_serial(a, b));
    CHECK(batch::reduction_factors(grid, layouts) == batch::reduction_factors_serial(grid, layouts));
    const auto p = batch::solve_assignments(mats);
    const auto s = batch::solve_assignments_serial(mats);
    REQUIRE(p.size() == s.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
      CHECK(p[i].pairs == s[i].pairs);
      CHECK(p[i].total_cost == s[i].total_cost);
    }
  }
  const auto m = batch::pairwise_giou_serial(a, b);
  CHECK(m[3 * b.size() + 7] == giou(a[3], b[7]));
}

TEST_CASE("parallel kernels rethrow the first failing item") {
  std::vector<Layout> layouts{Layout{{{0.1, 0.1, 0.2, 0.2}}}, Layout{{{0.9, 0.1, 0.2, 0.2}}}, Layout{}};
  const PatchGrid grid = PatchGrid::for_image(64, 64, 16);
  ThreadLimitGuard g(2);
  CHECK_THROWS_AS(batch::reduction_factors(grid, layouts), DomainError);
  CHECK_THROWS_AS(batch::reduction_factors_serial(grid, layouts), DomainError);
}

TEST_CASE("thread limit override and environment") {
  {
    ThreadLimitGuard g(3);
    CHECK(batch::thread_limit() == 3);
  }
  ::setenv("AR2CAN_THREADS", "2", 1);
  CHECK(batch::thread_limit() == 2);
  ::setenv("AR2CAN_THREADS", "junk", 1);
  CHECK(batch::thread_limit() >= 1);
  ::unsetenv("AR2CAN_THREADS");
  CHECK(batch::thread_limit() >= 1);
}
