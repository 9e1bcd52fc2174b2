// Serial reference kernels against their OpenMP counterparts.
// Run: ./ar2can_bench [--benchmark_filter=...]; AR2CAN_THREADS caps threads.

#include <benchmark/benchmark.h>

#include <random>

#include "ar2can/batch.hpp"
#include "ar2can/oracles.hpp"
#include "ar2can/synthetic.hpp"

using namespace ar2can;

namespace {

std::vector<BBox> boxes(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> side(0.05, 0.5), u(0.0, 1.0);
  std::vector<BBox> out;
  for (std::size_t i = 0; i < n; ++i) {
    const double w = side(rng), h = side(rng);
    out.push_back({u(rng) * (1 - w), u(rng) * (1 - h), w, h});
  }
  return out;
}

std::vector<Layout> layouts(std::size_t n) {
  std::mt19937_64 rng(3);
  std::vector<Layout> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(random_layout(rng));
  return out;
}

std::vector<CostMatrix> matrices(std::size_t n) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<CostMatrix> out;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t r = 2 + rng() % 6, c = 2 + rng() % 6;
    std::vector<double> v(r * c);
    for (auto& x : v) x = u(rng);
    out.emplace_back(r, c, v);
  }
  return out;
}

struct GroupFixture {
  Layout layout;
  std::vector<ReferenceIdentity> refs;
  std::vector<batch::SampleInputs> samples;
};

GroupFixture group(std::size_t m) {
  std::mt19937_64 rng(5);
  GroupFixture g;
  g.layout = random_layout(rng);
  for (std::size_t i = 0; i < g.layout.count(); ++i) g.refs.push_back({std::to_string(i), unit_vector_from_seed(i)});
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (std::size_t s = 0; s < m; ++s) {
    batch::SampleInputs in;
    for (const auto& b : g.layout.boxes) {
      FaceObservation f;
      f.box = b;
      f.embedding = unit_vector_from_seed(rng());
      for (auto& p : f.landmarks) p = {u(rng), u(rng)};
      in.observations.push_back(f);
    }
    in.quality = u(rng);
    g.samples.push_back(std::move(in));
  }
  return g;
}

void BM_PairwiseGiouSerial(benchmark::State& st) {
  const auto a = boxes(st.range(0), 1), b = boxes(st.range(0), 2);
  for (auto _ : st) benchmark::DoNotOptimize(batch::pairwise_giou_serial(a, b));
}
void BM_PairwiseGiouParallel(benchmark::State& st) {
  const auto a = boxes(st.range(0), 1), b = boxes(st.range(0), 2);
  for (auto _ : st) benchmark::DoNotOptimize(batch::pairwise_giou(a, b));
}
BENCHMARK(BM_PairwiseGiouSerial)->Arg(64)->Arg(512);
BENCHMARK(BM_PairwiseGiouParallel)->Arg(64)->Arg(512);

void BM_ReductionSerial(benchmark::State& st) {
  const auto l = layouts(st.range(0));
  const PatchGrid g = PatchGrid::for_image(512, 512, 16);
  for (auto _ : st) benchmark::DoNotOptimize(batch::reduction_factors_serial(g, l));
}
void BM_ReductionParallel(benchmark::State& st) {
  const auto l = layouts(st.range(0));
  const PatchGrid g = PatchGrid::for_image(512, 512, 16);
  for (auto _ : st) benchmark::DoNotOptimize(batch::reduction_factors(g, l));
}
BENCHMARK(BM_ReductionSerial)->Arg(200);
BENCHMARK(BM_ReductionParallel)->Arg(200);

void BM_AssignSerial(benchmark::State& st) {
  const auto m = matrices(st.range(0));
  for (auto _ : st) benchmark::DoNotOptimize(batch::solve_assignments_serial(m));
}
void BM_AssignParallel(benchmark::State& st) {
  const auto m = matrices(st.range(0));
  for (auto _ : st) benchmark::DoNotOptimize(batch::solve_assignments(m));
}
BENCHMARK(BM_AssignSerial)->Arg(1000);
BENCHMARK(BM_AssignParallel)->Arg(1000);

void BM_GroupSerial(benchmark::State& st) {
  const auto g = group(st.range(0));
  for (auto _ : st)
    benchmark::DoNotOptimize(batch::evaluate_group_serial(g.layout, g.samples, g.refs, RewardWeights::artist()));
}
void BM_GroupParallel(benchmark::State& st) {
  const auto g = group(st.range(0));
  for (auto _ : st)
    benchmark::DoNotOptimize(batch::evaluate_group(g.layout, g.samples, g.refs, RewardWeights::artist()));
}
BENCHMARK(BM_GroupSerial)->Arg(21)->Arg(256);
BENCHMARK(BM_GroupParallel)->Arg(21)->Arg(256);

}  // namespace

BENCHMARK_MAIN();
