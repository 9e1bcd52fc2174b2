#include "ar2can/batch.hpp"

#include <atomic>
#include <cstdlib>
#include <exception>
#include <string>

#include <omp.h>

namespace ar2can::batch {

namespace {

std::atomic<int> g_override{0};

// Runs body(i) for i in [0, n) across threads. Exceptions are captured per
// index and the lowest-index one is rethrown after the parallel region.
template <typename Body>
void parallel_for(std::size_t n, Body&& body) {
  std::vector<std::exception_ptr> errors(n);
  const long count = static_cast<long>(n);
#pragma omp parallel for schedule(dynamic, 1) num_threads(thread_limit())
  for (long i = 0; i < count; ++i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace

int thread_limit() {
  if (const int o = g_override.load(); o > 0) return o;
  if (const char* env = std::getenv("AR2CAN_THREADS")) {
    try {
      const int v = std::stoi(env);
      if (v > 0) return v;
    } catch (const std::exception&) {
    }
  }
  return omp_get_max_threads();
}

void set_thread_limit(int threads) { g_override.store(threads > 0 ? threads : 0); }

std::vector<RewardBreakdown> evaluate_group(const Layout& layout, std::span<const SampleInputs> samples,
                                            std::span<const ReferenceIdentity> refs,
                                            const RewardWeights& weights, bool frontal_active) {
  std::vector<RewardBreakdown> out(samples.size());
  parallel_for(samples.size(), [&](std::size_t i) {
    out[i] = evaluate_artist_reward(layout, samples[i].observations, refs, samples[i].quality, weights,
                                    frontal_active)
                 .breakdown;
  });
  return out;
}

std::vector<RewardBreakdown> evaluate_group_serial(const Layout& layout,
                                                   std::span<const SampleInputs> samples,
                                                   std::span<const ReferenceIdentity> refs,
                                                   const RewardWeights& weights, bool frontal_active) {
  std::vector<RewardBreakdown> out;
  out.reserve(samples.size());
  for (const auto& s : samples)
    out.push_back(
        evaluate_artist_reward(layout, s.observations, refs, s.quality, weights, frontal_active).breakdown);
  return out;
}

std::vector<double> reduction_factors(const PatchGrid& grid, std::span<const Layout> layouts) {
  std::vector<double> out(layouts.size());
  parallel_for(layouts.size(), [&](std::size_t i) { out[i] = reduction_factor(grid, layouts[i]); });
  return out;
}

std::vector<double> reduction_factors_serial(const PatchGrid& grid, std::span<const Layout> layouts) {
  std::vector<double> out;
  out.reserve(layouts.size());
  for (const auto& l : layouts) out.push_back(reduction_factor(grid, l));
  return out;
}

std::vector<double> pairwise_giou(std::span<const BBox> a, std::span<const BBox> b) {
  std::vector<double> out(a.size() * b.size());
  parallel_for(a.size(), [&](std::size_t i) {
    for (std::size_t j = 0; j < b.size(); ++j) out[i * b.size() + j] = giou(a[i], b[j]);
  });
  return out;
}

std::vector<double> pairwise_giou_serial(std::span<const BBox> a, std::span<const BBox> b) {
  std::vector<double> out;
  out.reserve(a.size() * b.size());
  for (const auto& x : a)
    for (const auto& y : b) out.push_back(giou(x, y));
  return out;
}

std::vector<Assignment> solve_assignments(std::span<const CostMatrix> matrices) {
  std::vector<Assignment> out(matrices.size());
  parallel_for(matrices.size(), [&](std::size_t i) { out[i] = hungarian(matrices[i]); });
  return out;
}

std::vector<Assignment> solve_assignments_serial(std::span<const CostMatrix> matrices) {
  std::vector<Assignment> out;
  out.reserve(matrices.size());
  for (const auto& m : matrices) out.push_back(hungarian(m));
  return out;
}

}  // namespace ar2can::batch
