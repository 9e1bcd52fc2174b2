#pragma once

#include <span>
#include <vector>

#include "ar2can/assignment.hpp"
#include "ar2can/geometry.hpp"
#include "ar2can/rewards.hpp"
#include "ar2can/token_plan.hpp"

// Data-parallel kernels over independent items (group samples, layouts, box
// pairs, cost matrices). Each OpenMP kernel has a *_serial twin that computes
// the same values in a plain loop; tests require the two to agree bit-for-bit.
namespace ar2can::batch {

// Thread cap: AR2CAN_THREADS when set to a positive integer, otherwise the
// OpenMP default. set_thread_limit overrides both (0 restores the default).
int thread_limit();
void set_thread_limit(int threads);

struct SampleInputs {
  std::vector<FaceObservation> observations;
  double quality = 0.0;
};

// Artist reward for every rollout of one prompt; the layout and references are
// shared across the group.
std::vector<RewardBreakdown> evaluate_group(const Layout& layout, std::span<const SampleInputs> samples,
                                            std::span<const ReferenceIdentity> refs,
                                            const RewardWeights& weights, bool frontal_active = true);
std::vector<RewardBreakdown> evaluate_group_serial(const Layout& layout,
                                                   std::span<const SampleInputs> samples,
                                                   std::span<const ReferenceIdentity> refs,
                                                   const RewardWeights& weights,
                                                   bool frontal_active = true);

std::vector<double> reduction_factors(const PatchGrid& grid, std::span<const Layout> layouts);
std::vector<double> reduction_factors_serial(const PatchGrid& grid, std::span<const Layout> layouts);

// Row-major |a| x |b| matrix of giou(a[i], b[j]).
std::vector<double> pairwise_giou(std::span<const BBox> a, std::span<const BBox> b);
std::vector<double> pairwise_giou_serial(std::span<const BBox> a, std::span<const BBox> b);

std::vector<Assignment> solve_assignments(std::span<const CostMatrix> matrices);
std::vector<Assignment> solve_assignments_serial(std::span<const CostMatrix> matrices);

}  // namespace ar2can::batch
