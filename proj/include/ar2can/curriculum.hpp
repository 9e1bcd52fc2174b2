#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace ar2can {

// Two-phase person-count schedule. Epochs are 1-based; epoch t belongs to the
// early phase while t <= tau.
struct CurriculumConfig {
  int tau = 100;
  std::vector<int> buckets{2, 3, 4, 5, 6, 7};
  std::vector<int> early_buckets{2, 3};

  void validate() const;
};

double bucket_probability(int count, int epoch, const CurriculumConfig& cfg);

// Owns its RNG; not thread-safe.
class CurriculumSampler {
 public:
  explicit CurriculumSampler(std::uint64_t seed, CurriculumConfig cfg = {});

  int sample(int epoch);
  const CurriculumConfig& config() const { return cfg_; }

 private:
  CurriculumConfig cfg_;
  std::mt19937_64 rng_;
};

// One-shot draw with a fresh generator seeded by `seed`.
int sample_bucket(std::uint64_t seed, int epoch, const CurriculumConfig& cfg);

}  // namespace ar2can
