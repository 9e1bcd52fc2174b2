#include "ar2can/curriculum.hpp"

#include <algorithm>
#include <string>

#include "ar2can/error.hpp"

namespace ar2can {

namespace {

bool contains(const std::vector<int>& v, int x) { return std::find(v.begin(), v.end(), x) != v.end(); }

}  // namespace

void CurriculumConfig::validate() const {
  if (tau < 0) throw DomainError("curriculum tau must be >= 0");
  if (buckets.empty() || early_buckets.empty()) throw DomainError("curriculum buckets must be non-empty");
  std::vector<int> sorted = buckets;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw DomainError("curriculum buckets must be distinct");
  for (int b : early_buckets)
    if (!contains(buckets, b))
      throw DomainError("early bucket " + std::to_string(b) + " is not a curriculum bucket");
}

double bucket_probability(int count, int epoch, const CurriculumConfig& cfg) {
  if (!contains(cfg.buckets, count))
    throw DomainError("person count " + std::to_string(count) + " is not a curriculum bucket");
  if (epoch <= cfg.tau)
    return contains(cfg.early_buckets, count) ? 1.0 / static_cast<double>(cfg.early_buckets.size())
                                              : 0.0;
  return 1.0 / static_cast<double>(cfg.buckets.size());
}

CurriculumSampler::CurriculumSampler(std::uint64_t seed, CurriculumConfig cfg)
    : cfg_(std::move(cfg)), rng_(seed) {
  cfg_.validate();
}

int CurriculumSampler::sample(int epoch) {
  const auto& pool = epoch <= cfg_.tau ? cfg_.early_buckets : cfg_.buckets;
  std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
  return pool[pick(rng_)];
}

int sample_bucket(std::uint64_t seed, int epoch, const CurriculumConfig& cfg) {
  return CurriculumSampler(seed, cfg).sample(epoch);
}

}  // namespace ar2can
