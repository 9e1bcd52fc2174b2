#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "ar2can/curriculum.hpp"
#include "ar2can/error.hpp"
#include "ar2can/rewards.hpp"

namespace ar2can {

struct GroupSample {
  double reward = 0.0;
  double logp_current = 0.0;
  double logp_reference = 0.0;
};

struct SampleGroup {
  std::string prompt_id;
  std::vector<GroupSample> samples;
  double epsilon = 1e-4;

  void validate() const;
};

struct AdvantageSet {
  std::vector<double> advantages;
  double group_mean = 0.0;
  double group_std = 0.0;  // population standard deviation
};

// A_i = (r_i - mean) / (std + epsilon). Needs at least two rewards.
AdvantageSet group_advantages(std::span<const double> rewards, double epsilon);
AdvantageSet group_advantages(const SampleGroup& g);

// Objective to maximize for one group:
//   sum_i A_i (logp_current_i - logp_reference_i) - beta_kl * kl_estimate.
double grpo_loss(const SampleGroup& g, const AdvantageSet& adv, double beta_kl, double kl_estimate);

// Mean of grpo_loss over groups (one KL estimate per group).
double grpo_objective(std::span<const SampleGroup> groups, double beta_kl,
                      std::span<const double> kl_estimates);

// Categorical policy over a finite outcome space: softmax(logits / temperature).
class ToyPolicy {
 public:
  explicit ToyPolicy(std::size_t outcomes, double temperature = 1.0);
  ToyPolicy(std::vector<double> logits, double temperature);

  std::size_t size() const { return logits_.size(); }
  double temperature() const { return temperature_; }
  const std::vector<double>& logits() const { return logits_; }
  std::vector<double>& logits() { return logits_; }

  std::vector<double> probabilities() const;
  std::vector<double> log_probabilities() const;
  std::size_t sample(std::mt19937_64& rng) const;
  bool finite() const;

 private:
  std::vector<double> logits_;
  double temperature_;
};

double kl_divergence(const ToyPolicy& p, const ToyPolicy& q);
double total_variation(const ToyPolicy& p, const ToyPolicy& q);

// Per-sample surrogate the toy trainer ascends:
//   J(z) = (1/M) sum_i A_i (log pi_z(x_i) - log pi_ref(x_i)) - beta_kl * KL(pi_z || pi_ref)
double toy_objective(const ToyPolicy& policy, const ToyPolicy& reference,
                     std::span<const std::size_t> outcomes, std::span<const double> advantages,
                     double beta_kl);
// Analytic dJ/dlogits (score-function gradient plus exact KL gradient).
std::vector<double> toy_objective_gradient(const ToyPolicy& policy, const ToyPolicy& reference,
                                           std::span<const std::size_t> outcomes,
                                           std::span<const double> advantages, double beta_kl);

// Reward for outcome `count` (a person count, 1-based) under a prompt whose
// target count is `target`.
using ToyRewardFn = std::function<RewardBreakdown(int target, int count)>;

// 1 when count == target, else 0 (count weight only).
RewardBreakdown count_task_reward(int target, int count);
// Synthetic four-component reward with the Artist weights: count indicator,
// quality that decays with miscount, face = min(count, target) / target (the
// zero-similarity rule for missing faces) and a constant frontal pose term.
RewardBreakdown artist_task_reward(int target, int count);

struct ToyTrainConfig {
  int group_size = 21;
  double learning_rate = 0.5;
  int epochs = 200;
  double beta_kl = 0.0;
  double epsilon = 1e-4;
  std::uint64_t seed = 7;
  int outcomes = 8;  // person counts 1..outcomes
  double temperature = 1.0;
  int groups_per_epoch = 1;
  int target = 3;  // prompt target when no curriculum is set
  std::optional<CurriculumConfig> curriculum;
  bool parallel_rewards = false;  // reward_fn must be thread-safe when true

  void validate() const;
};

struct TraceRow {
  int epoch = 0;
  int target = 0;
  double mean_reward = 0.0;
  double mean_count = 0.0;
  double mean_quality = 0.0;
  double mean_face = 0.0;
  double mean_pose = 0.0;
  double p_target = 0.0;  // policy mass on the target count after the update
  double kl = 0.0;
  double objective = 0.0;  // grpo_objective before the update
};

struct TrainingTrace {
  std::vector<TraceRow> rows;
  std::map<int, ToyPolicy> policies;  // keyed by prompt target
  ToyPolicy reference{1};

  std::string to_csv() const;
  double final_mean_reward() const { return rows.empty() ? 0.0 : rows.back().mean_reward; }
};

class TrainingDiverged : public DomainError {
 public:
  TrainingDiverged(const std::string& what, TrainingTrace trace)
      : DomainError(what), trace_(std::move(trace)) {}
  const TrainingTrace& trace() const { return trace_; }

 private:
  TrainingTrace trace_;
};

// Per epoch: curriculum gate (or fixed target) -> sample a group from the
// policy -> score -> group advantages -> one gradient-ascent step on the
// logits. Deterministic for a fixed seed.
TrainingTrace toy_grpo_train(const ToyRewardFn& reward_fn, const ToyTrainConfig& cfg);

}  // namespace ar2can
