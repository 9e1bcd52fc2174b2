#include "ar2can/grpo.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace ar2can {

void SampleGroup::validate() const {
  if (samples.size() < 2) throw DomainError("a GRPO group needs at least two samples");
  if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) throw DomainError("group epsilon must be finite and >= 0");
  for (const auto& s : samples)
    if (!std::isfinite(s.reward)) throw DomainError("group rewards must be finite");
}

AdvantageSet group_advantages(std::span<const double> rewards, double epsilon) {
  if (rewards.size() < 2) throw DomainError("group advantages need at least two rewards");
  const double m = static_cast<double>(rewards.size());
  AdvantageSet out;
  double sum = 0.0;
  for (double r : rewards) {
    if (!std::isfinite(r)) throw DomainError("group rewards must be finite");
    sum += r;
  }
  out.group_mean = sum / m;
  // Equal rewards can still leave a rounding residue in the mean.
  if (std::all_of(rewards.begin(), rewards.end(), [&](double r) { return r == rewards[0]; })) {
    out.group_mean = rewards[0];
    out.advantages.assign(rewards.size(), 0.0);
    return out;
  }
  double ss = 0.0;
  for (double r : rewards) ss += (r - out.group_mean) * (r - out.group_mean);
  out.group_std = std::sqrt(ss / m);
  out.advantages.reserve(rewards.size());
  const double denom = out.group_std + epsilon;
  for (double r : rewards) {
    const double centered = r - out.group_mean;
    // Zero-variance groups carry no signal; avoid 0/0 when epsilon is 0.
    out.advantages.push_back(denom > 0.0 ? centered / denom : 0.0);
  }
  return out;
}

AdvantageSet group_advantages(const SampleGroup& g) {
  g.validate();
  std::vector<double> rewards;
  rewards.reserve(g.samples.size());
  for (const auto& s : g.samples) rewards.push_back(s.reward);
  return group_advantages(rewards, g.epsilon);
}

double grpo_loss(const SampleGroup& g, const AdvantageSet& adv, double beta_kl, double kl_estimate) {
  if (adv.advantages.size() != g.samples.size())
    throw DomainError("advantage set does not match the group size");
  double total = 0.0;
  for (std::size_t i = 0; i < g.samples.size(); ++i)
    total += adv.advantages[i] * (g.samples[i].logp_current - g.samples[i].logp_reference);
  return total - beta_kl * kl_estimate;
}

double grpo_objective(std::span<const SampleGroup> groups, double beta_kl,
                      std::span<const double> kl_estimates) {
  if (groups.empty()) throw DomainError("GRPO objective over zero groups");
  if (kl_estimates.size() != groups.size()) throw DomainError("one KL estimate per group is required");
  double total = 0.0;
  for (std::size_t k = 0; k < groups.size(); ++k)
    total += grpo_loss(groups[k], group_advantages(groups[k]), beta_kl, kl_estimates[k]);
  return total / static_cast<double>(groups.size());
}

ToyPolicy::ToyPolicy(std::size_t outcomes, double temperature)
    : ToyPolicy(std::vector<double>(outcomes, 0.0), temperature) {}

ToyPolicy::ToyPolicy(std::vector<double> logits, double temperature)
    : logits_(std::move(logits)), temperature_(temperature) {
  if (logits_.empty()) throw DomainError("toy policy needs at least one outcome");
  if (!(temperature_ > 0.0)) throw DomainError("toy policy temperature must be positive");
  if (!finite()) throw DomainError("toy policy logits must be finite");
}

std::vector<double> ToyPolicy::log_probabilities() const {
  std::vector<double> s(logits_.size());
  for (std::size_t k = 0; k < s.size(); ++k) s[k] = logits_[k] / temperature_;
  const double mx = *std::max_element(s.begin(), s.end());
  double z = 0.0;
  for (double v : s) z += std::exp(v - mx);
  const double log_z = mx + std::log(z);
  for (double& v : s) v -= log_z;
  return s;
}

std::vector<double> ToyPolicy::probabilities() const {
  auto lp = log_probabilities();
  for (double& v : lp) v = std::exp(v);
  return lp;
}

std::size_t ToyPolicy::sample(std::mt19937_64& rng) const {
  const auto p = probabilities();
  std::discrete_distribution<std::size_t> dist(p.begin(), p.end());
  return dist(rng);
}

bool ToyPolicy::finite() const {
  return std::all_of(logits_.begin(), logits_.end(), [](double v) { return std::isfinite(v); });
}

double kl_divergence(const ToyPolicy& p, const ToyPolicy& q) {
  if (p.size() != q.size()) throw DomainError("KL between policies of different sizes");
  const auto lp = p.log_probabilities();
  const auto lq = q.log_probabilities();
  double kl = 0.0;
  for (std::size_t k = 0; k < lp.size(); ++k) kl += std::exp(lp[k]) * (lp[k] - lq[k]);
  return std::max(kl, 0.0);
}

double total_variation(const ToyPolicy& p, const ToyPolicy& q) {
  if (p.size() != q.size()) throw DomainError("total variation between policies of different sizes");
  const auto a = p.probabilities();
  const auto b = q.probabilities();
  double tv = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) tv += std::abs(a[k] - b[k]);
  return 0.5 * tv;
}

namespace {

void check_samples(const ToyPolicy& policy, const ToyPolicy& reference,
                   std::span<const std::size_t> outcomes, std::span<const double> advantages) {
  if (policy.size() != reference.size()) throw DomainError("policy and reference differ in size");
  if (outcomes.empty() || outcomes.size() != advantages.size())
    throw DomainError("outcomes and advantages must be non-empty and equally long");
  for (auto x : outcomes)
    if (x >= policy.size()) throw DomainError("sampled outcome outside the policy support");
}

}  // namespace

double toy_objective(const ToyPolicy& policy, const ToyPolicy& reference,
                     std::span<const std::size_t> outcomes, std::span<const double> advantages,
                     double beta_kl) {
  check_samples(policy, reference, outcomes, advantages);
  const auto lp = policy.log_probabilities();
  const auto lr = reference.log_probabilities();
  double surrogate = 0.0;
  for (std::size_t i = 0; i < outcomes.size(); ++i)
    surrogate += advantages[i] * (lp[outcomes[i]] - lr[outcomes[i]]);
  surrogate /= static_cast<double>(outcomes.size());
  double kl = 0.0;
  for (std::size_t k = 0; k < lp.size(); ++k) kl += std::exp(lp[k]) * (lp[k] - lr[k]);
  return surrogate - beta_kl * kl;
}

std::vector<double> toy_objective_gradient(const ToyPolicy& policy, const ToyPolicy& reference,
                                           std::span<const std::size_t> outcomes,
                                           std::span<const double> advantages, double beta_kl) {
  check_samples(policy, reference, outcomes, advantages);
  const std::size_t k_count = policy.size();
  const auto lp = policy.log_probabilities();
  const auto lr = reference.log_probabilities();
  std::vector<double> p(k_count);
  for (std::size_t k = 0; k < k_count; ++k) p[k] = std::exp(lp[k]);

  const double inv_t = 1.0 / policy.temperature();
  const double inv_m = 1.0 / static_cast<double>(outcomes.size());
  std::vector<double> grad(k_count, 0.0);
  // d log p_x / dz_j = (1[j == x] - p_j) / T
  double adv_sum = 0.0;
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    grad[outcomes[i]] += advantages[i];
    adv_sum += advantages[i];
  }
  for (std::size_t j = 0; j < k_count; ++j) grad[j] = (grad[j] - adv_sum * p[j]) * inv_t * inv_m;

  if (beta_kl != 0.0) {
    double kl = 0.0;
    for (std::size_t k = 0; k < k_count; ++k) kl += p[k] * (lp[k] - lr[k]);
    // dKL / dz_j = p_j (log(p_j / r_j) - KL) / T
    for (std::size_t j = 0; j < k_count; ++j)
      grad[j] -= beta_kl * p[j] * ((lp[j] - lr[j]) - kl) * inv_t;
  }
  return grad;
}

RewardBreakdown count_task_reward(int target, int count) {
  RewardComponents c;
  c.count = count_reward(static_cast<std::size_t>(count), static_cast<std::size_t>(target));
  return composite_reward(c, RewardWeights{1.0, 0.0, 0.0, 0.0});
}

RewardBreakdown artist_task_reward(int target, int count) {
  RewardComponents c;
  c.count = count_reward(static_cast<std::size_t>(count), static_cast<std::size_t>(target));
  c.quality = std::max(0.0, 1.0 - 0.1 * std::abs(count - target));
  c.face = static_cast<double>(std::min(count, target)) / static_cast<double>(target);
  c.pose = 1.0;
  return composite_reward(c, RewardWeights::artist());
}

void ToyTrainConfig::validate() const {
  if (group_size < 2) throw InputError("group size must be at least 2");
  if (epochs < 0) throw InputError("epochs must be >= 0");
  if (outcomes < 1) throw InputError("outcome space must be non-empty");
  if (groups_per_epoch < 1) throw InputError("groups per epoch must be >= 1");
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) throw InputError("learning rate must be positive");
  if (!(beta_kl >= 0.0)) throw InputError("beta_kl must be >= 0");
  if (!(epsilon >= 0.0)) throw InputError("epsilon must be >= 0");
  if (!(temperature > 0.0)) throw InputError("temperature must be positive");
  if (curriculum) {
    curriculum->validate();
    for (int b : curriculum->buckets)
      if (b < 1 || b > outcomes)
        throw InputError("curriculum bucket " + std::to_string(b) + " outside the outcome space");
  } else if (target < 1 || target > outcomes) {
    throw InputError("target count outside the outcome space");
  }
}

std::string TrainingTrace::to_csv() const {
  std::ostringstream os;
  os.precision(17);
  os << "epoch,target,mean_reward,mean_count,mean_quality,mean_face,mean_pose,p_target,kl,objective\n";
  for (const auto& r : rows)
    os << r.epoch << ',' << r.target << ',' << r.mean_reward << ',' << r.mean_count << ','
       << r.mean_quality << ',' << r.mean_face << ',' << r.mean_pose << ',' << r.p_target << ','
       << r.kl << ',' << r.objective << '\n';
  return os.str();
}

TrainingTrace toy_grpo_train(const ToyRewardFn& reward_fn, const ToyTrainConfig& cfg) {
  cfg.validate();
  const auto outcomes = static_cast<std::size_t>(cfg.outcomes);
  const auto m = static_cast<std::size_t>(cfg.group_size);

  TrainingTrace trace;
  trace.reference = ToyPolicy(outcomes, cfg.temperature);
  std::mt19937_64 rng(cfg.seed);
  std::optional<CurriculumSampler> curriculum;
  if (cfg.curriculum) curriculum.emplace(cfg.seed ^ 0x9e3779b97f4a7c15ULL, *cfg.curriculum);

  std::vector<std::size_t> drawn(m);
  std::vector<RewardBreakdown> scored(m);
  std::vector<double> rewards(m);

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    const int target = curriculum ? curriculum->sample(epoch) : cfg.target;
    ToyPolicy& policy = trace.policies.try_emplace(target, trace.reference).first->second;

    TraceRow row;
    row.epoch = epoch;
    row.target = target;
    std::vector<double> grad(outcomes, 0.0);
    std::vector<SampleGroup> groups;
    std::vector<double> kls;
    const double kl_before = kl_divergence(policy, trace.reference);
    const auto lp = policy.log_probabilities();
    const auto lr = trace.reference.log_probabilities();

    for (int g = 0; g < cfg.groups_per_epoch; ++g) {
      for (auto& x : drawn) x = policy.sample(rng);
      const auto n = static_cast<long>(m);
#pragma omp parallel for if (cfg.parallel_rewards) schedule(static)
      for (long i = 0; i < n; ++i)
        scored[i] = reward_fn(target, static_cast<int>(drawn[i]) + 1);

      SampleGroup group{std::to_string(target), {}, cfg.epsilon};
      for (std::size_t i = 0; i < m; ++i) {
        rewards[i] = scored[i].composite;
        group.samples.push_back({rewards[i], lp[drawn[i]], lr[drawn[i]]});
        row.mean_reward += scored[i].composite;
        row.mean_count += scored[i].count;
        row.mean_quality += scored[i].quality;
        row.mean_face += scored[i].face;
        row.mean_pose += scored[i].pose;
      }
      const AdvantageSet adv = group_advantages(rewards, cfg.epsilon);
      const auto gg = toy_objective_gradient(policy, trace.reference, drawn, adv.advantages, cfg.beta_kl);
      for (std::size_t k = 0; k < outcomes; ++k) grad[k] += gg[k];
      groups.push_back(std::move(group));
      kls.push_back(kl_before);
    }
    row.objective = grpo_objective(groups, cfg.beta_kl, kls);

    const double inv_groups = 1.0 / cfg.groups_per_epoch;
    for (std::size_t k = 0; k < outcomes; ++k) policy.logits()[k] += cfg.learning_rate * grad[k] * inv_groups;

    const double samples = static_cast<double>(m) * cfg.groups_per_epoch;
    row.mean_reward /= samples;
    row.mean_count /= samples;
    row.mean_quality /= samples;
    row.mean_face /= samples;
    row.mean_pose /= samples;
    if (!policy.finite()) {
      trace.rows.push_back(row);
      throw TrainingDiverged("policy logits became non-finite at epoch " + std::to_string(epoch),
                             trace);
    }
    row.p_target = policy.probabilities()[static_cast<std::size_t>(target - 1)];
    row.kl = kl_divergence(policy, trace.reference);
    trace.rows.push_back(row);
  }
  return trace;
}

}  // namespace ar2can
