#pragma once

#include <cstdint>
#include <deque>
#include <memory>
#include <string>
#include <vector>

#include "checkpoint.hpp"
#include "config.hpp"
#include "env.hpp"
#include "mlp.hpp"
#include "reward_space.hpp"
#include "rng.hpp"

namespace cdrl {

// Observation first, condition appended.
Vec concat_condition(std::span<const double> obs, std::span<const double> c);

struct GaeResult {
  Vec advantages;
  Vec returns;  // advantages + values
};

// Standard GAE recursion over one environment's sequence. `terminals` marks
// steps whose episode ended (termination or truncation); bootstrapping is
// zeroed across them. lambda = 1 recovers the plain n-step estimator.
GaeResult gae_advantages(std::span<const double> rewards, std::span<const double> values,
                         std::span<const std::uint8_t> terminals, double bootstrap_value,
                         double gamma, double lambda);

// (s+c, a, s'+c, r_c, terminated). Time-limit truncations are stored
// non-terminal so targets still bootstrap through them.
struct ConditionalTransition {
  Vec obs;       // observation-then-condition
  Vec action;
  Vec next_obs;  // same condition embedded
  double reward = 0.0;
  bool terminated = false;
};

// Ring buffer, overwrites oldest first, uniform sampling with replacement.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity);
  void push(ConditionalTransition t);
  std::size_t size() const { return size_; }
  std::size_t capacity() const { return storage_.size(); }
  const ConditionalTransition& at(std::size_t i) const { return storage_[i]; }
  std::vector<const ConditionalTransition*> sample(std::size_t n, Rng& rng) const;

 private:
  std::vector<ConditionalTransition> storage_;
  std::size_t cursor_ = 0;
  std::size_t size_ = 0;
};

// target <- (1 - rho) * target + rho * online, element-wise.
void soft_update(Vec& target, const Vec& online, double rho);

// n' = n + theta*(0 - n) + sigma*N(0,1), per dimension.
class OuNoise {
 public:
  OuNoise(int dim, double theta, double sigma) : state_(dim, 0.0), theta_(theta), sigma_(sigma) {}
  void reset() { std::fill(state_.begin(), state_.end(), 0.0); }
  const Vec& step(Rng& rng);
  const Vec& state() const { return state_; }

 private:
  Vec state_;
  double theta_;
  double sigma_;
};

// Bellman backups against the lagged networks; terminal transitions use r only.
Vec dqn_targets(std::span<const ConditionalTransition* const> minibatch, const Mlp& target_q,
                double gamma);
Vec ddpg_targets(std::span<const ConditionalTransition* const> minibatch, const Mlp& target_actor,
                 const Mlp& target_critic, double gamma);

// With probability eps a uniform action, otherwise greedy (ties -> lowest).
int epsilon_greedy(std::span<const double> q_values, double eps, Rng& rng);

// ---------- PPO ----------

struct PpoSample {
  Vec input;  // s+c
  Vec action;
  double logprob_old = 0.0;
  double advantage = 0.0;  // normalized
  double ret = 0.0;
};

struct PpoGrads {
  Vec policy;  // flat, includes the log_std extra block
  Vec value;
  double loss_policy = 0.0;
  double loss_value = 0.0;
  double entropy = 0.0;
  double clip_fraction = 0.0;
};

// Mean clipped-surrogate loss and exact gradients over one minibatch.
PpoGrads ppo_minibatch_grads(const Mlp& policy, const Mlp& value,
                             std::span<const PpoSample> batch, double clip,
                             double entropy_coef);

// Per-batch advantage normalization (mean 0, std 1, std floored at 1e-8).
void normalize_advantages(std::span<double> advantages);

// ---------- training ----------

struct TrainOutput {
  Checkpoint checkpoint;
  std::string log_csv;   // header + one row per periodic evaluation
  std::int64_t agent_steps = 0;
  std::int64_t updates = 0;
};

// Algorithm 1's reward-randomized outer loop around the configured algorithm.
// With conditional=false, trains a plain policy on the reward-space midpoint
// weights (plus `extra_steps` compensation budget) instead.
TrainOutput train(const RunConfig& cfg, bool conditional, std::int64_t extra_steps = 0);

}  // namespace cdrl
