#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "common.hpp"
#include "mlp.hpp"
#include "reward_space.hpp"

namespace cdrl {

struct AlgoConfig {
  std::string id;  // ppo | ddpg | dqn
  double gamma = 0.99;
  double gae_lambda = 0.95;
  double clip = 0.2;
  double entropy_coef = 0.0;
  double lr_policy = 3e-4;
  double lr_value = 3e-4;
  int num_envs = 8;
  int horizon = 256;
  int minibatches = 4;
  int epochs = 16;
  std::vector<int> hidden = {64, 64};
  Activation activation = Activation::kTanh;
  bool layer_norm = false;
  std::int64_t refresh_period = 10;  // PPO counts updates, off-policy counts agent steps
  std::int64_t total_steps = 200000;
  // off-policy
  std::int64_t replay_capacity = 100000;
  int batch_size = 128;
  std::int64_t warmup_steps = 1000;
  int train_freq = 1;        // agent steps between update bursts
  int updates_per_burst = 1;
  double rho = 0.001;        // DDPG target soft-update coefficient
  double ou_theta = 0.15;
  double ou_sigma = 0.2;
  std::int64_t target_copy_interval = 1000;  // DQN, agent steps
  double eps_start = 1.0;
  double eps_end = 0.05;
  double eps_fraction = 0.5;  // fraction of the budget for the linear decay
  // periodic evaluation
  std::int64_t eval_interval_steps = 10000;
  int eval_episodes = 4;

  void validate() const;  // throws ConfigError naming the offending field
};

struct GaConfig {
  int population = 50;
  int generations = 30;
  int tournament = 3;
  double crossover_prob = 0.8;
  double mutation_prob = 0.1;
  double mutation_scale = 0.0;  // 0 => 10% of each search dimension's width
  int elites = 1;

  void validate() const;
};

struct FitnessSpec {
  int episodes = 20;
  std::int64_t steps = 200;
  double max_failure_fraction = 0.2;

  void validate() const;
};

struct RunConfig {
  std::string env_id;
  std::string grid_map;  // grid-collect only; empty = built-in default

  std::vector<std::string> feature_names;  // empty = environment defaults
  int anchor_index = 0;
  double anchor_weight = 1.0;
  std::optional<double> epsilon;       // ranges = [1-eps, 1+eps] per dimension
  std::vector<Interval> ranges;        // explicit per-dimension ranges

  AlgoConfig algo;
  GaConfig ga;
  FitnessSpec fitness;

  double search_lo = -2.0;  // shared search-space bounds
  double search_hi = 2.0;
  std::vector<Interval> search_ranges;  // optional per-dimension override

  std::optional<std::int64_t> baseline_compensation;  // literal override

  std::uint64_t seed = 1;
  std::string out_dir = "out";

  // Cross-field validation against the named environment. Throws ConfigError.
  void validate() const;

  // Ranges resolved from epsilon or the explicit list; requires validate().
  std::vector<Interval> resolved_ranges(int condition_dim) const;
  std::vector<Interval> resolved_search_bounds(int condition_dim) const;
  RewardSpace build_reward_space() const;
};

RunConfig parse_config_text(const std::string& text);
RunConfig load_config_file(const std::string& path);
// Applies `key=value`; unknown keys are rejected with the key as field path.
void apply_override(RunConfig& cfg, const std::string& key, const std::string& value);
// Canonical serialization; parse(serialize(c)) reproduces c exactly.
std::string serialize_config(const RunConfig& cfg);

}  // namespace cdrl
