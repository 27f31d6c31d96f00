#pragma once

#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "env.hpp"
#include "mlp.hpp"
#include "reward_space.hpp"

namespace cdrl {

// Trained-model container. Serialized as a key=value text header terminated
// by a blank line, then every parameter as one base-10 decimal per line in
// network/layer order (weights row-major, biases, layer-norm gain and shift,
// then the network's extra block). Round-trips exactly at 17 significant
// digits.
struct Checkpoint {
  std::vector<std::pair<std::string, std::string>> header;  // ordered
  std::vector<std::pair<std::string, Mlp>> nets;            // ordered by header appearance

  void set(const std::string& key, const std::string& value);
  const std::string* find(const std::string& key) const;
  std::string get(const std::string& key) const;  // throws if missing
  const Mlp& net(const std::string& name) const;

  bool conditional() const;
  std::string algo() const;

  std::string serialize() const;
  static Checkpoint deserialize(const std::string& text);

  RewardSpace reward_space() const;
  std::unique_ptr<Env> build_env() const;
  // Baseline checkpoints carry their fixed non-anchor weights.
  std::optional<Vec> baseline_weights() const;

  // Deterministic evaluation-time action selection: Gaussian mean for PPO,
  // squashed actor output for DDPG, greedy argmax for DQN. For conditional
  // checkpoints the condition is appended to every observation.
  PolicyFn deterministic_policy(const Condition& c) const;
};

int argmax_lowest(std::span<const double> xs);

}  // namespace cdrl
