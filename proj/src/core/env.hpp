#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "common.hpp"
#include "rng.hpp"

namespace cdrl {

struct ActionDescriptor {
  bool discrete = false;
  int count = 0;        // discrete cardinality
  int dim = 0;          // continuous dimension
  double lo = -1.0;     // continuous per-dimension bounds (shared)
  double hi = 1.0;
};

struct EnvSpec {
  std::string id;
  int obs_dim = 0;
  int feature_dim = 0;
  ActionDescriptor action;
  int max_episode_steps = 0;
  std::vector<std::string> feature_names;
};

struct StepResult {
  Vec next_obs;
  Vec features;
  bool terminated = false;
  bool truncated = false;
};

// A single environment instance. Deterministic given (seed, action sequence).
class Env {
 public:
  virtual ~Env() = default;
  virtual const EnvSpec& spec() const = 0;
  virtual Vec reset(std::uint64_t seed) = 0;
  virtual StepResult step(std::span<const double> action) = 0;
  // Whether a `terminated` episode counts as a failure for fitness purposes
  // (a fall) as opposed to a success-absorbing state (a reached goal).
  virtual bool terminal_is_failure() const { return false; }
};

// 1-D runner: state (x, v), scalar action in [-1,1].
//   v' = clamp(v + 0.1*a - 0.02*v, -2, 2), x' = x + 0.1*v'
// Falls when |v'| > 1.5. Features: (dx, alive, -a^2). Observation wraps x
// into [0,1) so absolute position cannot be memorized.
class PointRunnerEnv final : public Env {
 public:
  PointRunnerEnv();
  const EnvSpec& spec() const override { return spec_; }
  Vec reset(std::uint64_t seed) override;
  StepResult step(std::span<const double> action) override;
  bool terminal_is_failure() const override { return true; }

  double position() const { return x_; }
  double velocity() const { return v_; }

 private:
  Vec observe() const;
  EnvSpec spec_;
  double x_ = 0.0;
  double v_ = 0.0;
  int steps_ = 0;
  bool done_ = true;
};

// 7x7 grid with a goal, hazards, and one-shot pellets. Discrete actions
// N/E/S/W; walls map to self. Features: (goal, pellet, -hazard, -time).
class GridCollectEnv final : public Env {
 public:
  explicit GridCollectEnv(const std::string& ascii_map = kDefaultMap);
  const EnvSpec& spec() const override { return spec_; }
  Vec reset(std::uint64_t seed) override;
  StepResult step(std::span<const double> action) override;

  static constexpr const char* kDefaultMap =
      "S..P..H|.H..P..|..H...P|P...H..|..P..H.|.H....P|..P...G";

  int rows() const { return rows_; }
  int cols() const { return cols_; }

 private:
  Vec observe() const;
  EnvSpec spec_;
  int rows_ = 0, cols_ = 0;
  int start_ = 0, goal_ = 0;
  std::vector<char> cells_;         // '.', 'H', 'P', 'G', 'S'
  std::vector<int> pellet_index;    // cell -> pellet slot or -1
  int pellet_count_ = 0;
  int pos_ = 0;
  std::vector<std::uint8_t> pellets_left_;
  int steps_ = 0;
  bool done_ = true;
};

// Deterministic tabular MDP: transition map, per-(s,a) feature table.
struct TabularMdp {
  int num_states = 0;
  int num_actions = 0;
  int feature_dim = 0;
  int start_state = 0;
  std::vector<int> next;        // [s*A + a] -> s'
  std::vector<Vec> features;    // [s*A + a] -> phi
  std::vector<std::uint8_t> terminal;  // per state

  int transition(int s, int a) const { return next[static_cast<std::size_t>(s) * num_actions + a]; }
  const Vec& feature(int s, int a) const {
    return features[static_cast<std::size_t>(s) * num_actions + a];
  }
};

// 8-state chain with a risky shortcut at state 2 (jump to 6). Action 0
// advances, action 1 stays except at the shortcut state. Features:
// (goal-arrival, shortcut-taken, per-step time), all as +1 indicators.
TabularMdp make_chain_mdp();

// Wraps a TabularMdp as an Env with one-hot observations.
class TabularEnv final : public Env {
 public:
  TabularEnv(TabularMdp mdp, std::string id, int max_episode_steps,
             std::vector<std::string> feature_names);
  const EnvSpec& spec() const override { return spec_; }
  Vec reset(std::uint64_t seed) override;
  StepResult step(std::span<const double> action) override;

  const TabularMdp& mdp() const { return mdp_; }
  int state() const { return state_; }

 private:
  Vec observe() const;
  EnvSpec spec_;
  TabularMdp mdp_;
  int state_ = 0;
  int steps_ = 0;
  bool done_ = true;
};

struct ValueIterationResult {
  Vec values;                  // per state
  std::vector<int> policy;     // greedy action per state (ties -> lower index)
};

// Solves V within tol of the Bellman optimality fixed point under
// r(s,a) = weights^T phi(s,a). Terminal states have V = 0.
ValueIterationResult value_iteration(const TabularMdp& mdp, std::span<const double> weights,
                                     double gamma, double tol);

using PolicyFn = std::function<Vec(std::span<const double> obs)>;

struct RolloutResult {
  double distance = 0.0;  // accumulated anchor feature
  bool fell = false;
};

// Accumulates the anchor feature over up to `steps` steps. Episode ends by
// truncation or success-terminal reset the env (fresh derived seed) and keep
// accumulating; a failure terminal stops the run with fell = true.
RolloutResult rollout_distance(Env& env, const PolicyFn& policy, std::int64_t steps,
                               std::uint64_t seed);

// Environment registry. `grid_map` applies to grid-collect only.
std::unique_ptr<Env> make_env(const std::string& id, const std::string& grid_map = "");

}  // namespace cdrl
