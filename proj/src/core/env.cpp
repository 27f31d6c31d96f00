#include "env.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace cdrl {

// ---------- point-runner ----------

PointRunnerEnv::PointRunnerEnv() {
  spec_.id = "point-runner";
  spec_.obs_dim = 2;
  spec_.feature_dim = 3;
  spec_.action = {.discrete = false, .count = 0, .dim = 1, .lo = -1.0, .hi = 1.0};
  spec_.max_episode_steps = 200;
  spec_.feature_names = {"forward", "healthy", "control"};
}

Vec PointRunnerEnv::observe() const {
  double m = std::fmod(x_, 10.0);
  if (m < 0.0) m += 10.0;
  return {m / 10.0, v_};
}

Vec PointRunnerEnv::reset(std::uint64_t seed) {
  Rng rng(seed);
  x_ = 0.0;
  v_ = rng.uniform(-0.05, 0.05);
  steps_ = 0;
  done_ = false;
  return observe();
}

StepResult PointRunnerEnv::step(std::span<const double> action) {
  if (done_) throw std::logic_error("point-runner: step on a finished episode without reset");
  require_shape(action.size() == 1, "point-runner: expected a scalar action");
  require_finite(action, "point-runner action");
  const double a = clamp(action[0], -1.0, 1.0);

  const double x_old = x_;
  v_ = clamp(v_ + 0.1 * a - 0.02 * v_, -2.0, 2.0);
  x_ = x_old + 0.1 * v_;
  ++steps_;

  const bool fell = std::abs(v_) > 1.5;
  StepResult r;
  r.features = {x_ - x_old, fell ? 0.0 : 1.0, -a * a};
  r.terminated = fell;
  r.truncated = !fell && steps_ >= spec_.max_episode_steps;
  r.next_obs = observe();
  done_ = r.terminated || r.truncated;
  return r;
}

// ---------- grid-collect ----------

GridCollectEnv::GridCollectEnv(const std::string& ascii_map) {
  std::vector<std::string> row_strings;
  std::stringstream ss(ascii_map);
  std::string row;
  while (std::getline(ss, row, '|')) row_strings.push_back(row);
  if (row_strings.empty()) throw ConfigError("env.grid_map", "empty map");
  rows_ = static_cast<int>(row_strings.size());
  cols_ = static_cast<int>(row_strings[0].size());
  int start_count = 0, goal_count = 0;
  cells_.assign(static_cast<std::size_t>(rows_) * cols_, '.');
  pellet_index.assign(cells_.size(), -1);
  for (int r = 0; r < rows_; ++r) {
    if (static_cast<int>(row_strings[r].size()) != cols_)
      throw ConfigError("env.grid_map", "ragged rows");
    for (int c = 0; c < cols_; ++c) {
      const char ch = row_strings[r][c];
      const int idx = r * cols_ + c;
      switch (ch) {
        case 'S': start_ = idx; ++start_count; break;
        case 'G': goal_ = idx; ++goal_count; break;
        case 'H': break;
        case 'P': pellet_index[idx] = pellet_count_++; break;
        case '.': break;
        default: throw ConfigError("env.grid_map", std::string("unknown cell '") + ch + "'");
      }
      cells_[idx] = ch;
    }
  }
  if (start_count != 1) throw ConfigError("env.grid_map", "need exactly one S");
  if (goal_count != 1) throw ConfigError("env.grid_map", "need exactly one G");

  spec_.id = "grid-collect";
  spec_.obs_dim = rows_ * cols_ + pellet_count_;
  spec_.feature_dim = 4;
  spec_.action = {.discrete = true, .count = 4, .dim = 0, .lo = 0, .hi = 0};
  spec_.max_episode_steps = 100;
  spec_.feature_names = {"goal", "pellet", "hazard", "time"};
}

Vec GridCollectEnv::observe() const {
  Vec obs(spec_.obs_dim, 0.0);
  obs[pos_] = 1.0;
  for (std::size_t i = 0; i < cells_.size(); ++i) {
    if (pellet_index[i] >= 0 && pellets_left_[pellet_index[i]])
      obs[rows_ * cols_ + pellet_index[i]] = 1.0;
  }
  return obs;
}

Vec GridCollectEnv::reset(std::uint64_t /*seed*/) {
  pos_ = start_;
  pellets_left_.assign(pellet_count_, 1);
  steps_ = 0;
  done_ = false;
  return observe();
}

StepResult GridCollectEnv::step(std::span<const double> action) {
  if (done_) throw std::logic_error("grid-collect: step on a finished episode without reset");
  require_shape(action.size() == 1, "grid-collect: expected one action index");
  const int a = static_cast<int>(action[0]);
  require_shape(a >= 0 && a < 4, "grid-collect: action index out of range");

  int r = pos_ / cols_, c = pos_ % cols_;
  switch (a) {
    case 0: r -= 1; break;  // N
    case 1: c += 1; break;  // E
    case 2: r += 1; break;  // S
    case 3: c -= 1; break;  // W
  }
  // walls map to self
  if (r < 0 || r >= rows_ || c < 0 || c >= cols_) {
    r = pos_ / cols_;
    c = pos_ % cols_;
  }
  pos_ = r * cols_ + c;
  ++steps_;

  StepResult res;
  res.features.assign(4, 0.0);
  res.features[3] = -1.0;  // time cost every step
  if (cells_[pos_] == 'H') res.features[2] = -1.0;
  if (pellet_index[pos_] >= 0 && pellets_left_[pellet_index[pos_]]) {
    res.features[1] = 1.0;
    pellets_left_[pellet_index[pos_]] = 0;
  }
  if (pos_ == goal_) {
    res.features[0] = 1.0;
    res.terminated = true;
  }
  res.truncated = !res.terminated && steps_ >= spec_.max_episode_steps;
  res.next_obs = observe();
  done_ = res.terminated || res.truncated;
  return res;
}

// ---------- chain-mdp ----------

TabularMdp make_chain_mdp() {
  TabularMdp m;
  m.num_states = 8;
  m.num_actions = 2;
  m.feature_dim = 3;
  m.start_state = 0;
  m.terminal.assign(8, 0);
  m.terminal[7] = 1;
  m.next.assign(16, 0);
  m.features.assign(16, Vec(3, 0.0));
  constexpr int kShortcutState = 2;
  constexpr int kShortcutDest = 6;
  for (int s = 0; s < 8; ++s) {
    for (int a = 0; a < 2; ++a) {
      const std::size_t idx = static_cast<std::size_t>(s) * 2 + a;
      if (m.terminal[s]) {
        m.next[idx] = s;
        continue;  // features all zero at the absorbing state
      }
      int ns;
      if (a == 0) {
        ns = s + 1;
      } else if (s == kShortcutState) {
        ns = kShortcutDest;
        m.features[idx][1] = 1.0;  // risky jump taken
      } else {
        ns = s;  // stalling action
      }
      m.next[idx] = ns;
      m.features[idx][0] = (ns == 7) ? 1.0 : 0.0;  // goal arrival (anchor)
      m.features[idx][2] = 1.0;                    // time
    }
  }
  return m;
}

TabularEnv::TabularEnv(TabularMdp mdp, std::string id, int max_episode_steps,
                       std::vector<std::string> feature_names)
    : mdp_(std::move(mdp)) {
  spec_.id = std::move(id);
  spec_.obs_dim = mdp_.num_states;
  spec_.feature_dim = mdp_.feature_dim;
  spec_.action = {.discrete = true, .count = mdp_.num_actions, .dim = 0, .lo = 0, .hi = 0};
  spec_.max_episode_steps = max_episode_steps;
  spec_.feature_names = std::move(feature_names);
}

Vec TabularEnv::observe() const {
  Vec obs(mdp_.num_states, 0.0);
  obs[state_] = 1.0;
  return obs;
}

Vec TabularEnv::reset(std::uint64_t /*seed*/) {
  state_ = mdp_.start_state;
  steps_ = 0;
  done_ = false;
  return observe();
}

StepResult TabularEnv::step(std::span<const double> action) {
  if (done_) throw std::logic_error(spec_.id + ": step on a finished episode without reset");
  require_shape(action.size() == 1, "tabular env: expected one action index");
  const int a = static_cast<int>(action[0]);
  require_shape(a >= 0 && a < mdp_.num_actions, "tabular env: action index out of range");

  StepResult res;
  res.features = mdp_.feature(state_, a);
  state_ = mdp_.transition(state_, a);
  ++steps_;
  res.terminated = mdp_.terminal[state_] != 0;
  res.truncated = !res.terminated && steps_ >= spec_.max_episode_steps;
  res.next_obs = observe();
  done_ = res.terminated || res.truncated;
  return res;
}

// ---------- value iteration ----------

ValueIterationResult value_iteration(const TabularMdp& mdp, std::span<const double> weights,
                                     double gamma, double tol) {
  require_shape(static_cast<int>(weights.size()) == mdp.feature_dim,
                "value_iteration: weights must have length N");
  require_finite(weights, "value_iteration weights");
  if (!(gamma >= 0.0 && gamma < 1.0)) throw NumericError("value_iteration: need 0 <= gamma < 1");
  if (!(tol > 0.0)) throw NumericError("value_iteration: tol must be positive");

  auto reward = [&](int s, int a) {
    const Vec& phi = mdp.feature(s, a);
    double r = 0.0;
    for (int i = 0; i < mdp.feature_dim; ++i) r += weights[i] * phi[i];
    return r;
  };

  // Stop when sweep delta guarantees both |V - V*| <= tol and a Bellman
  // residual <= tol on the returned iterate.
  const double stop = (gamma > 0.0) ? tol * (1.0 - gamma) / gamma : tol;
  Vec v(mdp.num_states, 0.0);
  for (int iter = 0; iter < 1000000; ++iter) {
    double delta = 0.0;
    Vec nv(mdp.num_states, 0.0);
    for (int s = 0; s < mdp.num_states; ++s) {
      if (mdp.terminal[s]) continue;
      double best = -std::numeric_limits<double>::infinity();
      for (int a = 0; a < mdp.num_actions; ++a) {
        const int ns = mdp.transition(s, a);
        const double q = reward(s, a) + gamma * v[ns];
        best = std::max(best, q);
      }
      nv[s] = best;
      delta = std::max(delta, std::abs(nv[s] - v[s]));
    }
    v = std::move(nv);
    if (delta <= stop) break;
  }

  ValueIterationResult out;
  out.values = v;
  out.policy.assign(mdp.num_states, 0);
  for (int s = 0; s < mdp.num_states; ++s) {
    if (mdp.terminal[s]) continue;
    double best = -std::numeric_limits<double>::infinity();
    int best_a = 0;
    for (int a = 0; a < mdp.num_actions; ++a) {
      const double q = reward(s, a) + gamma * v[mdp.transition(s, a)];
      if (q > best) {  // ties break toward the lower action index
        best = q;
        best_a = a;
      }
    }
    out.policy[s] = best_a;
  }
  return out;
}

// ---------- fitness rollout ----------

RolloutResult rollout_distance(Env& env, const PolicyFn& policy, std::int64_t steps,
                               std::uint64_t seed) {
  require_shape(steps >= 1, "rollout_distance: steps must be at least 1");
  RolloutResult out;
  std::uint64_t reset_counter = 0;
  Vec obs = env.reset(derive_seed(seed, "rollout-reset", reset_counter++));
  for (std::int64_t i = 0; i < steps; ++i) {
    const Vec action = policy(obs);
    StepResult r = env.step(action);
    out.distance += r.features[0];
    if (r.terminated && env.terminal_is_failure()) {
      out.fell = true;
      break;
    }
    if (r.terminated || r.truncated) {
      obs = env.reset(derive_seed(seed, "rollout-reset", reset_counter++));
    } else {
      obs = std::move(r.next_obs);
    }
  }
  if (!std::isfinite(out.distance)) throw NumericError("rollout_distance: non-finite distance");
  return out;
}

std::unique_ptr<Env> make_env(const std::string& id, const std::string& grid_map) {
  if (id == "point-runner") return std::make_unique<PointRunnerEnv>();
  if (id == "grid-collect")
    return std::make_unique<GridCollectEnv>(grid_map.empty() ? GridCollectEnv::kDefaultMap
                                                             : grid_map);
  if (id == "chain-mdp")
    return std::make_unique<TabularEnv>(make_chain_mdp(), "chain-mdp", 40,
                                        std::vector<std::string>{"goal", "risk", "time"});
  throw ConfigError("env.id", "unknown environment '" + id + "'");
}

}  // namespace cdrl
