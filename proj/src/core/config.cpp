#include "config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "env.hpp"

namespace cdrl {

namespace {

double parse_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing");
    return x;
  } catch (const std::exception&) {
    throw ConfigError(key, "expected a number, got '" + v + "'");
  }
}

std::int64_t parse_int(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const long long x = std::stoll(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing");
    return x;
  } catch (const std::exception&) {
    throw ConfigError(key, "expected an integer, got '" + v + "'");
  }
}

std::uint64_t parse_u64(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const unsigned long long x = std::stoull(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing");
    return x;
  } catch (const std::exception&) {
    throw ConfigError(key, "expected an unsigned integer, got '" + v + "'");
  }
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ConfigError(key, "expected true/false, got '" + v + "'");
}

std::vector<std::string> split_csv(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(item);
  return out;
}

std::vector<int> parse_int_list(const std::string& key, const std::string& v) {
  std::vector<int> out;
  for (const auto& s : split_csv(v)) out.push_back(static_cast<int>(parse_int(key, s)));
  return out;
}

Interval parse_interval(const std::string& key, const std::string& v) {
  const auto parts = split_csv(v);
  if (parts.size() != 2) throw ConfigError(key, "expected 'lo,hi'");
  return {parse_double(key, parts[0]), parse_double(key, parts[1])};
}

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string fmt(const std::vector<int>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(xs[i]);
  }
  return out;
}

std::string join(const std::vector<std::string>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ',';
    out += xs[i];
  }
  return out;
}

// indexed key like "reward_space.range_3" -> 3
std::optional<std::size_t> indexed_suffix(const std::string& key, const std::string& prefix) {
  if (key.size() <= prefix.size() || key.compare(0, prefix.size(), prefix) != 0)
    return std::nullopt;
  const std::string tail = key.substr(prefix.size());
  for (char c : tail)
    if (c < '0' || c > '9') return std::nullopt;
  return static_cast<std::size_t>(std::stoull(tail));
}

}  // namespace

void AlgoConfig::validate() const {
  if (id != "ppo" && id != "ddpg" && id != "dqn")
    throw ConfigError("algo.id", "expected ppo, ddpg, or dqn; got '" + id + "'");
  if (!(gamma >= 0.0 && gamma < 1.0)) throw ConfigError("algo.gamma", "need 0 <= gamma < 1");
  if (!(gae_lambda >= 0.0 && gae_lambda <= 1.0))
    throw ConfigError("algo.gae_lambda", "need 0 <= lambda <= 1");
  if (!(clip > 0.0)) throw ConfigError("algo.clip", "must be positive");
  if (entropy_coef < 0.0) throw ConfigError("algo.entropy_coef", "must be non-negative");
  if (!(lr_policy > 0.0)) throw ConfigError("algo.lr_policy", "must be positive");
  if (!(lr_value > 0.0)) throw ConfigError("algo.lr_value", "must be positive");
  if (num_envs < 1) throw ConfigError("algo.num_envs", "must be positive");
  if (horizon < 1) throw ConfigError("algo.horizon", "must be positive");
  if (minibatches < 1) throw ConfigError("algo.minibatches", "must be positive");
  if (epochs < 1) throw ConfigError("algo.epochs", "must be positive");
  if (hidden.empty()) throw ConfigError("algo.hidden", "need at least one hidden layer");
  for (int h : hidden)
    if (h < 1) throw ConfigError("algo.hidden", "hidden sizes must be positive");
  if (refresh_period < 1) throw ConfigError("algo.refresh_period", "must be positive");
  if (total_steps < 0) throw ConfigError("algo.total_steps", "must be non-negative");
  if (replay_capacity < 1) throw ConfigError("algo.replay_capacity", "must be positive");
  if (batch_size < 1) throw ConfigError("algo.batch_size", "must be positive");
  if (warmup_steps < 0) throw ConfigError("algo.warmup_steps", "must be non-negative");
  if (train_freq < 1) throw ConfigError("algo.train_freq", "must be positive");
  if (updates_per_burst < 1) throw ConfigError("algo.updates_per_burst", "must be positive");
  if (!(rho >= 0.0 && rho <= 1.0)) throw ConfigError("algo.rho", "need 0 <= rho <= 1");
  if (!(ou_theta > 0.0 && ou_theta <= 1.0)) throw ConfigError("algo.ou_theta", "need 0 < theta <= 1");
  if (ou_sigma < 0.0) throw ConfigError("algo.ou_sigma", "must be non-negative");
  if (target_copy_interval < 1) throw ConfigError("algo.target_copy_interval", "must be positive");
  if (!(eps_start >= 0.0 && eps_start <= 1.0)) throw ConfigError("algo.eps_start", "need [0,1]");
  if (!(eps_end >= 0.0 && eps_end <= 1.0)) throw ConfigError("algo.eps_end", "need [0,1]");
  if (!(eps_fraction > 0.0 && eps_fraction <= 1.0))
    throw ConfigError("algo.eps_fraction", "need (0,1]");
  if (eval_interval_steps < 1) throw ConfigError("algo.eval_interval_steps", "must be positive");
  if (eval_episodes < 1) throw ConfigError("algo.eval_episodes", "must be positive");
}

void GaConfig::validate() const {
  if (population < 2) throw ConfigError("ga.population", "need at least 2");
  if (generations < 1) throw ConfigError("ga.generations", "must be positive");
  if (tournament < 1) throw ConfigError("ga.tournament", "must be positive");
  if (!(crossover_prob >= 0.0 && crossover_prob <= 1.0))
    throw ConfigError("ga.crossover_prob", "need [0,1]");
  if (!(mutation_prob >= 0.0 && mutation_prob <= 1.0))
    throw ConfigError("ga.mutation_prob", "need [0,1]");
  if (mutation_scale < 0.0) throw ConfigError("ga.mutation_scale", "must be non-negative");
  if (elites < 0 || elites >= population)
    throw ConfigError("ga.elites", "need 0 <= elites < population");
}

void FitnessSpec::validate() const {
  if (episodes < 1) throw ConfigError("fitness.episodes", "must be positive");
  if (steps < 1) throw ConfigError("fitness.steps", "must be positive");
  if (!(max_failure_fraction > 0.0 && max_failure_fraction <= 1.0))
    throw ConfigError("fitness.max_failure_fraction", "need (0,1]");
}

std::vector<Interval> RunConfig::resolved_ranges(int condition_dim) const {
  if (!ranges.empty()) {
    if (static_cast<int>(ranges.size()) != condition_dim)
      throw ConfigError("reward_space.ranges",
                        "expected " + std::to_string(condition_dim) + " ranges, got " +
                            std::to_string(ranges.size()));
    return ranges;
  }
  if (epsilon.has_value()) {
    if (!(*epsilon > 0.0)) throw ConfigError("reward_space.epsilon", "must be positive");
    return std::vector<Interval>(condition_dim, Interval{1.0 - *epsilon, 1.0 + *epsilon});
  }
  throw ConfigError("reward_space.ranges", "missing: set reward_space.epsilon or reward_space.range_<i>");
}

std::vector<Interval> RunConfig::resolved_search_bounds(int condition_dim) const {
  if (!search_ranges.empty()) {
    if (static_cast<int>(search_ranges.size()) != condition_dim)
      throw ConfigError("search.ranges", "expected " + std::to_string(condition_dim) + " entries");
    return search_ranges;
  }
  if (!(search_lo < search_hi)) throw ConfigError("search.lo", "need search.lo < search.hi");
  return std::vector<Interval>(condition_dim, Interval{search_lo, search_hi});
}

RewardSpace RunConfig::build_reward_space() const {
  auto env = make_env(env_id, grid_map);
  const EnvSpec& spec = env->spec();
  const int cdim = spec.feature_dim - 1;
  auto names = feature_names.empty() ? spec.feature_names : feature_names;
  return RewardSpace(spec.feature_dim, anchor_index, anchor_weight, resolved_ranges(cdim), names);
}

void RunConfig::validate() const {
  if (env_id.empty()) throw ConfigError("env.id", "missing");
  auto env = make_env(env_id, grid_map);  // throws ConfigError for unknown ids / bad maps
  const EnvSpec& spec = env->spec();
  if (!feature_names.empty() && static_cast<int>(feature_names.size()) != spec.feature_dim)
    throw ConfigError("reward_space.feature_names",
                      "expected " + std::to_string(spec.feature_dim) + " names");
  if (anchor_index < 0 || anchor_index >= spec.feature_dim)
    throw ConfigError("reward_space.anchor_index", "out of range for this environment");
  if (!std::isfinite(anchor_weight))
    throw ConfigError("reward_space.anchor_weight", "must be finite");
  const int cdim = spec.feature_dim - 1;
  const auto rr = resolved_ranges(cdim);
  for (std::size_t i = 0; i < rr.size(); ++i)
    if (!std::isfinite(rr[i].lo) || !std::isfinite(rr[i].hi) || !(rr[i].lo < rr[i].hi))
      throw ConfigError("reward_space.range_" + std::to_string(i), "need finite lo < hi");
  resolved_search_bounds(cdim);
  algo.validate();
  ga.validate();
  fitness.validate();
  if (spec.action.discrete && algo.id == "ddpg")
    throw ConfigError("algo.id", "ddpg requires a continuous-action environment");
  if (!spec.action.discrete && algo.id == "dqn")
    throw ConfigError("algo.id", "dqn requires a discrete-action environment");
  if (baseline_compensation.has_value() && *baseline_compensation < 0)
    throw ConfigError("baseline.compensation_steps", "must be non-negative");
  if (out_dir.empty()) throw ConfigError("out", "missing output directory");
}

void apply_override(RunConfig& c, const std::string& key, const std::string& value) {
  if (key == "env.id") { c.env_id = value; return; }
  if (key == "env.grid_map") { c.grid_map = value; return; }
  if (key == "reward_space.feature_names") { c.feature_names = split_csv(value); return; }
  if (key == "reward_space.anchor_index") { c.anchor_index = static_cast<int>(parse_int(key, value)); return; }
  if (key == "reward_space.anchor_weight") { c.anchor_weight = parse_double(key, value); return; }
  if (key == "reward_space.epsilon") {
    c.epsilon = parse_double(key, value);
    c.ranges.clear();
    return;
  }
  if (auto idx = indexed_suffix(key, "reward_space.range_")) {
    if (c.ranges.size() <= *idx) c.ranges.resize(*idx + 1, Interval{0.0, 0.0});
    c.ranges[*idx] = parse_interval(key, value);
    c.epsilon.reset();
    return;
  }
  if (key == "algo.id") { c.algo.id = value; return; }
  if (key == "algo.gamma") { c.algo.gamma = parse_double(key, value); return; }
  if (key == "algo.gae_lambda") { c.algo.gae_lambda = parse_double(key, value); return; }
  if (key == "algo.clip") { c.algo.clip = parse_double(key, value); return; }
  if (key == "algo.entropy_coef") { c.algo.entropy_coef = parse_double(key, value); return; }
  if (key == "algo.lr_policy") { c.algo.lr_policy = parse_double(key, value); return; }
  if (key == "algo.lr_value") { c.algo.lr_value = parse_double(key, value); return; }
  if (key == "algo.num_envs") { c.algo.num_envs = static_cast<int>(parse_int(key, value)); return; }
  if (key == "algo.horizon") { c.algo.horizon = static_cast<int>(parse_int(key, value)); return; }
  if (key == "algo.minibatches") { c.algo.minibatches = static_cast<int>(parse_int(key, value)); return; }
  if (key == "algo.epochs") { c.algo.epochs = static_cast<int>(parse_int(key, value)); return; }
  if (key == "algo.hidden") { c.algo.hidden = parse_int_list(key, value); return; }
  if (key == "algo.activation") { c.algo.activation = activation_from_string(value); return; }
  if (key == "algo.layer_norm") { c.algo.layer_norm = parse_bool(key, value); return; }
  if (key == "algo.refresh_period") { c.algo.refresh_period = parse_int(key, value); return; }
  if (key == "algo.total_steps") { c.algo.total_steps = parse_int(key, value); return; }
  if (key == "algo.replay_capacity") { c.algo.replay_capacity = parse_int(key, value); return; }
  if (key == "algo.batch_size") { c.algo.batch_size = static_cast<int>(parse_int(key, value)); return; }
  if (key == "algo.warmup_steps") { c.algo.warmup_steps = parse_int(key, value); return; }
  if (key == "algo.train_freq") { c.algo.train_freq = static_cast<int>(parse_int(key, value)); return; }
  if (key == "algo.updates_per_burst") { c.algo.updates_per_burst = static_cast<int>(parse_int(key, value)); return; }
  if (key == "algo.rho") { c.algo.rho = parse_double(key, value); return; }
  if (key == "algo.ou_theta") { c.algo.ou_theta = parse_double(key, value); return; }
  if (key == "algo.ou_sigma") { c.algo.ou_sigma = parse_double(key, value); return; }
  if (key == "algo.target_copy_interval") { c.algo.target_copy_interval = parse_int(key, value); return; }
  if (key == "algo.eps_start") { c.algo.eps_start = parse_double(key, value); return; }
  if (key == "algo.eps_end") { c.algo.eps_end = parse_double(key, value); return; }
  if (key == "algo.eps_fraction") { c.algo.eps_fraction = parse_double(key, value); return; }
  if (key == "algo.eval_interval_steps") { c.algo.eval_interval_steps = parse_int(key, value); return; }
  if (key == "algo.eval_episodes") { c.algo.eval_episodes = static_cast<int>(parse_int(key, value)); return; }
  if (key == "ga.population") { c.ga.population = static_cast<int>(parse_int(key, value)); return; }
  if (key == "ga.generations") { c.ga.generations = static_cast<int>(parse_int(key, value)); return; }
  if (key == "ga.tournament") { c.ga.tournament = static_cast<int>(parse_int(key, value)); return; }
  if (key == "ga.crossover_prob") { c.ga.crossover_prob = parse_double(key, value); return; }
  if (key == "ga.mutation_prob") { c.ga.mutation_prob = parse_double(key, value); return; }
  if (key == "ga.mutation_scale") { c.ga.mutation_scale = parse_double(key, value); return; }
  if (key == "ga.elites") { c.ga.elites = static_cast<int>(parse_int(key, value)); return; }
  if (key == "fitness.episodes") { c.fitness.episodes = static_cast<int>(parse_int(key, value)); return; }
  if (key == "fitness.steps") { c.fitness.steps = parse_int(key, value); return; }
  if (key == "fitness.max_failure_fraction") { c.fitness.max_failure_fraction = parse_double(key, value); return; }
  if (key == "search.lo") { c.search_lo = parse_double(key, value); return; }
  if (key == "search.hi") { c.search_hi = parse_double(key, value); return; }
  if (auto idx = indexed_suffix(key, "search.range_")) {
    if (c.search_ranges.size() <= *idx) c.search_ranges.resize(*idx + 1, Interval{0.0, 0.0});
    c.search_ranges[*idx] = parse_interval(key, value);
    return;
  }
  if (key == "baseline.compensation_steps") { c.baseline_compensation = parse_int(key, value); return; }
  if (key == "seed") { c.seed = parse_u64(key, value); return; }
  if (key == "out") { c.out_dir = value; return; }
  throw ConfigError(key, "unknown configuration key");
}

RunConfig parse_config_text(const std::string& text) {
  RunConfig cfg;
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::size_t start = line.find_first_not_of(" \t");
    if (start == std::string::npos) continue;
    if (line[start] == '#') continue;
    const std::size_t eq = line.find('=', start);
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno), "expected key=value");
    std::string key = line.substr(start, eq - start);
    while (!key.empty() && (key.back() == ' ' || key.back() == '\t')) key.pop_back();
    std::string value = line.substr(eq + 1);
    apply_override(cfg, key, value);
  }
  return cfg;
}

RunConfig load_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("config", "cannot open '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

std::string serialize_config(const RunConfig& c) {
  std::string o;
  auto kv = [&o](const std::string& k, const std::string& v) { o += k + "=" + v + "\n"; };
  kv("env.id", c.env_id);
  if (!c.grid_map.empty()) kv("env.grid_map", c.grid_map);
  if (!c.feature_names.empty()) kv("reward_space.feature_names", join(c.feature_names));
  kv("reward_space.anchor_index", std::to_string(c.anchor_index));
  kv("reward_space.anchor_weight", fmt(c.anchor_weight));
  if (!c.ranges.empty()) {
    for (std::size_t i = 0; i < c.ranges.size(); ++i)
      kv("reward_space.range_" + std::to_string(i), fmt(c.ranges[i].lo) + "," + fmt(c.ranges[i].hi));
  } else if (c.epsilon.has_value()) {
    kv("reward_space.epsilon", fmt(*c.epsilon));
  }
  kv("algo.id", c.algo.id);
  kv("algo.gamma", fmt(c.algo.gamma));
  kv("algo.gae_lambda", fmt(c.algo.gae_lambda));
  kv("algo.clip", fmt(c.algo.clip));
  kv("algo.entropy_coef", fmt(c.algo.entropy_coef));
  kv("algo.lr_policy", fmt(c.algo.lr_policy));
  kv("algo.lr_value", fmt(c.algo.lr_value));
  kv("algo.num_envs", std::to_string(c.algo.num_envs));
  kv("algo.horizon", std::to_string(c.algo.horizon));
  kv("algo.minibatches", std::to_string(c.algo.minibatches));
  kv("algo.epochs", std::to_string(c.algo.epochs));
  kv("algo.hidden", fmt(c.algo.hidden));
  kv("algo.activation", to_string(c.algo.activation));
  kv("algo.layer_norm", c.algo.layer_norm ? "true" : "false");
  kv("algo.refresh_period", std::to_string(c.algo.refresh_period));
  kv("algo.total_steps", std::to_string(c.algo.total_steps));
  kv("algo.replay_capacity", std::to_string(c.algo.replay_capacity));
  kv("algo.batch_size", std::to_string(c.algo.batch_size));
  kv("algo.warmup_steps", std::to_string(c.algo.warmup_steps));
  kv("algo.train_freq", std::to_string(c.algo.train_freq));
  kv("algo.updates_per_burst", std::to_string(c.algo.updates_per_burst));
  kv("algo.rho", fmt(c.algo.rho));
  kv("algo.ou_theta", fmt(c.algo.ou_theta));
  kv("algo.ou_sigma", fmt(c.algo.ou_sigma));
  kv("algo.target_copy_interval", std::to_string(c.algo.target_copy_interval));
  kv("algo.eps_start", fmt(c.algo.eps_start));
  kv("algo.eps_end", fmt(c.algo.eps_end));
  kv("algo.eps_fraction", fmt(c.algo.eps_fraction));
  kv("algo.eval_interval_steps", std::to_string(c.algo.eval_interval_steps));
  kv("algo.eval_episodes", std::to_string(c.algo.eval_episodes));
  kv("ga.population", std::to_string(c.ga.population));
  kv("ga.generations", std::to_string(c.ga.generations));
  kv("ga.tournament", std::to_string(c.ga.tournament));
  kv("ga.crossover_prob", fmt(c.ga.crossover_prob));
  kv("ga.mutation_prob", fmt(c.ga.mutation_prob));
  kv("ga.mutation_scale", fmt(c.ga.mutation_scale));
  kv("ga.elites", std::to_string(c.ga.elites));
  kv("fitness.episodes", std::to_string(c.fitness.episodes));
  kv("fitness.steps", std::to_string(c.fitness.steps));
  kv("fitness.max_failure_fraction", fmt(c.fitness.max_failure_fraction));
  kv("search.lo", fmt(c.search_lo));
  kv("search.hi", fmt(c.search_hi));
  for (std::size_t i = 0; i < c.search_ranges.size(); ++i)
    kv("search.range_" + std::to_string(i),
       fmt(c.search_ranges[i].lo) + "," + fmt(c.search_ranges[i].hi));
  if (c.baseline_compensation.has_value())
    kv("baseline.compensation_steps", std::to_string(*c.baseline_compensation));
  kv("seed", std::to_string(c.seed));
  kv("out", c.out_dir);
  return o;
}

}  // namespace cdrl
