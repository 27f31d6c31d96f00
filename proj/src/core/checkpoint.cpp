#include "checkpoint.hpp"

#include <cmath>
#include <cstdlib>
#include <sstream>

#include "csv.hpp"

namespace cdrl {

void Checkpoint::set(const std::string& key, const std::string& value) {
  for (auto& [k, v] : header) {
    if (k == key) {
      v = value;
      return;
    }
  }
  header.emplace_back(key, value);
}

const std::string* Checkpoint::find(const std::string& key) const {
  for (const auto& [k, v] : header)
    if (k == key) return &v;
  return nullptr;
}

std::string Checkpoint::get(const std::string& key) const {
  const std::string* v = find(key);
  if (!v) throw std::runtime_error("checkpoint: missing header key '" + key + "'");
  return *v;
}

const Mlp& Checkpoint::net(const std::string& name) const {
  for (const auto& [n, m] : nets)
    if (n == name) return m;
  throw std::runtime_error("checkpoint: no network named '" + name + "'");
}

bool Checkpoint::conditional() const { return get("conditional") == "true"; }
std::string Checkpoint::algo() const { return get("algo"); }

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(item);
  return out;
}

}  // namespace

std::string Checkpoint::serialize() const {
  std::string o;
  for (const auto& [k, v] : header) o += k + "=" + v + "\n";
  for (const auto& [name, m] : nets) {
    std::string layers;
    for (std::size_t i = 0; i < m.layer_sizes().size(); ++i) {
      if (i) layers += ',';
      layers += std::to_string(m.layer_sizes()[i]);
    }
    std::string ln;
    for (std::size_t i = 0; i < m.layer_norm_flags().size(); ++i) {
      if (i) ln += ',';
      ln += m.layer_norm_flags()[i] ? '1' : '0';
    }
    o += "net." + name + ".layers=" + layers + "\n";
    o += "net." + name + ".activation=" + to_string(m.activation()) + "\n";
    if (!ln.empty()) o += "net." + name + ".layer_norm=" + ln + "\n";
    o += "net." + name + ".extra=" + std::to_string(m.extra_dim()) + "\n";
  }
  o += "\n";
  for (const auto& [name, m] : nets) {
    (void)name;
    for (double p : m.params()) o += format_double(p) + "\n";
  }
  return o;
}

Checkpoint Checkpoint::deserialize(const std::string& text) {
  Checkpoint ck;
  std::stringstream ss(text);
  std::string line;

  struct NetDecl {
    std::string name;
    std::vector<int> layers;
    Activation act = Activation::kTanh;
    std::vector<std::uint8_t> ln;
    int extra = 0;
  };
  std::vector<NetDecl> decls;
  auto decl_for = [&decls](const std::string& name) -> NetDecl& {
    for (auto& d : decls)
      if (d.name == name) return d;
    decls.push_back(NetDecl{name, {}, Activation::kTanh, {}, 0});
    return decls.back();
  };

  while (std::getline(ss, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) break;  // header terminator
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("checkpoint: malformed header line '" + line + "'");
    const std::string key = line.substr(0, eq);
    const std::string value = line.substr(eq + 1);
    if (key.rfind("net.", 0) == 0) {
      const std::size_t dot = key.find('.', 4);
      if (dot == std::string::npos)
        throw std::runtime_error("checkpoint: malformed net key '" + key + "'");
      const std::string name = key.substr(4, dot - 4);
      const std::string attr = key.substr(dot + 1);
      NetDecl& d = decl_for(name);
      if (attr == "layers") {
        for (const auto& tok : split(value, ',')) d.layers.push_back(std::stoi(tok));
      } else if (attr == "activation") {
        d.act = activation_from_string(value);
      } else if (attr == "layer_norm") {
        for (const auto& tok : split(value, ','))
          d.ln.push_back(static_cast<std::uint8_t>(tok == "1"));
      } else if (attr == "extra") {
        d.extra = std::stoi(value);
      } else {
        throw std::runtime_error("checkpoint: unknown net attribute '" + attr + "'");
      }
    } else {
      ck.header.emplace_back(key, value);
    }
  }

  for (auto& d : decls) {
    if (d.layers.size() < 2)
      throw std::runtime_error("checkpoint: net '" + d.name + "' missing layers");
    ck.nets.emplace_back(d.name, Mlp(d.layers, d.act, d.ln, d.extra));
  }

  for (auto& [name, m] : ck.nets) {
    for (double& p : m.params()) {
      if (!std::getline(ss, line))
        throw std::runtime_error("checkpoint: truncated parameter block in net '" + name + "'");
      if (!line.empty() && line.back() == '\r') line.pop_back();
      char* end = nullptr;
      p = std::strtod(line.c_str(), &end);
      if (end == line.c_str())
        throw std::runtime_error("checkpoint: bad parameter value '" + line + "'");
    }
  }
  return ck;
}

RewardSpace Checkpoint::reward_space() const {
  const int n = std::stoi(get("feature_dim"));
  const int anchor = std::stoi(get("reward_space.anchor_index"));
  const double xi = std::strtod(get("reward_space.anchor_weight").c_str(), nullptr);
  std::vector<Interval> ranges;
  for (int i = 0; i < n - 1; ++i) {
    const auto parts = split(get("reward_space.range_" + std::to_string(i)), ',');
    if (parts.size() != 2) throw std::runtime_error("checkpoint: malformed range");
    ranges.push_back({std::strtod(parts[0].c_str(), nullptr), std::strtod(parts[1].c_str(), nullptr)});
  }
  std::vector<std::string> names;
  if (const std::string* fn = find("reward_space.feature_names")) names = split(*fn, ',');
  return RewardSpace(n, anchor, xi, std::move(ranges), std::move(names));
}

std::unique_ptr<Env> Checkpoint::build_env() const {
  const std::string* map = find("env.grid_map");
  return make_env(get("env.id"), map ? *map : "");
}

std::optional<Vec> Checkpoint::baseline_weights() const {
  const std::string* w = find("baseline.weights");
  if (!w) return std::nullopt;
  Vec out;
  for (const auto& tok : split(*w, ',')) out.push_back(std::strtod(tok.c_str(), nullptr));
  return out;
}

int argmax_lowest(std::span<const double> xs) {
  require_shape(!xs.empty(), "argmax over empty values");
  int best = 0;
  for (int i = 1; i < static_cast<int>(xs.size()); ++i)
    if (xs[i] > xs[best]) best = i;
  return best;
}

PolicyFn Checkpoint::deterministic_policy(const Condition& c) const {
  const bool cond = conditional();
  const std::string a = algo();
  if (cond) {
    const int expect = std::stoi(get("feature_dim")) - 1;
    require_shape(static_cast<int>(c.size()) == expect,
                  "condition arity mismatch: expected " + std::to_string(expect) + " values");
  } else {
    require_shape(c.empty(), "baseline checkpoints take no condition");
  }

  // The net is copied into the closure so the policy outlives the checkpoint.
  if (a == "ppo") {
    Mlp policy = net("policy");
    Condition cc = c;
    return [policy, cc](std::span<const double> obs) {
      Vec in(obs.begin(), obs.end());
      in.insert(in.end(), cc.begin(), cc.end());
      return policy.forward(in);
    };
  }
  if (a == "ddpg") {
    Mlp actor = net("actor");
    Condition cc = c;
    return [actor, cc](std::span<const double> obs) {
      Vec in(obs.begin(), obs.end());
      in.insert(in.end(), cc.begin(), cc.end());
      Vec out = actor.forward(in);
      for (double& v : out) v = std::tanh(v);
      return out;
    };
  }
  if (a == "dqn") {
    Mlp q = net("q");
    Condition cc = c;
    return [q, cc](std::span<const double> obs) {
      Vec in(obs.begin(), obs.end());
      in.insert(in.end(), cc.begin(), cc.end());
      const Vec qv = q.forward(in);
      return Vec{static_cast<double>(argmax_lowest(qv))};
    };
  }
  throw std::runtime_error("checkpoint: unknown algorithm '" + a + "'");
}

}  // namespace cdrl
