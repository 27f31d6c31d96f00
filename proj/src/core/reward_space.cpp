#include "reward_space.hpp"

#include <cmath>

namespace cdrl {

RewardSpace::RewardSpace(int feature_dim, int anchor_index, double anchor_weight,
                         std::vector<Interval> ranges, std::vector<std::string> feature_names)
    : feature_dim_(feature_dim),
      anchor_index_(anchor_index),
      anchor_weight_(anchor_weight),
      ranges_(std::move(ranges)),
      feature_names_(std::move(feature_names)) {
  if (feature_dim_ < 2) throw ConfigError("reward_space", "feature_dim must be at least 2");
  if (anchor_index_ < 0 || anchor_index_ >= feature_dim_)
    throw ConfigError("reward_space.anchor_index", "out of range");
  if (!std::isfinite(anchor_weight_))
    throw ConfigError("reward_space.anchor_weight", "must be finite");
  if (static_cast<int>(ranges_.size()) != feature_dim_ - 1)
    throw ConfigError("reward_space.ranges", "expected exactly N-1 ranges");
  for (std::size_t i = 0; i < ranges_.size(); ++i) {
    const auto& r = ranges_[i];
    if (!std::isfinite(r.lo) || !std::isfinite(r.hi) || !(r.lo < r.hi))
      throw ConfigError("reward_space.range_" + std::to_string(i),
                        "interval must be finite with lo < hi");
  }
  if (!feature_names_.empty() && static_cast<int>(feature_names_.size()) != feature_dim_)
    throw ConfigError("reward_space.feature_names", "expected one name per feature");
}

Condition RewardSpace::to_condition(std::span<const double> w) const {
  require_shape(static_cast<int>(w.size()) == condition_dim(),
                "to_condition: expected N-1 weights");
  require_finite(w, "to_condition");
  Condition c(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) {
    const auto& r = ranges_[i];
    c[i] = 2.0 * (w[i] - r.lo) / (r.hi - r.lo) - 1.0;
  }
  return c;
}

Vec RewardSpace::from_condition(std::span<const double> c) const {
  require_shape(static_cast<int>(c.size()) == condition_dim(),
                "from_condition: expected N-1 coordinates");
  require_finite(c, "from_condition");
  Vec w(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) {
    const auto& r = ranges_[i];
    w[i] = r.lo + (c[i] + 1.0) * 0.5 * (r.hi - r.lo);
  }
  return w;
}

Vec RewardSpace::midpoint_weights() const {
  Vec w(ranges_.size());
  for (std::size_t i = 0; i < ranges_.size(); ++i) w[i] = 0.5 * (ranges_[i].lo + ranges_[i].hi);
  return w;
}

Vec RewardSpace::full_weights(std::span<const double> non_anchor) const {
  require_shape(static_cast<int>(non_anchor.size()) == condition_dim(),
                "full_weights: expected N-1 weights");
  Vec w(feature_dim_);
  std::size_t k = 0;
  for (int i = 0; i < feature_dim_; ++i) {
    w[i] = (i == anchor_index_) ? anchor_weight_ : non_anchor[k++];
  }
  return w;
}

double RewardSpace::conditional_reward(std::span<const double> c,
                                       std::span<const double> features) const {
  const Vec w = from_condition(c);
  return reward_from_weights(w, features);
}

double RewardSpace::reward_from_weights(std::span<const double> non_anchor,
                                        std::span<const double> features) const {
  require_shape(static_cast<int>(features.size()) == feature_dim_,
                "conditional_reward: feature vector must have length N");
  require_shape(static_cast<int>(non_anchor.size()) == condition_dim(),
                "conditional_reward: expected N-1 non-anchor weights");
  double r = 0.0;
  std::size_t k = 0;
  for (int i = 0; i < feature_dim_; ++i) {
    const double w = (i == anchor_index_) ? anchor_weight_ : non_anchor[k++];
    r += w * features[i];
  }
  return r;
}

std::vector<Condition> RewardSpace::sample_conditions(std::size_t n, Rng& rng) const {
  require_shape(n >= 1, "sample_conditions: n must be at least 1");
  std::vector<Condition> out;
  out.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    Condition c(condition_dim());
    for (auto& v : c) v = rng.uniform(-1.0, 1.0);
    out.push_back(std::move(c));
  }
  return out;
}

}  // namespace cdrl
