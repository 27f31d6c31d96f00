#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "common.hpp"
#include "rng.hpp"

namespace cdrl {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

// A point in condition space; length N-1. Training samples lie in [-1,1]^(N-1),
// hindsight search may range outside.
using Condition = Vec;

// Anchored reward-parameter box and the per-dimension affine map onto [-1,1].
// Immutable after construction.
class RewardSpace {
 public:
  RewardSpace(int feature_dim, int anchor_index, double anchor_weight,
              std::vector<Interval> ranges, std::vector<std::string> feature_names = {});

  int feature_dim() const { return feature_dim_; }
  int condition_dim() const { return feature_dim_ - 1; }
  int anchor_index() const { return anchor_index_; }
  double anchor_weight() const { return anchor_weight_; }
  const std::vector<Interval>& ranges() const { return ranges_; }
  const std::vector<std::string>& feature_names() const { return feature_names_; }

  // c_i = 2*(w_i - lo_i)/(hi_i - lo_i) - 1; defined by the same line outside
  // the ranges.
  Condition to_condition(std::span<const double> non_anchor_weights) const;

  // Exact inverse; extrapolates linearly for |c_i| > 1 (search space).
  Vec from_condition(std::span<const double> c) const;

  // Non-anchor weights at the midpoint of every range (c = 0).
  Vec midpoint_weights() const;

  // Full weight vector [anchor placed at anchor_index; others in order].
  Vec full_weights(std::span<const double> non_anchor_weights) const;

  // r = [xi; M^-1(c)]^T phi. Inputs outside [-1,1] are legal and never clamped.
  double conditional_reward(std::span<const double> c, std::span<const double> features) const;

  // Reward from explicit non-anchor weights (the anchored dot-product form).
  double reward_from_weights(std::span<const double> non_anchor_weights,
                             std::span<const double> features) const;

  // n independent uniform draws over [-1,1]^(N-1).
  std::vector<Condition> sample_conditions(std::size_t n, Rng& rng) const;

 private:
  int feature_dim_;
  int anchor_index_;
  double anchor_weight_;
  std::vector<Interval> ranges_;
  std::vector<std::string> feature_names_;
};

// Counts update units and reports when a condition resample is due:
// exactly when the running counter is a multiple of the period.
class RefreshSchedule {
 public:
  explicit RefreshSchedule(std::int64_t period) : period_(period) {
    require_shape(period > 0, "refresh period must be positive");
  }

  bool tick() {
    ++counter_;
    return counter_ % period_ == 0;
  }

  std::int64_t counter() const { return counter_; }
  std::int64_t period() const { return period_; }

 private:
  std::int64_t period_;
  std::int64_t counter_ = 0;
};

}  // namespace cdrl
