#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "common.hpp"
#include "rng.hpp"

namespace cdrl {

enum class Activation { kTanh, kRelu, kIdentity };

Activation activation_from_string(const std::string& s);
std::string to_string(Activation a);

// Dense network with per-hidden-layer optional layer normalization applied
// after the nonlinearity. The output layer is linear. All parameters live in
// one flat vector laid out layer by layer: weights row-major, then biases,
// then layer-norm gain and shift where enabled; an optional `extra` block
// (e.g. a Gaussian head's log_std) trails the layers.
class Mlp {
 public:
  Mlp() = default;
  Mlp(std::vector<int> layer_sizes, Activation act, std::vector<std::uint8_t> layer_norm,
      int extra_dim = 0);

  static Mlp init(std::vector<int> layer_sizes, Activation act,
                  std::vector<std::uint8_t> layer_norm, int extra_dim, Rng& rng);

  int input_dim() const { return layer_sizes_.front(); }
  int output_dim() const { return layer_sizes_.back(); }
  int num_layers() const { return static_cast<int>(layer_sizes_.size()) - 1; }
  int extra_dim() const { return extra_dim_; }
  const std::vector<int>& layer_sizes() const { return layer_sizes_; }
  Activation activation() const { return activation_; }
  const std::vector<std::uint8_t>& layer_norm_flags() const { return layer_norm_; }

  std::size_t param_count() const { return params_.size(); }
  Vec& params() { return params_; }
  const Vec& params() const { return params_; }
  std::span<double> extra() { return {params_.data() + extra_offset_, static_cast<std::size_t>(extra_dim_)}; }
  std::span<const double> extra() const {
    return {params_.data() + extra_offset_, static_cast<std::size_t>(extra_dim_)};
  }

  // Analytic count: sum over layers of (out*in + out), plus 2*out per
  // layer-normed hidden layer, plus the extra block.
  static std::size_t expected_param_count(const std::vector<int>& layer_sizes,
                                          const std::vector<std::uint8_t>& layer_norm,
                                          int extra_dim);

  struct Cache {
    Vec input;
    std::vector<Vec> pre;      // z per layer
    std::vector<Vec> post;     // activation(z) per hidden layer
    std::vector<Vec> norm;     // x-hat per layer-normed hidden layer (empty otherwise)
    std::vector<double> inv_std;
  };

  Vec forward(std::span<const double> input, Cache* cache = nullptr) const;

  struct Grads {
    Vec params;  // same layout/size as the flat parameter vector
    Vec input;
  };

  // Exact reverse-mode gradients of (upstream . output) w.r.t. every
  // parameter and the input. The extra block's slots stay zero.
  Grads grad(const Cache& cache, std::span<const double> upstream) const;

 private:
  void build_offsets();

  std::vector<int> layer_sizes_;
  Activation activation_ = Activation::kTanh;
  std::vector<std::uint8_t> layer_norm_;
  int extra_dim_ = 0;
  Vec params_;
  std::vector<std::size_t> w_off_, b_off_, g_off_, s_off_;
  std::size_t extra_offset_ = 0;
};

struct AdamState {
  Vec m;
  Vec v;
  std::int64_t step_count = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;

  static AdamState like(const Vec& params) {
    AdamState s;
    s.m.assign(params.size(), 0.0);
    s.v.assign(params.size(), 0.0);
    return s;
  }
};

// Standard Adam with bias correction. Rejects non-finite gradients.
void adam_step(Vec& params, const Vec& grads, AdamState& adam, double lr);

// y = gain * (x - mean) / sqrt(var + 1e-5) + shift, population variance.
constexpr double kLayerNormEps = 1e-5;
Vec layer_norm(std::span<const double> x, std::span<const double> gain,
               std::span<const double> shift);

// Diagonal Gaussian head with state-independent log_std.
double gaussian_logprob(std::span<const double> mean, std::span<const double> log_std,
                        std::span<const double> action);
// d logprob / d mean and d logprob / d log_std.
void gaussian_logprob_grad(std::span<const double> mean, std::span<const double> log_std,
                           std::span<const double> action, std::span<double> d_mean,
                           std::span<double> d_log_std);
double gaussian_entropy(std::span<const double> log_std);

constexpr double kLogStdMin = -5.0;
constexpr double kLogStdMax = 2.0;

}  // namespace cdrl
