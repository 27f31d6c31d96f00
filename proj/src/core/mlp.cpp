#include "mlp.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace cdrl {

Activation activation_from_string(const std::string& s) {
  if (s == "tanh") return Activation::kTanh;
  if (s == "relu") return Activation::kRelu;
  if (s == "identity") return Activation::kIdentity;
  throw ConfigError("algo.activation", "unknown activation '" + s + "'");
}

std::string to_string(Activation a) {
  switch (a) {
    case Activation::kTanh: return "tanh";
    case Activation::kRelu: return "relu";
    case Activation::kIdentity: return "identity";
  }
  return "tanh";
}

Mlp::Mlp(std::vector<int> layer_sizes, Activation act, std::vector<std::uint8_t> layer_norm,
         int extra_dim)
    : layer_sizes_(std::move(layer_sizes)),
      activation_(act),
      layer_norm_(std::move(layer_norm)),
      extra_dim_(extra_dim) {
  require_shape(layer_sizes_.size() >= 2, "mlp: need at least input and output layer");
  for (int n : layer_sizes_) require_shape(n > 0, "mlp: layer sizes must be positive");
  const std::size_t hidden = layer_sizes_.size() - 2;
  if (layer_norm_.empty()) layer_norm_.assign(hidden, 0);
  require_shape(layer_norm_.size() == hidden, "mlp: one layer_norm flag per hidden layer");
  require_shape(extra_dim_ >= 0, "mlp: extra block size must be non-negative");
  build_offsets();
}

void Mlp::build_offsets() {
  const int L = num_layers();
  w_off_.assign(L, 0);
  b_off_.assign(L, 0);
  g_off_.assign(L, 0);
  s_off_.assign(L, 0);
  std::size_t off = 0;
  for (int l = 0; l < L; ++l) {
    const std::size_t in = static_cast<std::size_t>(layer_sizes_[l]);
    const std::size_t out = static_cast<std::size_t>(layer_sizes_[l + 1]);
    w_off_[l] = off;
    off += out * in;
    b_off_[l] = off;
    off += out;
    if (l < L - 1 && layer_norm_[l]) {
      g_off_[l] = off;
      off += out;
      s_off_[l] = off;
      off += out;
    }
  }
  extra_offset_ = off;
  off += static_cast<std::size_t>(extra_dim_);
  params_.assign(off, 0.0);
}

std::size_t Mlp::expected_param_count(const std::vector<int>& layer_sizes,
                                      const std::vector<std::uint8_t>& layer_norm,
                                      int extra_dim) {
  std::size_t n = 0;
  for (std::size_t l = 0; l + 1 < layer_sizes.size(); ++l) {
    const std::size_t in = static_cast<std::size_t>(layer_sizes[l]);
    const std::size_t out = static_cast<std::size_t>(layer_sizes[l + 1]);
    n += out * in + out;
    if (l + 2 < layer_sizes.size() && l < layer_norm.size() && layer_norm[l]) n += 2 * out;
  }
  return n + static_cast<std::size_t>(extra_dim);
}

Mlp Mlp::init(std::vector<int> layer_sizes, Activation act,
              std::vector<std::uint8_t> layer_norm, int extra_dim, Rng& rng) {
  Mlp net(std::move(layer_sizes), act, std::move(layer_norm), extra_dim);
  const int L = net.num_layers();
  for (int l = 0; l < L; ++l) {
    const int in = net.layer_sizes_[l];
    const int out = net.layer_sizes_[l + 1];
    const double bound = std::sqrt(6.0 / (in + out));
    double* w = net.params_.data() + net.w_off_[l];
    for (int i = 0; i < out * in; ++i) w[i] = rng.uniform(-bound, bound);
    // biases stay zero
    if (l < L - 1 && net.layer_norm_[l]) {
      double* g = net.params_.data() + net.g_off_[l];
      std::fill(g, g + out, 1.0);
      // shifts stay zero
    }
  }
  // extra block stays zero (log_std 0 => sigma 1)
  return net;
}

namespace {

double apply_act(Activation a, double z) {
  switch (a) {
    case Activation::kTanh: return std::tanh(z);
    case Activation::kRelu: return z > 0.0 ? z : 0.0;
    case Activation::kIdentity: return z;
  }
  return z;
}

double act_deriv(Activation a, double z, double post) {
  switch (a) {
    case Activation::kTanh: return 1.0 - post * post;
    case Activation::kRelu: return z > 0.0 ? 1.0 : 0.0;
    case Activation::kIdentity: return 1.0;
  }
  return 1.0;
}

}  // namespace

Vec Mlp::forward(std::span<const double> input, Cache* cache) const {
  require_shape(static_cast<int>(input.size()) == input_dim(), "mlp_forward: input length mismatch");
  require_finite(input, "mlp_forward input");

  const int L = num_layers();
  if (cache) {
    cache->input.assign(input.begin(), input.end());
    cache->pre.assign(L, {});
    cache->post.assign(L, {});
    cache->norm.assign(L, {});
    cache->inv_std.assign(L, 0.0);
  }

  Vec cur(input.begin(), input.end());
  for (int l = 0; l < L; ++l) {
    const int in = layer_sizes_[l];
    const int out = layer_sizes_[l + 1];
    const double* w = params_.data() + w_off_[l];
    const double* b = params_.data() + b_off_[l];
    Vec z(out);
    for (int i = 0; i < out; ++i) {
      double acc = b[i];
      const double* row = w + static_cast<std::size_t>(i) * in;
      for (int j = 0; j < in; ++j) acc += row[j] * cur[j];
      z[i] = acc;
    }
    if (cache) cache->pre[l] = z;

    if (l == L - 1) {
      cur = std::move(z);  // linear output layer
      break;
    }

    Vec h(out);
    for (int i = 0; i < out; ++i) h[i] = apply_act(activation_, z[i]);
    if (cache) cache->post[l] = h;

    if (layer_norm_[l]) {
      double mean = 0.0;
      for (double v : h) mean += v;
      mean /= out;
      double var = 0.0;
      for (double v : h) var += (v - mean) * (v - mean);
      var /= out;
      const double inv_std = 1.0 / std::sqrt(var + kLayerNormEps);
      const double* g = params_.data() + g_off_[l];
      const double* s = params_.data() + s_off_[l];
      Vec xhat(out), y(out);
      for (int i = 0; i < out; ++i) {
        xhat[i] = (h[i] - mean) * inv_std;
        y[i] = g[i] * xhat[i] + s[i];
      }
      if (cache) {
        cache->norm[l] = xhat;
        cache->inv_std[l] = inv_std;
      }
      cur = std::move(y);
    } else {
      cur = std::move(h);
    }
  }
  return cur;
}

Mlp::Grads Mlp::grad(const Cache& cache, std::span<const double> upstream) const {
  require_shape(static_cast<int>(upstream.size()) == output_dim(),
                "mlp_grad: upstream length mismatch");
  const int L = num_layers();

  Grads out;
  out.params.assign(params_.size(), 0.0);

  Vec dz(upstream.begin(), upstream.end());  // output layer is linear
  for (int l = L - 1; l >= 0; --l) {
    const int in = layer_sizes_[l];
    const int nout = layer_sizes_[l + 1];
    // resolve this layer's input from the cache
    std::span<const double> input_span;
    Vec ln_out;
    if (l == 0) {
      input_span = cache.input;
    } else if (layer_norm_[l - 1]) {
      // reconstruct y = g*xhat + s for the previous layer
      const double* g = params_.data() + g_off_[l - 1];
      const double* s = params_.data() + s_off_[l - 1];
      const Vec& xhat = cache.norm[l - 1];
      ln_out.resize(xhat.size());
      for (std::size_t i = 0; i < xhat.size(); ++i) ln_out[i] = g[i] * xhat[i] + s[i];
      input_span = ln_out;
    } else {
      input_span = cache.post[l - 1];
    }

    double* dw = out.params.data() + w_off_[l];
    double* db = out.params.data() + b_off_[l];
    const double* w = params_.data() + w_off_[l];
    Vec din(in, 0.0);
    for (int i = 0; i < nout; ++i) {
      db[i] += dz[i];
      double* drow = dw + static_cast<std::size_t>(i) * in;
      const double* row = w + static_cast<std::size_t>(i) * in;
      for (int j = 0; j < in; ++j) {
        drow[j] += dz[i] * input_span[j];
        din[j] += row[j] * dz[i];
      }
    }
    if (l == 0) {
      out.input = std::move(din);
      break;
    }

    // din is dL/dy for the previous hidden layer; peel LN then the activation.
    const int hl = l - 1;
    const int hn = layer_sizes_[hl + 1];
    Vec dh(hn);
    if (layer_norm_[hl]) {
      const double* g = params_.data() + g_off_[hl];
      const Vec& xhat = cache.norm[hl];
      const double inv_std = cache.inv_std[hl];
      double* dg = out.params.data() + g_off_[hl];
      double* ds = out.params.data() + s_off_[hl];
      Vec dxhat(hn);
      double mean_dxhat = 0.0, mean_dxhat_xhat = 0.0;
      for (int i = 0; i < hn; ++i) {
        dg[i] += din[i] * xhat[i];
        ds[i] += din[i];
        dxhat[i] = din[i] * g[i];
        mean_dxhat += dxhat[i];
        mean_dxhat_xhat += dxhat[i] * xhat[i];
      }
      mean_dxhat /= hn;
      mean_dxhat_xhat /= hn;
      for (int i = 0; i < hn; ++i) {
        dh[i] = inv_std * (dxhat[i] - mean_dxhat - xhat[i] * mean_dxhat_xhat);
      }
    } else {
      dh = std::move(din);
    }

    dz.assign(hn, 0.0);
    const Vec& z = cache.pre[hl];
    const Vec& post = cache.post[hl];
    for (int i = 0; i < hn; ++i) dz[i] = dh[i] * act_deriv(activation_, z[i], post[i]);
  }
  return out;
}

void adam_step(Vec& params, const Vec& grads, AdamState& adam, double lr) {
  require_shape(params.size() == grads.size() && params.size() == adam.m.size() &&
                    params.size() == adam.v.size(),
                "adam_step: shape mismatch");
  if (!(lr > 0.0)) throw NumericError("adam_step: lr must be positive");
  require_finite(grads, "adam_step gradients");

  adam.step_count += 1;
  const double bc1 = 1.0 - std::pow(adam.beta1, static_cast<double>(adam.step_count));
  const double bc2 = 1.0 - std::pow(adam.beta2, static_cast<double>(adam.step_count));
  for (std::size_t i = 0; i < params.size(); ++i) {
    adam.m[i] = adam.beta1 * adam.m[i] + (1.0 - adam.beta1) * grads[i];
    adam.v[i] = adam.beta2 * adam.v[i] + (1.0 - adam.beta2) * grads[i] * grads[i];
    const double mhat = adam.m[i] / bc1;
    const double vhat = adam.v[i] / bc2;
    params[i] -= lr * mhat / (std::sqrt(vhat) + adam.eps);
  }
}

Vec layer_norm(std::span<const double> x, std::span<const double> gain,
               std::span<const double> shift) {
  require_shape(x.size() == gain.size() && x.size() == shift.size(),
                "layer_norm: length mismatch");
  const std::size_t n = x.size();
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(n);
  double var = 0.0;
  for (double v : x) var += (v - mean) * (v - mean);
  var /= static_cast<double>(n);
  const double inv_std = 1.0 / std::sqrt(var + kLayerNormEps);
  Vec y(n);
  for (std::size_t i = 0; i < n; ++i) y[i] = gain[i] * (x[i] - mean) * inv_std + shift[i];
  return y;
}

double gaussian_logprob(std::span<const double> mean, std::span<const double> log_std,
                        std::span<const double> action) {
  require_shape(mean.size() == log_std.size() && mean.size() == action.size(),
                "gaussian_logprob: dimension mismatch");
  constexpr double kLog2Pi = 1.8378770664093453;  // ln(2*pi)
  double lp = 0.0;
  for (std::size_t i = 0; i < mean.size(); ++i) {
    const double sigma = std::exp(log_std[i]);
    const double z = (action[i] - mean[i]) / sigma;
    lp += -0.5 * kLog2Pi - log_std[i] - 0.5 * z * z;
  }
  return lp;
}

void gaussian_logprob_grad(std::span<const double> mean, std::span<const double> log_std,
                           std::span<const double> action, std::span<double> d_mean,
                           std::span<double> d_log_std) {
  require_shape(mean.size() == log_std.size() && mean.size() == action.size() &&
                    mean.size() == d_mean.size() && mean.size() == d_log_std.size(),
                "gaussian_logprob_grad: dimension mismatch");
  for (std::size_t i = 0; i < mean.size(); ++i) {
    const double sigma = std::exp(log_std[i]);
    const double z = (action[i] - mean[i]) / sigma;
    d_mean[i] = z / sigma;
    d_log_std[i] = z * z - 1.0;
  }
}

double gaussian_entropy(std::span<const double> log_std) {
  constexpr double kHalfLog2PiE = 1.4189385332046727;  // 0.5*ln(2*pi*e)
  double h = 0.0;
  for (double ls : log_std) h += ls + kHalfLog2PiE;
  return h;
}

}  // namespace cdrl
