#include "helmnet/layers.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <iostream>

#include "helmnet/common.hpp"
#include "helmnet/rng.hpp"

namespace helmnet {

namespace {

constexpr std::size_t kK = 3;  // kernel side, fixed

void check_conv_input(std::size_t C, std::size_t H, std::size_t W,
                      std::size_t in_ch) {
  if (C != in_ch)
    throw ShapeError("conv2d: input has " + std::to_string(C) +
                     " channels, weights expect " + std::to_string(in_ch));
  if (H < kK || W < kK)
    throw ShapeError("conv2d: spatial dims " + std::to_string(H) + "x" +
                     std::to_string(W) + " below kernel size 3");
}

// out[o,y,x] = bias[o] + sum_{c,i,j} w[o,c,i,j] * in[c,y+i,x+j]
void conv_fwd_raw(const float* in, std::size_t C, std::size_t H, std::size_t W,
                  const float* w, const float* bias, std::size_t O,
                  float* out) {
  const std::size_t oh = H - 2, ow = W - 2;
  const std::size_t r = C * kK * kK;  // rows of the patch matrix

  // im2col: patches[c*9+i*3+j][y*ow+x] = in[c][y+i][x+j]
  std::vector<float> patches(r * oh * ow);
  for (std::size_t c = 0; c < C; ++c) {
    for (std::size_t i = 0; i < kK; ++i) {
      for (std::size_t j = 0; j < kK; ++j) {
        float* prow = patches.data() + (c * kK * kK + i * kK + j) * oh * ow;
        for (std::size_t y = 0; y < oh; ++y) {
          const float* src = in + c * H * W + (y + i) * W + j;
          std::memcpy(prow + y * ow, src, ow * sizeof(float));
        }
      }
    }
  }

  std::vector<double> acc(oh * ow);
  for (std::size_t o = 0; o < O; ++o) {
    std::fill(acc.begin(), acc.end(), bias ? static_cast<double>(bias[o]) : 0.0);
    const float* wrow = w + o * r;
    for (std::size_t p = 0; p < r; ++p) {
      double wv = wrow[p];
      const float* prow = patches.data() + p * oh * ow;
      for (std::size_t q = 0; q < oh * ow; ++q) acc[q] += wv * prow[q];
    }
    float* orow = out + o * oh * ow;
    for (std::size_t q = 0; q < oh * ow; ++q) orow[q] = static_cast<float>(acc[q]);
  }
}

// Accumulates in double into wgrad_acc [O*C*9] and bgrad_acc [O] (may be null),
// writes grad_input (float) for one sample.
void conv_bwd_raw(const float* in, std::size_t C, std::size_t H, std::size_t W,
                  const float* w, std::size_t O, const float* gout,
                  float* gin, double* wgrad_acc, double* bgrad_acc) {
  const std::size_t oh = H - 2, ow = W - 2;
  const std::size_t r = C * kK * kK;
  const std::size_t hw = oh * ow;

  std::vector<float> patches(r * hw);
  for (std::size_t c = 0; c < C; ++c)
    for (std::size_t i = 0; i < kK; ++i)
      for (std::size_t j = 0; j < kK; ++j) {
        float* prow = patches.data() + (c * kK * kK + i * kK + j) * hw;
        for (std::size_t y = 0; y < oh; ++y)
          std::memcpy(prow + y * ow, in + c * H * W + (y + i) * W + j,
                      ow * sizeof(float));
      }

  // weight grad: wgrad[o,p] += <gout[o,:], patches[p,:]>
  for (std::size_t o = 0; o < O; ++o) {
    const float* grow = gout + o * hw;
    if (bgrad_acc) {
      double b = 0.0;
      for (std::size_t q = 0; q < hw; ++q) b += grow[q];
      bgrad_acc[o] += b;
    }
    double* wrow = wgrad_acc + o * r;
    for (std::size_t p = 0; p < r; ++p) {
      const float* prow = patches.data() + p * hw;
      double s = 0.0;
      for (std::size_t q = 0; q < hw; ++q) s += grow[q] * prow[q];
      wrow[p] += s;
    }
  }

  // grad wrt patches, then col2im scatter-add into grad_input
  std::vector<double> gin_acc(C * H * W, 0.0);
  std::vector<double> gp(hw);
  for (std::size_t p = 0; p < r; ++p) {
    std::fill(gp.begin(), gp.end(), 0.0);
    for (std::size_t o = 0; o < O; ++o) {
      double wv = w[o * r + p];
      const float* grow = gout + o * hw;
      for (std::size_t q = 0; q < hw; ++q) gp[q] += wv * grow[q];
    }
    std::size_t c = p / (kK * kK), i = (p / kK) % kK, j = p % kK;
    for (std::size_t y = 0; y < oh; ++y) {
      double* dst = gin_acc.data() + c * H * W + (y + i) * W + j;
      const double* src = gp.data() + y * ow;
      for (std::size_t x = 0; x < ow; ++x) dst[x] += src[x];
    }
  }
  for (std::size_t q = 0; q < C * H * W; ++q) gin[q] = static_cast<float>(gin_acc[q]);
}

}  // namespace

// ---------------------------------------------------------------------------
// per-sample surfaces
// ---------------------------------------------------------------------------

Tensor conv2d_forward(const Tensor& input, const Tensor& weights,
                      const Tensor* bias) {
  if (input.rank() != 3) throw ShapeError("conv2d_forward expects [C,H,W]");
  if (weights.rank() != 4 || weights.dim(2) != kK || weights.dim(3) != kK)
    throw ShapeError("conv2d weights must be [O,C,3,3]");
  std::size_t C = input.dim(0), H = input.dim(1), W = input.dim(2);
  std::size_t O = weights.dim(0);
  check_conv_input(C, H, W, weights.dim(1));
  Tensor out({O, H - 2, W - 2});
  conv_fwd_raw(input.data(), C, H, W, weights.data(),
               bias ? bias->data() : nullptr, O, out.data());
  return out;
}

Tensor conv2d_backward(const Tensor& input, const Tensor& weights,
                       const Tensor& grad_out, Tensor& weight_grad,
                       Tensor* bias_grad) {
  std::size_t C = input.dim(0), H = input.dim(1), W = input.dim(2);
  std::size_t O = weights.dim(0);
  check_conv_input(C, H, W, weights.dim(1));
  if (grad_out.shape() != std::vector<std::size_t>{O, H - 2, W - 2})
    throw ShapeError("conv2d_backward: grad_out shape mismatch");
  if (!weight_grad.same_shape(weights))
    throw ShapeError("conv2d_backward: weight_grad shape mismatch");

  std::vector<double> wacc(weights.size(), 0.0);
  std::vector<double> bacc(O, 0.0);
  Tensor gin(input.shape());
  conv_bwd_raw(input.data(), C, H, W, weights.data(), O, grad_out.data(),
               gin.data(), wacc.data(), bias_grad ? bacc.data() : nullptr);
  for (std::size_t i = 0; i < wacc.size(); ++i)
    weight_grad[i] = static_cast<float>(weight_grad[i] + wacc[i]);
  if (bias_grad)
    for (std::size_t o = 0; o < O; ++o)
      (*bias_grad)[o] = static_cast<float>((*bias_grad)[o] + bacc[o]);
  return gin;
}

PoolResult maxpool2x2_forward(const Tensor& input) {
  if (input.rank() != 3) throw ShapeError("maxpool2x2 expects [C,H,W]");
  std::size_t C = input.dim(0), H = input.dim(1), W = input.dim(2);
  if (H < 2 || W < 2)
    throw ShapeError("maxpool2x2: spatial dims must be >= 2");
  std::size_t oh = H / 2, ow = W / 2;
  PoolResult res;
  res.output = Tensor({C, oh, ow});
  res.argmax.resize(C * oh * ow);
  res.input_shape = input.shape();
  const float* in = input.data();
  float* out = res.output.data();
  for (std::size_t c = 0; c < C; ++c)
    for (std::size_t y = 0; y < oh; ++y)
      for (std::size_t x = 0; x < ow; ++x) {
        std::size_t base = c * H * W + 2 * y * W + 2 * x;
        std::size_t cand[4] = {base, base + 1, base + W, base + W + 1};
        std::size_t best = cand[0];
        for (int k = 1; k < 4; ++k)
          if (in[cand[k]] > in[best]) best = cand[k];  // strict: ties keep first
        std::size_t oi = c * oh * ow + y * ow + x;
        out[oi] = in[best];
        res.argmax[oi] = static_cast<std::uint32_t>(best);
      }
  return res;
}

Tensor maxpool2x2_backward(const PoolResult& cache, const Tensor& grad_out) {
  if (!grad_out.same_shape(cache.output))
    throw ShapeError("maxpool2x2_backward: stale indices (shape mismatch)");
  Tensor gin(cache.input_shape);  // zero-filled; dropped rows/cols stay zero
  for (std::size_t i = 0; i < grad_out.size(); ++i)
    gin[cache.argmax[i]] += grad_out[i];
  return gin;
}

Tensor relu_forward(const Tensor& input) {
  Tensor out(input.shape());
  for (std::size_t i = 0; i < input.size(); ++i)
    out[i] = input[i] > 0.0f ? input[i] : 0.0f;
  return out;
}

Tensor relu_backward(const Tensor& input, const Tensor& grad_out) {
  if (!input.same_shape(grad_out))
    throw ShapeError("relu_backward shape mismatch");
  Tensor gin(input.shape());
  for (std::size_t i = 0; i < input.size(); ++i)
    gin[i] = input[i] > 0.0f ? grad_out[i] : 0.0f;
  return gin;
}

// ---------------------------------------------------------------------------
// Conv2d layer (batched)
// ---------------------------------------------------------------------------

Conv2d::Conv2d(std::size_t in_ch, std::size_t out_ch, bool with_bias)
    : in_ch_(in_ch), out_ch_(out_ch), with_bias_(with_bias) {
  weights = Tensor({out_ch, in_ch, kK, kK});
  weight_grad = Tensor({out_ch, in_ch, kK, kK});
  if (with_bias) {
    bias = Tensor({out_ch});
    bias_grad = Tensor({out_ch});
  }
}

std::size_t Conv2d::param_count() const {
  return out_ch_ * in_ch_ * kK * kK + (with_bias_ ? out_ch_ : 0);
}

void Conv2d::collect_params(const std::string& prefix,
                            std::vector<ParamRef>& out) {
  out.push_back({prefix + ".weight", &weights, &weight_grad});
  if (with_bias_) out.push_back({prefix + ".bias", &bias, &bias_grad});
}

Tensor Conv2d::forward(const Tensor& x, Mode) {
  if (x.rank() != 4) throw ShapeError("Conv2d expects [N,C,H,W]");
  std::size_t N = x.dim(0), C = x.dim(1), H = x.dim(2), W = x.dim(3);
  check_conv_input(C, H, W, in_ch_);
  cached_input_ = x;
  Tensor out({N, out_ch_, H - 2, W - 2});
  std::size_t in_sz = C * H * W, out_sz = out_ch_ * (H - 2) * (W - 2);
  const float* bp = with_bias_ ? bias.data() : nullptr;
  parallel_for(N, [&](std::size_t n) {
    conv_fwd_raw(x.data() + n * in_sz, C, H, W, weights.data(), bp, out_ch_,
                 out.data() + n * out_sz);
  });
  return out;
}

Tensor Conv2d::backward(const Tensor& grad_out) {
  if (cached_input_.empty()) throw ContractError("Conv2d: no cached forward");
  const Tensor& x = cached_input_;
  std::size_t N = x.dim(0), C = x.dim(1), H = x.dim(2), W = x.dim(3);
  std::size_t in_sz = C * H * W, out_sz = out_ch_ * (H - 2) * (W - 2);
  if (grad_out.shape() != std::vector<std::size_t>{N, out_ch_, H - 2, W - 2})
    throw ShapeError("Conv2d backward: grad_out shape mismatch");

  Tensor gin(x.shape());
  // Per-sample scratch, reduced serially in sample order: deterministic for
  // any thread count.
  std::vector<std::vector<double>> wacc(N);
  std::vector<std::vector<double>> bacc(N);
  parallel_for(N, [&](std::size_t n) {
    wacc[n].assign(weights.size(), 0.0);
    if (with_bias_) bacc[n].assign(out_ch_, 0.0);
    conv_bwd_raw(x.data() + n * in_sz, C, H, W, weights.data(), out_ch_,
                 grad_out.data() + n * out_sz, gin.data() + n * in_sz,
                 wacc[n].data(), with_bias_ ? bacc[n].data() : nullptr);
  });
  for (std::size_t i = 0; i < weights.size(); ++i) {
    double s = weight_grad[i];
    for (std::size_t n = 0; n < N; ++n) s += wacc[n][i];
    weight_grad[i] = static_cast<float>(s);
  }
  if (with_bias_)
    for (std::size_t o = 0; o < out_ch_; ++o) {
      double s = bias_grad[o];
      for (std::size_t n = 0; n < N; ++n) s += bacc[n][o];
      bias_grad[o] = static_cast<float>(s);
    }
  cached_input_ = Tensor();
  return gin;
}

// ---------------------------------------------------------------------------
// MaxPool2x2 layer
// ---------------------------------------------------------------------------

Tensor MaxPool2x2::forward(const Tensor& x, Mode) {
  if (x.rank() != 4) throw ShapeError("MaxPool2d expects [N,C,H,W]");
  std::size_t N = x.dim(0), C = x.dim(1), H = x.dim(2), W = x.dim(3);
  if (H < 2 || W < 2) throw ShapeError("MaxPool2d: spatial dims must be >= 2");
  batch_shape_ = x.shape();
  caches_.assign(N, PoolResult{});
  Tensor out({N, C, H / 2, W / 2});
  std::size_t in_sz = C * H * W, out_sz = C * (H / 2) * (W / 2);
  parallel_for(N, [&](std::size_t n) {
    Tensor sample = Tensor::from(
        {C, H, W}, std::vector<float>(x.data() + n * in_sz,
                                      x.data() + (n + 1) * in_sz));
    caches_[n] = maxpool2x2_forward(sample);
    std::memcpy(out.data() + n * out_sz, caches_[n].output.data(),
                out_sz * sizeof(float));
  });
  return out;
}

Tensor MaxPool2x2::backward(const Tensor& grad_out) {
  if (caches_.empty()) throw ContractError("MaxPool2d: no cached forward");
  std::size_t N = batch_shape_[0], C = batch_shape_[1], H = batch_shape_[2],
              W = batch_shape_[3];
  std::size_t out_sz = C * (H / 2) * (W / 2), in_sz = C * H * W;
  if (grad_out.shape() != std::vector<std::size_t>{N, C, H / 2, W / 2})
    throw ShapeError("MaxPool2d backward: grad_out shape mismatch");
  Tensor gin(batch_shape_);
  parallel_for(N, [&](std::size_t n) {
    Tensor g = Tensor::from(
        {C, H / 2, W / 2},
        std::vector<float>(grad_out.data() + n * out_sz,
                           grad_out.data() + (n + 1) * out_sz));
    Tensor s = maxpool2x2_backward(caches_[n], g);
    std::memcpy(gin.data() + n * in_sz, s.data(), in_sz * sizeof(float));
  });
  caches_.clear();
  return gin;
}

// ---------------------------------------------------------------------------
// ReLU layer
// ---------------------------------------------------------------------------

Tensor ReLU::forward(const Tensor& x, Mode) {
  cached_input_ = x;
  return relu_forward(x);
}

Tensor ReLU::backward(const Tensor& grad_out) {
  if (cached_input_.empty()) throw ContractError("ReLU: no cached forward");
  Tensor gin = relu_backward(cached_input_, grad_out);
  cached_input_ = Tensor();
  return gin;
}

// ---------------------------------------------------------------------------
// BatchNorm2d layer
// ---------------------------------------------------------------------------

BatchNorm2d::BatchNorm2d(std::size_t channels, float eps, float momentum)
    : channels_(channels), eps_(eps), momentum_(momentum) {
  gamma = Tensor({channels}, 1.0f);
  beta = Tensor({channels});
  gamma_grad = Tensor({channels});
  beta_grad = Tensor({channels});
  running_mean = Tensor({channels});
  running_var = Tensor({channels}, 1.0f);  // identity transform before training
}

void BatchNorm2d::collect_params(const std::string& prefix,
                                 std::vector<ParamRef>& out) {
  out.push_back({prefix + ".gamma", &gamma, &gamma_grad});
  out.push_back({prefix + ".beta", &beta, &beta_grad});
  out.push_back({prefix + ".running_mean", &running_mean, nullptr});
  out.push_back({prefix + ".running_var", &running_var, nullptr});
}

Tensor BatchNorm2d::forward(const Tensor& x, Mode mode) {
  if (x.rank() != 4) throw ShapeError("BatchNorm2d expects [N,C,H,W]");
  std::size_t N = x.dim(0), C = x.dim(1), H = x.dim(2), W = x.dim(3);
  if (C != channels_)
    throw ShapeError("BatchNorm2d: channel count " + std::to_string(C) +
                     " vs params " + std::to_string(channels_));
  std::size_t hw = H * W;
  Tensor out(x.shape());

  if (mode == Mode::kEval) {
    train_cached_ = false;
    parallel_for(C, [&](std::size_t c) {
      float inv = 1.0f / std::sqrt(running_var[c] + eps_);
      float g = gamma[c], b = beta[c], m = running_mean[c];
      for (std::size_t n = 0; n < N; ++n) {
        const float* src = x.data() + (n * C + c) * hw;
        float* dst = out.data() + (n * C + c) * hw;
        for (std::size_t q = 0; q < hw; ++q) dst[q] = g * (src[q] - m) * inv + b;
      }
    });
    return out;
  }

  if (N < 2) {
    static bool warned = false;
    if (!warned) {
      std::cerr << "warning: BatchNorm2d train-mode batch of size 1; "
                   "statistics computed over spatial positions only\n";
      warned = true;
    }
  }

  cached_shape_ = x.shape();
  cached_xhat_ = Tensor(x.shape());
  cached_inv_std_.assign(C, 0.0);
  std::size_t count = N * hw;
  parallel_for(C, [&](std::size_t c) {
    double sum = 0.0, sq = 0.0;
    for (std::size_t n = 0; n < N; ++n) {
      const float* src = x.data() + (n * C + c) * hw;
      for (std::size_t q = 0; q < hw; ++q) {
        sum += src[q];
        sq += static_cast<double>(src[q]) * src[q];
      }
    }
    double mean = sum / count;
    double var = sq / count - mean * mean;  // biased
    if (var < 0.0) var = 0.0;
    double inv = 1.0 / std::sqrt(var + eps_);
    cached_inv_std_[c] = inv;
    float g = gamma[c], b = beta[c];
    for (std::size_t n = 0; n < N; ++n) {
      const float* src = x.data() + (n * C + c) * hw;
      float* xh = cached_xhat_.data() + (n * C + c) * hw;
      float* dst = out.data() + (n * C + c) * hw;
      for (std::size_t q = 0; q < hw; ++q) {
        xh[q] = static_cast<float>((src[q] - mean) * inv);
        dst[q] = g * xh[q] + b;
      }
    }
    running_mean[c] = static_cast<float>((1.0 - momentum_) * running_mean[c] +
                                         momentum_ * mean);
    running_var[c] = static_cast<float>((1.0 - momentum_) * running_var[c] +
                                        momentum_ * var);
  });
  train_cached_ = true;
  return out;
}

Tensor BatchNorm2d::backward(const Tensor& grad_out) {
  if (!train_cached_)
    throw ContractError("BatchNorm2d backward without train-mode forward");
  if (grad_out.shape() != cached_shape_)
    throw ShapeError("BatchNorm2d backward: grad_out shape mismatch");
  std::size_t N = cached_shape_[0], C = cached_shape_[1],
              hw = cached_shape_[2] * cached_shape_[3];
  std::size_t count = N * hw;
  Tensor gin(cached_shape_);
  parallel_for(C, [&](std::size_t c) {
    double sum_dy = 0.0, sum_dy_xhat = 0.0;
    for (std::size_t n = 0; n < N; ++n) {
      const float* gy = grad_out.data() + (n * C + c) * hw;
      const float* xh = cached_xhat_.data() + (n * C + c) * hw;
      for (std::size_t q = 0; q < hw; ++q) {
        sum_dy += gy[q];
        sum_dy_xhat += static_cast<double>(gy[q]) * xh[q];
      }
    }
    double g = gamma[c], inv = cached_inv_std_[c];
    double scale = g * inv / count;
    for (std::size_t n = 0; n < N; ++n) {
      const float* gy = grad_out.data() + (n * C + c) * hw;
      const float* xh = cached_xhat_.data() + (n * C + c) * hw;
      float* gi = gin.data() + (n * C + c) * hw;
      for (std::size_t q = 0; q < hw; ++q)
        gi[q] = static_cast<float>(
            scale * (count * gy[q] - sum_dy - xh[q] * sum_dy_xhat));
    }
    gamma_grad[c] = static_cast<float>(gamma_grad[c] + sum_dy_xhat);
    beta_grad[c] = static_cast<float>(beta_grad[c] + sum_dy);
  });
  train_cached_ = false;
  return gin;
}

// ---------------------------------------------------------------------------
// Dropout layer
// ---------------------------------------------------------------------------

Dropout::Dropout(float rate, std::size_t layer_index, const StreamContext* ctx)
    : rate_(rate), layer_index_(layer_index), ctx_(ctx) {
  if (rate < 0.0f || rate >= 1.0f)
    throw ContractError("dropout rate must be in [0,1), got " +
                        std::to_string(rate));
}

Tensor Dropout::forward(const Tensor& x, Mode mode) {
  if (mode == Mode::kEval) {
    has_mask_ = false;
    return x;  // identity, bitwise
  }
  mask_.assign(x.size(), 1);
  has_mask_ = true;
  if (rate_ == 0.0f) return x;
  float scale = 1.0f / (1.0f - rate_);
  Tensor out(x.shape());
  const std::uint64_t seed = ctx_->run_seed;
  const std::uint64_t step = ctx_->step;
  const std::uint64_t li = layer_index_;
  parallel_for(x.size(), [&](std::size_t i) {
    bool keep = counter_uniform(seed, li, step, i) >= rate_;
    mask_[i] = keep ? 1 : 0;
    out[i] = keep ? x[i] * scale : 0.0f;
  });
  return out;
}

Tensor Dropout::backward(const Tensor& grad_out) {
  if (!has_mask_) throw ContractError("Dropout backward without cached mask");
  if (grad_out.size() != mask_.size())
    throw ShapeError("Dropout backward: grad_out shape mismatch");
  if (rate_ == 0.0f) {
    has_mask_ = false;
    return grad_out;
  }
  float scale = 1.0f / (1.0f - rate_);
  Tensor gin(grad_out.shape());
  for (std::size_t i = 0; i < grad_out.size(); ++i)
    gin[i] = mask_[i] ? grad_out[i] * scale : 0.0f;
  has_mask_ = false;
  return gin;
}

// ---------------------------------------------------------------------------
// Flatten layer
// ---------------------------------------------------------------------------

Tensor Flatten::forward(const Tensor& x, Mode) {
  if (x.rank() != 4) throw ShapeError("Flatten expects [N,C,H,W]");
  cached_shape_ = x.shape();
  return x.reshaped({x.dim(0), x.dim(1) * x.dim(2) * x.dim(3)});
}

Tensor Flatten::backward(const Tensor& grad_out) {
  if (cached_shape_.empty()) throw ContractError("Flatten: no cached forward");
  Tensor gin = grad_out.reshaped(cached_shape_);
  cached_shape_.clear();
  return gin;
}

// ---------------------------------------------------------------------------
// Linear layer
// ---------------------------------------------------------------------------

Linear::Linear(std::size_t in_features, std::size_t out_features)
    : in_f_(in_features), out_f_(out_features) {
  weights = Tensor({out_features, in_features});
  bias = Tensor({out_features});
  weight_grad = Tensor({out_features, in_features});
  bias_grad = Tensor({out_features});
}

void Linear::collect_params(const std::string& prefix,
                            std::vector<ParamRef>& out) {
  out.push_back({prefix + ".weight", &weights, &weight_grad});
  out.push_back({prefix + ".bias", &bias, &bias_grad});
}

Tensor Linear::forward(const Tensor& x, Mode) {
  if (x.rank() != 2 || x.dim(1) != in_f_)
    throw ShapeError("Linear expects [N," + std::to_string(in_f_) + "]");
  cached_input_ = x;
  std::size_t N = x.dim(0);
  Tensor out({N, out_f_});
  parallel_for(N, [&](std::size_t n) {
    const float* xi = x.data() + n * in_f_;
    float* oi = out.data() + n * out_f_;
    for (std::size_t o = 0; o < out_f_; ++o) {
      const float* wo = weights.data() + o * in_f_;
      double acc = bias[o];
      for (std::size_t k = 0; k < in_f_; ++k) acc += double(xi[k]) * wo[k];
      oi[o] = static_cast<float>(acc);
    }
  });
  return out;
}

Tensor Linear::backward(const Tensor& grad_out) {
  if (cached_input_.empty()) throw ContractError("Linear: no cached forward");
  const Tensor& x = cached_input_;
  std::size_t N = x.dim(0);
  if (grad_out.shape() != std::vector<std::size_t>{N, out_f_})
    throw ShapeError("Linear backward: grad_out shape mismatch");

  Tensor gin({N, in_f_});
  parallel_for(N, [&](std::size_t n) {
    const float* gn = grad_out.data() + n * out_f_;
    std::vector<double> acc(in_f_, 0.0);
    for (std::size_t o = 0; o < out_f_; ++o) {
      double g = gn[o];
      if (g == 0.0) continue;
      const float* wo = weights.data() + o * in_f_;
      for (std::size_t k = 0; k < in_f_; ++k) acc[k] += g * wo[k];
    }
    float* gi = gin.data() + n * in_f_;
    for (std::size_t k = 0; k < in_f_; ++k) gi[k] = static_cast<float>(acc[k]);
  });

  parallel_for(out_f_, [&](std::size_t o) {
    std::vector<double> acc(in_f_, 0.0);
    double bacc = 0.0;
    for (std::size_t n = 0; n < N; ++n) {
      double g = grad_out[n * out_f_ + o];
      bacc += g;
      const float* xi = x.data() + n * in_f_;
      for (std::size_t k = 0; k < in_f_; ++k) acc[k] += g * xi[k];
    }
    float* wg = weight_grad.data() + o * in_f_;
    for (std::size_t k = 0; k < in_f_; ++k)
      wg[k] = static_cast<float>(wg[k] + acc[k]);
    bias_grad[o] = static_cast<float>(bias_grad[o] + bacc);
  });

  cached_input_ = Tensor();
  return gin;
}

}  // namespace helmnet
