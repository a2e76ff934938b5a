#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "helmnet/tensor.hpp"

namespace helmnet {

// ---------------------------------------------------------------------------
// Per-sample kernels. Inputs are [C,H,W]; convolution is 3x3, stride 1,
// valid padding (output H-2 x W-2), max-pool is 2x2 stride 2 with the
// trailing odd row/column dropped. These are the units the oracle tests hit;
// the Layer classes below batch them.
// ---------------------------------------------------------------------------

// bias may be null (conv without a bias term).
Tensor conv2d_forward(const Tensor& input, const Tensor& weights,
                      const Tensor* bias);

// Returns grad_input and accumulates into weight_grad / bias_grad
// (bias_grad null when the layer has no bias).
Tensor conv2d_backward(const Tensor& input, const Tensor& weights,
                       const Tensor& grad_out, Tensor& weight_grad,
                       Tensor* bias_grad);

struct PoolResult {
  Tensor output;                      // [C, H/2, W/2]
  std::vector<std::uint32_t> argmax;  // flat index into the input per output
  std::vector<std::size_t> input_shape;
};

// Ties inside a window break toward the smallest flat index.
PoolResult maxpool2x2_forward(const Tensor& input);
Tensor maxpool2x2_backward(const PoolResult& cache, const Tensor& grad_out);

Tensor relu_forward(const Tensor& input);
// Gradient at exactly 0 is 0.
Tensor relu_backward(const Tensor& input, const Tensor& grad_out);

// ---------------------------------------------------------------------------
// Batched layers. forward takes [N, ...]; each layer caches what its own
// backward needs, so one model instance is single-threaded by contract.
// ---------------------------------------------------------------------------

struct ParamRef {
  std::string name;
  Tensor* value = nullptr;
  Tensor* grad = nullptr;  // null for running statistics (saved, not trained)
};

// Shared by every dropout layer of one model: masks are a pure function of
// (run_seed, layer_index, step), so results do not depend on evaluation order.
struct StreamContext {
  std::uint64_t run_seed = 0;
  std::uint64_t step = 0;
};

class Layer {
 public:
  virtual ~Layer() = default;
  virtual Tensor forward(const Tensor& x, Mode mode) = 0;
  virtual Tensor backward(const Tensor& grad_out) = 0;
  virtual void collect_params(const std::string& prefix,
                              std::vector<ParamRef>& out) {}
  virtual std::size_t param_count() const { return 0; }
  virtual std::string kind() const = 0;
};

class Conv2d : public Layer {
 public:
  Conv2d(std::size_t in_ch, std::size_t out_ch, bool with_bias);

  Tensor forward(const Tensor& x, Mode mode) override;  // [N,C,H,W]
  Tensor backward(const Tensor& grad_out) override;
  void collect_params(const std::string& prefix,
                      std::vector<ParamRef>& out) override;
  std::size_t param_count() const override;
  std::string kind() const override { return "Conv2d"; }

  std::size_t in_channels() const { return in_ch_; }
  std::size_t out_channels() const { return out_ch_; }
  bool has_bias() const { return with_bias_; }

  Tensor weights;  // [out_ch, in_ch, 3, 3]
  Tensor bias;     // [out_ch], empty when !with_bias_
  Tensor weight_grad;
  Tensor bias_grad;

 private:
  std::size_t in_ch_, out_ch_;
  bool with_bias_;
  Tensor cached_input_;
};

class MaxPool2x2 : public Layer {
 public:
  Tensor forward(const Tensor& x, Mode mode) override;
  Tensor backward(const Tensor& grad_out) override;
  std::string kind() const override { return "MaxPool2d"; }

 private:
  std::vector<PoolResult> caches_;  // one per sample
  std::vector<std::size_t> batch_shape_;
};

class ReLU : public Layer {
 public:
  Tensor forward(const Tensor& x, Mode mode) override;
  Tensor backward(const Tensor& grad_out) override;
  std::string kind() const override { return "ReLU"; }

 private:
  Tensor cached_input_;
};

class BatchNorm2d : public Layer {
 public:
  explicit BatchNorm2d(std::size_t channels, float eps = 1e-5f,
                       float momentum = 0.1f);

  Tensor forward(const Tensor& x, Mode mode) override;  // [N,C,H,W]
  Tensor backward(const Tensor& grad_out) override;
  void collect_params(const std::string& prefix,
                      std::vector<ParamRef>& out) override;
  std::size_t param_count() const override { return 2 * channels_; }
  std::string kind() const override { return "BatchNorm2d"; }

  Tensor gamma, beta;                  // [C]
  Tensor gamma_grad, beta_grad;
  Tensor running_mean, running_var;    // [C]

 private:
  std::size_t channels_;
  float eps_, momentum_;
  bool train_cached_ = false;
  Tensor cached_xhat_;
  std::vector<double> cached_inv_std_;
  std::vector<std::size_t> cached_shape_;
};

class Dropout : public Layer {
 public:
  // rate in [0,1); ctx outlives the layer (owned by the model).
  Dropout(float rate, std::size_t layer_index, const StreamContext* ctx);

  Tensor forward(const Tensor& x, Mode mode) override;
  Tensor backward(const Tensor& grad_out) override;
  std::string kind() const override { return "Dropout"; }

  float rate() const { return rate_; }

 private:
  float rate_;
  std::size_t layer_index_;
  const StreamContext* ctx_;
  std::vector<std::uint8_t> mask_;  // 1 = kept
  bool has_mask_ = false;
};

class Flatten : public Layer {
 public:
  Tensor forward(const Tensor& x, Mode mode) override;  // [N,C,H,W] -> [N,CHW]
  Tensor backward(const Tensor& grad_out) override;
  std::string kind() const override { return "Flatten"; }

 private:
  std::vector<std::size_t> cached_shape_;
};

class Linear : public Layer {
 public:
  Linear(std::size_t in_features, std::size_t out_features);

  Tensor forward(const Tensor& x, Mode mode) override;  // [N,in] -> [N,out]
  Tensor backward(const Tensor& grad_out) override;
  void collect_params(const std::string& prefix,
                      std::vector<ParamRef>& out) override;
  std::size_t param_count() const override { return out_f_ * in_f_ + out_f_; }
  std::string kind() const override { return "Linear"; }

  std::size_t in_features() const { return in_f_; }
  std::size_t out_features() const { return out_f_; }

  Tensor weights;  // [out, in]
  Tensor bias;     // [out]
  Tensor weight_grad;
  Tensor bias_grad;

 private:
  std::size_t in_f_, out_f_;
  Tensor cached_input_;
};

}  // namespace helmnet
