#pragma once

#include <map>
#include <string>
#include <vector>

#include "helmnet/model.hpp"
#include "helmnet/tensor.hpp"

namespace helmnet {

struct LossOutput {
  double loss = 0.0;   // batch mean
  Tensor logit_grad;   // [N, 2], rows sum to 0
};

// Mean softmax cross-entropy over the batch, max-subtraction for stability.
// labels: values in {0,1}, one per row of logits.
LossOutput softmax_cross_entropy(const Tensor& logits,
                                 const std::vector<int>& labels);

// Numerically stable softmax of one logit row (used by predict).
std::vector<double> softmax_row(const float* logits, std::size_t n);

// Heavy-ball momentum: v <- mu*v + g, w <- w - lr*v, grads zeroed after.
class SgdMomentum {
 public:
  SgdMomentum(float learning_rate, float momentum);

  void step(Model& model);

  float learning_rate() const { return lr_; }
  float momentum() const { return momentum_; }

  // Velocity tensors keyed by parameter name, for checkpointing.
  std::map<std::string, Tensor>& velocities() { return velocity_; }

 private:
  float lr_, momentum_;
  std::map<std::string, Tensor> velocity_;
};

}  // namespace helmnet
