#include "helmnet/optim.hpp"

#include <cmath>

namespace helmnet {

std::vector<double> softmax_row(const float* logits, std::size_t n) {
  double mx = logits[0];
  for (std::size_t i = 1; i < n; ++i) mx = std::max(mx, double(logits[i]));
  std::vector<double> p(n);
  double z = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    p[i] = std::exp(logits[i] - mx);
    z += p[i];
  }
  for (std::size_t i = 0; i < n; ++i) p[i] /= z;
  return p;
}

LossOutput softmax_cross_entropy(const Tensor& logits,
                                 const std::vector<int>& labels) {
  if (logits.rank() != 2)
    throw ShapeError("softmax_cross_entropy expects [N,classes] logits");
  std::size_t N = logits.dim(0), C = logits.dim(1);
  if (labels.size() != N)
    throw ShapeError("labels length " + std::to_string(labels.size()) +
                     " vs batch " + std::to_string(N));
  LossOutput out;
  out.logit_grad = Tensor({N, C});
  double total = 0.0;
  for (std::size_t n = 0; n < N; ++n) {
    int y = labels[n];
    if (y < 0 || static_cast<std::size_t>(y) >= C)
      throw ContractError("label " + std::to_string(y) + " out of range");
    const float* row = logits.data() + n * C;
    double mx = row[0];
    for (std::size_t c = 1; c < C; ++c) mx = std::max(mx, double(row[c]));
    double z = 0.0;
    for (std::size_t c = 0; c < C; ++c) z += std::exp(row[c] - mx);
    double logz = std::log(z) + mx;
    total += logz - row[y];
    for (std::size_t c = 0; c < C; ++c) {
      double p = std::exp(row[c] - logz);
      out.logit_grad[n * C + c] = static_cast<float>(
          (p - (static_cast<std::size_t>(y) == c ? 1.0 : 0.0)) / N);
    }
  }
  out.loss = total / N;
  return out;
}

SgdMomentum::SgdMomentum(float learning_rate, float momentum)
    : lr_(learning_rate), momentum_(momentum) {
  if (momentum < 0.0f || momentum >= 1.0f)
    throw ContractError("momentum must be in [0,1)");
}

void SgdMomentum::step(Model& model) {
  for (auto& ref : model.params()) {
    if (!ref.grad) continue;  // running statistics are not optimized
    auto it = velocity_.find(ref.name);
    if (it == velocity_.end())
      it = velocity_.emplace(ref.name, Tensor(ref.value->shape())).first;
    Tensor& v = it->second;
    Tensor& w = *ref.value;
    Tensor& g = *ref.grad;
    for (std::size_t i = 0; i < w.size(); ++i) {
      v[i] = momentum_ * v[i] + g[i];
      w[i] -= lr_ * v[i];
      g[i] = 0.0f;
    }
  }
}

}  // namespace helmnet
