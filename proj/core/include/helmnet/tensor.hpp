#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "helmnet/common.hpp"

namespace helmnet {

// Dense rank-N float32 array, row-major (last index fastest). No views, no
// broadcasting; shapes must agree exactly everywhere. Reductions and matmul
// accumulate in double.
class Tensor {
 public:
  Tensor() = default;  // empty sentinel; not a valid operand

  // Zero-filled (or fill-valued) tensor. Every dim must be >= 1.
  explicit Tensor(std::vector<std::size_t> shape, float fill = 0.0f);

  static Tensor from(std::vector<std::size_t> shape, std::vector<float> data);

  const std::vector<std::size_t>& shape() const { return shape_; }
  std::size_t rank() const { return shape_.size(); }
  std::size_t dim(std::size_t i) const { return shape_[i]; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  float* data() { return data_.data(); }
  const float* data() const { return data_.data(); }
  float& operator[](std::size_t i) { return data_[i]; }
  float operator[](std::size_t i) const { return data_[i]; }

  const std::vector<float>& values() const { return data_; }

  // Multi-index access for tests and low-rate paths; hot loops index flat.
  float& at(std::initializer_list<std::size_t> idx);
  float at(std::initializer_list<std::size_t> idx) const;

  // Same data, new shape; element counts must match.
  Tensor reshaped(std::vector<std::size_t> shape) const;

  bool same_shape(const Tensor& other) const { return shape_ == other.shape_; }

  // Throws NumericError naming `what` if any element is NaN/Inf.
  void check_finite(const char* what) const;

 private:
  std::vector<std::size_t> shape_;
  std::vector<float> data_;
};

std::size_t flat_index(const std::vector<std::size_t>& shape,
                       const std::vector<std::size_t>& idx);
std::vector<std::size_t> multi_index(const std::vector<std::size_t>& shape,
                                     std::size_t flat);

enum class EwOp { kAdd, kSub, kMul };
Tensor elementwise(const Tensor& a, const Tensor& b, EwOp op);
inline Tensor add(const Tensor& a, const Tensor& b) { return elementwise(a, b, EwOp::kAdd); }
inline Tensor sub(const Tensor& a, const Tensor& b) { return elementwise(a, b, EwOp::kSub); }
inline Tensor mul(const Tensor& a, const Tensor& b) { return elementwise(a, b, EwOp::kMul); }

// [m,k] x [k,n] -> [m,n], double accumulators.
Tensor matmul(const Tensor& a, const Tensor& b);

enum class ReduceOp { kSum, kMean, kMax };
// Full reduction (no axis) yields a rank-1 tensor of length 1. With an axis,
// that axis is removed (rank-1 input reduces to rank-1 length-1).
Tensor reduce(const Tensor& a, ReduceOp op, std::optional<std::size_t> axis = {});

}  // namespace helmnet
