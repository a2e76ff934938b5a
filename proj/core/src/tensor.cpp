#include "helmnet/tensor.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace helmnet {

namespace {

std::string shape_str(const std::vector<std::size_t>& s) {
  std::ostringstream os;
  os << "[";
  for (std::size_t i = 0; i < s.size(); ++i) os << (i ? "," : "") << s[i];
  os << "]";
  return os.str();
}

std::size_t checked_product(const std::vector<std::size_t>& shape) {
  if (shape.empty()) throw ShapeError("tensor shape must be non-empty");
  std::size_t n = 1;
  for (std::size_t d : shape) {
    if (d == 0)
      throw ShapeError("tensor dims must be >= 1, got shape " + shape_str(shape));
    n *= d;
  }
  return n;
}

}  // namespace

Tensor::Tensor(std::vector<std::size_t> shape, float fill)
    : shape_(std::move(shape)), data_(checked_product(shape_), fill) {}

Tensor Tensor::from(std::vector<std::size_t> shape, std::vector<float> data) {
  std::size_t n = checked_product(shape);
  if (n != data.size())
    throw ShapeError("data length " + std::to_string(data.size()) +
                     " does not match shape " + shape_str(shape));
  Tensor t;
  t.shape_ = std::move(shape);
  t.data_ = std::move(data);
  return t;
}

float& Tensor::at(std::initializer_list<std::size_t> idx) {
  return data_[flat_index(shape_, std::vector<std::size_t>(idx))];
}

float Tensor::at(std::initializer_list<std::size_t> idx) const {
  return data_[flat_index(shape_, std::vector<std::size_t>(idx))];
}

Tensor Tensor::reshaped(std::vector<std::size_t> shape) const {
  if (checked_product(shape) != size())
    throw ShapeError("reshape " + shape_str(shape_) + " -> " + shape_str(shape) +
                     " changes element count");
  Tensor t;
  t.shape_ = std::move(shape);
  t.data_ = data_;
  return t;
}

void Tensor::check_finite(const char* what) const {
  for (float v : data_)
    if (!std::isfinite(v))
      throw NumericError(std::string("non-finite value in ") + what);
}

std::size_t flat_index(const std::vector<std::size_t>& shape,
                       const std::vector<std::size_t>& idx) {
  if (idx.size() != shape.size())
    throw ShapeError("index rank " + std::to_string(idx.size()) +
                     " vs tensor rank " + std::to_string(shape.size()));
  std::size_t flat = 0;
  for (std::size_t k = 0; k < shape.size(); ++k) {
    if (idx[k] >= shape[k]) throw ShapeError("index out of range");
    flat = flat * shape[k] + idx[k];
  }
  return flat;
}

std::vector<std::size_t> multi_index(const std::vector<std::size_t>& shape,
                                     std::size_t flat) {
  std::vector<std::size_t> idx(shape.size());
  for (std::size_t k = shape.size(); k-- > 0;) {
    idx[k] = flat % shape[k];
    flat /= shape[k];
  }
  return idx;
}

Tensor elementwise(const Tensor& a, const Tensor& b, EwOp op) {
  if (!a.same_shape(b))
    throw ShapeError("elementwise shape mismatch " + shape_str(a.shape()) +
                     " vs " + shape_str(b.shape()));
  Tensor out(a.shape());
  const float* pa = a.data();
  const float* pb = b.data();
  float* po = out.data();
  std::size_t n = a.size();
  switch (op) {
    case EwOp::kAdd:
      for (std::size_t i = 0; i < n; ++i) po[i] = pa[i] + pb[i];
      break;
    case EwOp::kSub:
      for (std::size_t i = 0; i < n; ++i) po[i] = pa[i] - pb[i];
      break;
    case EwOp::kMul:
      for (std::size_t i = 0; i < n; ++i) po[i] = pa[i] * pb[i];
      break;
  }
  return out;
}

Tensor matmul(const Tensor& a, const Tensor& b) {
  if (a.rank() != 2 || b.rank() != 2)
    throw ShapeError("matmul requires rank-2 operands");
  std::size_t m = a.dim(0), k = a.dim(1), k2 = b.dim(0), n = b.dim(1);
  if (k != k2)
    throw ShapeError("matmul inner dims " + std::to_string(k) + " vs " +
                     std::to_string(k2));
  Tensor out({m, n});
  const float* pa = a.data();
  const float* pb = b.data();
  float* po = out.data();
  std::vector<double> row(n);
  for (std::size_t i = 0; i < m; ++i) {
    std::fill(row.begin(), row.end(), 0.0);
    for (std::size_t p = 0; p < k; ++p) {
      double av = pa[i * k + p];
      const float* brow = pb + p * n;
      for (std::size_t j = 0; j < n; ++j) row[j] += av * brow[j];
    }
    for (std::size_t j = 0; j < n; ++j) po[i * n + j] = static_cast<float>(row[j]);
  }
  return out;
}

Tensor reduce(const Tensor& a, ReduceOp op, std::optional<std::size_t> axis) {
  if (!axis) {
    double acc = (op == ReduceOp::kMax)
                     ? -std::numeric_limits<double>::infinity()
                     : 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (op == ReduceOp::kMax)
        acc = std::max(acc, static_cast<double>(a[i]));
      else
        acc += a[i];
    }
    if (op == ReduceOp::kMean) acc /= static_cast<double>(a.size());
    return Tensor::from({1}, {static_cast<float>(acc)});
  }

  std::size_t ax = *axis;
  if (ax >= a.rank())
    throw ShapeError("reduce axis " + std::to_string(ax) + " out of range for rank " +
                     std::to_string(a.rank()));
  std::size_t outer = 1, inner = 1, mid = a.dim(ax);
  for (std::size_t i = 0; i < ax; ++i) outer *= a.dim(i);
  for (std::size_t i = ax + 1; i < a.rank(); ++i) inner *= a.dim(i);

  std::vector<std::size_t> out_shape;
  for (std::size_t i = 0; i < a.rank(); ++i)
    if (i != ax) out_shape.push_back(a.dim(i));
  if (out_shape.empty()) out_shape.push_back(1);

  Tensor out(out_shape);
  const float* pa = a.data();
  float* po = out.data();
  for (std::size_t o = 0; o < outer; ++o) {
    for (std::size_t in = 0; in < inner; ++in) {
      double acc = (op == ReduceOp::kMax)
                       ? -std::numeric_limits<double>::infinity()
                       : 0.0;
      for (std::size_t m = 0; m < mid; ++m) {
        double v = pa[(o * mid + m) * inner + in];
        if (op == ReduceOp::kMax)
          acc = std::max(acc, v);
        else
          acc += v;
      }
      if (op == ReduceOp::kMean) acc /= static_cast<double>(mid);
      po[o * inner + in] = static_cast<float>(acc);
    }
  }
  return out;
}

}  // namespace helmnet
