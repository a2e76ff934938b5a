#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "helmnet/layers.hpp"

namespace helmnet {

enum class Variant { kInitial, kModified, kFinal };

std::string variant_name(Variant v);
Variant parse_variant(const std::string& s);  // throws ContractError

struct ModelConfig {
  Variant variant = Variant::kFinal;
  bool use_batchnorm = false;
  float dropout_rate = 0.0f;  // 0 disables
  std::size_t input_size = 224;  // square input, 3 channels
  std::uint64_t init_seed = 0;
};

struct SummaryRow {
  std::string layer;
  std::string output_shape;
  std::optional<std::size_t> params;  // rows like ReLU carry none
  std::string note;                   // deviation notes vs the published table
};

class Model {
 public:
  explicit Model(const ModelConfig& config);

  const ModelConfig& config() const { return config_; }

  // batch: [N, 3, S, S]. Train mode advances the dropout stream counter.
  Tensor forward(const Tensor& batch, Mode mode);

  // Must directly follow a train-mode forward. loss_grad: [N, num_classes].
  void backward(const Tensor& loss_grad);

  std::vector<ParamRef> params();
  std::size_t param_count() const;
  void zero_grad();

  // Table-style layer summary at 224x224 input, independent of input_size.
  std::vector<SummaryRow> summarize() const;

  std::uint64_t run_seed() const { return stream_.run_seed; }
  void set_run_seed(std::uint64_t s) { stream_.run_seed = s; }
  std::uint64_t step() const { return stream_.step; }
  void set_step(std::uint64_t s) { stream_.step = s; }

  const std::vector<std::string>& layer_names() const { return names_; }
  Layer& layer(std::size_t i) { return *layers_[i]; }
  std::size_t layer_count() const { return layers_.size(); }

  static constexpr std::size_t kNumClasses = 2;

 private:
  ModelConfig config_;
  StreamContext stream_;
  std::vector<std::unique_ptr<Layer>> layers_;
  std::vector<std::string> names_;  // display names, Conv2d-1 / FC1 / ...
  bool forward_cached_ = false;
  Mode last_mode_ = Mode::kEval;
};

}  // namespace helmnet
