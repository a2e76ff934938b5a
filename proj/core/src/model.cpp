#include "helmnet/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "helmnet/rng.hpp"

namespace helmnet {

namespace {

struct VariantSpec {
  std::vector<std::size_t> conv_channels;
  std::vector<bool> conv_bias;
  std::vector<std::size_t> fc_sizes;
  // Conv blocks whose pool is followed by dropout (0-based), when rate > 0.
  std::vector<std::size_t> dropout_blocks;
};

// The final variant mirrors the published layer table: its second conv layer
// carries no bias term (the table's 2,178 = 22*11*9), and dropout sits after
// the second and third blocks only.
VariantSpec spec_for(Variant v) {
  switch (v) {
    case Variant::kInitial:
      return {{11}, {true}, {40}, {0}};
    case Variant::kModified:
      return {{11, 22}, {true, true}, {100, 50}, {0, 1}};
    case Variant::kFinal:
      return {{11, 22, 44}, {true, false, true}, {200, 100, 50}, {1, 2}};
  }
  throw ContractError("unknown variant");
}

std::string dim2(std::size_t h, std::size_t w) {
  return std::to_string(h) + "x" + std::to_string(w);
}

std::string thousands(std::size_t n) {
  std::string s = std::to_string(n);
  for (int i = static_cast<int>(s.size()) - 3; i > 0; i -= 3)
    s.insert(static_cast<std::size_t>(i), ",");
  return s;
}

}  // namespace

std::string variant_name(Variant v) {
  switch (v) {
    case Variant::kInitial: return "initial";
    case Variant::kModified: return "modified";
    case Variant::kFinal: return "final";
  }
  return "?";
}

Variant parse_variant(const std::string& s) {
  if (s == "initial") return Variant::kInitial;
  if (s == "modified") return Variant::kModified;
  if (s == "final") return Variant::kFinal;
  throw ContractError("unknown variant '" + s +
                      "' (expected initial|modified|final)");
}

Model::Model(const ModelConfig& config) : config_(config) {
  stream_.run_seed = config.init_seed;
  VariantSpec vs = spec_for(config.variant);
  bool drop = config.dropout_rate > 0.0f;
  std::size_t h = config.input_size, w = config.input_size, c = 3;
  std::size_t dropout_index = 0;

  auto add = [&](std::unique_ptr<Layer> l, std::string name) {
    layers_.push_back(std::move(l));
    names_.push_back(std::move(name));
  };

  for (std::size_t b = 0; b < vs.conv_channels.size(); ++b) {
    std::size_t out_ch = vs.conv_channels[b];
    if (h < 3 || w < 3)
      throw ShapeError("input size " + std::to_string(config.input_size) +
                       " too small for conv block " + std::to_string(b + 1));
    add(std::make_unique<Conv2d>(c, out_ch, vs.conv_bias[b]),
        "Conv2d-" + std::to_string(b + 1));
    h -= 2;
    w -= 2;
    c = out_ch;
    if (config.use_batchnorm)
      add(std::make_unique<BatchNorm2d>(out_ch), "BatchNorm2d");
    add(std::make_unique<ReLU>(), "ReLU");
    if (h < 2 || w < 2)
      throw ShapeError("input size too small for pool in block " +
                       std::to_string(b + 1));
    add(std::make_unique<MaxPool2x2>(), "MaxPool2d");
    h /= 2;
    w /= 2;
    bool block_dropout =
        std::find(vs.dropout_blocks.begin(), vs.dropout_blocks.end(), b) !=
        vs.dropout_blocks.end();
    if (drop && block_dropout)
      add(std::make_unique<Dropout>(config.dropout_rate, dropout_index++,
                                    &stream_),
          "Dropout");
  }

  add(std::make_unique<Flatten>(), "Flatten");
  std::size_t features = c * h * w;
  for (std::size_t i = 0; i < vs.fc_sizes.size(); ++i) {
    add(std::make_unique<Linear>(features, vs.fc_sizes[i]),
        "FC" + std::to_string(i + 1));
    features = vs.fc_sizes[i];
    add(std::make_unique<ReLU>(), "ReLU");
    if (drop)
      add(std::make_unique<Dropout>(config.dropout_rate, dropout_index++,
                                    &stream_),
          "Dropout");
  }
  add(std::make_unique<Linear>(features, kNumClasses), "Output");

  // Initialization: uniform +-sqrt(6/fan_in) weights, zero biases, BN gamma=1
  // beta=0. One derived stream per parameter tensor, so layer order changes
  // (BN/dropout flags) never shift another layer's draws.
  std::size_t ordinal = 0;
  for (auto& l : layers_) {
    if (auto* conv = dynamic_cast<Conv2d*>(l.get())) {
      Rng rng(hash2(config.init_seed, ordinal++));
      double bound = std::sqrt(6.0 / (conv->in_channels() * 9));
      for (std::size_t i = 0; i < conv->weights.size(); ++i)
        conv->weights[i] = static_cast<float>(rng.uniform(-bound, bound));
    } else if (auto* lin = dynamic_cast<Linear*>(l.get())) {
      Rng rng(hash2(config.init_seed, ordinal++));
      double bound = std::sqrt(6.0 / lin->in_features());
      for (std::size_t i = 0; i < lin->weights.size(); ++i)
        lin->weights[i] = static_cast<float>(rng.uniform(-bound, bound));
    }
  }
}

Tensor Model::forward(const Tensor& batch, Mode mode) {
  std::vector<std::size_t> expect = {batch.rank() ? batch.dim(0) : 0, 3,
                                     config_.input_size, config_.input_size};
  if (batch.rank() != 4 || batch.shape() != expect)
    throw ShapeError("model input must be [N,3," +
                     std::to_string(config_.input_size) + "," +
                     std::to_string(config_.input_size) + "]");
  Tensor x = batch;
  for (auto& l : layers_) x = l->forward(x, mode);
  if (mode == Mode::kTrain) {
    stream_.step += 1;
    forward_cached_ = true;
  } else {
    forward_cached_ = false;
  }
  last_mode_ = mode;
  return x;
}

void Model::backward(const Tensor& loss_grad) {
  if (!forward_cached_ || last_mode_ != Mode::kTrain)
    throw ContractError("backward requires an immediately preceding train-mode forward");
  Tensor g = loss_grad;
  for (std::size_t i = layers_.size(); i-- > 0;) g = layers_[i]->backward(g);
  forward_cached_ = false;
}

std::vector<ParamRef> Model::params() {
  std::vector<ParamRef> out;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    std::ostringstream prefix;
    prefix << "L" << i << "." << names_[i];
    layers_[i]->collect_params(prefix.str(), out);
  }
  return out;
}

std::size_t Model::param_count() const {
  std::size_t n = 0;
  for (const auto& l : layers_) n += l->param_count();
  return n;
}

void Model::zero_grad() {
  for (auto& ref : params())
    if (ref.grad)
      std::fill(ref.grad->data(), ref.grad->data() + ref.grad->size(), 0.0f);
}

std::vector<SummaryRow> Model::summarize() const {
  // Published per-layer counts for the final variant; rows whose derived
  // count differs get a deviation note.
  const bool is_final = config_.variant == Variant::kFinal;
  auto published = [&](const std::string& name) -> std::optional<std::size_t> {
    if (!is_final) return {};
    if (name == "Conv2d-1") return 308;
    if (name == "Conv2d-2") return 2178;
    if (name == "Conv2d-3") return 8760;
    if (name == "FC1") return 5950000;
    if (name == "FC2") return 20100;
    if (name == "FC3") return 5050;
    if (name == "Output") return 102;
    return {};
  };

  std::vector<SummaryRow> rows;
  std::size_t h = 224, w = 224, c = 3, features = 0;
  bool flat = false;
  rows.push_back({"Input", "3, " + dim2(h, w), {}, ""});
  std::size_t total = 0;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    const Layer& l = *layers_[i];
    const std::string& name = names_[i];
    std::string shape;
    std::string kind = l.kind();
    if (kind == "Conv2d") {
      h -= 2;
      w -= 2;
      c = static_cast<const Conv2d&>(l).out_channels();
      shape = dim2(h, w);
    } else if (kind == "MaxPool2d") {
      h /= 2;
      w /= 2;
      shape = dim2(h, w);
    } else if (kind == "Flatten") {
      flat = true;
      features = c * h * w;
      shape = thousands(features);
    } else if (kind == "Linear") {
      features = static_cast<const Linear&>(l).out_features();
      shape = thousands(features) + " Neurons";
    } else {
      shape = flat ? thousands(features) : dim2(h, w);
    }
    std::optional<std::size_t> params;
    std::string note;
    if (l.param_count() > 0) {
      params = l.param_count();
      total += *params;
      auto ref = published(name);
      if (ref && *ref != *params)
        note = "differs from the published layer table (" + thousands(*ref) + ")";
    }
    rows.push_back({name, shape, params, note});
  }
  std::string total_note;
  if (is_final && !config_.use_batchnorm && total != 5995698)
    total_note = "published layer table totals 5,995,698";
  rows.push_back({"Total Parameters", "-", total, total_note});
  return rows;
}

}  // namespace helmnet
