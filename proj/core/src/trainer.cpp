#include "helmnet/trainer.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "helmnet/rng.hpp"

namespace helmnet {

namespace {

std::string fmt_g(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

std::vector<std::pair<std::string, std::string>> parse_kv_text(
    const std::string& text) {
  std::vector<std::pair<std::string, std::string>> kv;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    // trim
    auto b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos) continue;
    auto e = line.find_last_not_of(" \t\r");
    line = line.substr(b, e - b + 1);
    if (line.empty() || line[0] == '#') continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw DataError("config line " + std::to_string(lineno) +
                      ": expected key=value, got '" + line + "'");
    kv.emplace_back(line.substr(0, eq), line.substr(eq + 1));
  }
  return kv;
}

std::uint64_t parse_u64(const std::string& key, const std::string& v) {
  try {
    return std::stoull(v);
  } catch (...) {
    throw DataError("config key '" + key + "': bad integer '" + v + "'");
  }
}

double parse_f(const std::string& key, const std::string& v) {
  try {
    return std::stod(v);
  } catch (...) {
    throw DataError("config key '" + key + "': bad number '" + v + "'");
  }
}

}  // namespace

std::vector<std::pair<std::string, std::string>> TrainConfig::to_kv() const {
  return {
      {"variant", variant_name(model.variant)},
      {"batchnorm", model.use_batchnorm ? "1" : "0"},
      {"dropout", fmt_g(model.dropout_rate)},
      {"image_size", std::to_string(model.input_size)},
      {"batch_size", std::to_string(batch_size)},
      {"learning_rate", fmt_g(learning_rate)},
      {"epochs", std::to_string(epochs)},
      {"momentum", fmt_g(momentum)},
      {"seed", std::to_string(seed)},
      {"ratio_train", fmt_g(ratios.train)},
      {"ratio_val", fmt_g(ratios.validation)},
      {"ratio_test", fmt_g(ratios.test)},
      {"data_root", data_root},
      {"log_path", log_path},
      {"checkpoint_path", checkpoint_path},
  };
}

void TrainConfig::apply(const std::string& key, const std::string& value) {
  if (key == "variant") model.variant = parse_variant(value);
  else if (key == "batchnorm") model.use_batchnorm = value == "1" || value == "true" || value == "on";
  else if (key == "dropout") model.dropout_rate = static_cast<float>(parse_f(key, value));
  else if (key == "image_size") model.input_size = parse_u64(key, value);
  else if (key == "batch_size") batch_size = parse_u64(key, value);
  else if (key == "learning_rate") learning_rate = static_cast<float>(parse_f(key, value));
  else if (key == "epochs") epochs = parse_u64(key, value);
  else if (key == "momentum") momentum = static_cast<float>(parse_f(key, value));
  else if (key == "seed") seed = parse_u64(key, value);
  else if (key == "ratio_train") ratios.train = parse_f(key, value);
  else if (key == "ratio_val") ratios.validation = parse_f(key, value);
  else if (key == "ratio_test") ratios.test = parse_f(key, value);
  else if (key == "data_root") data_root = value;
  else if (key == "log_path") log_path = value;
  else if (key == "checkpoint_path") checkpoint_path = value;
  else throw DataError("unknown config key '" + key + "'");
}

TrainConfig TrainConfig::from_kv(
    const std::vector<std::pair<std::string, std::string>>& kv) {
  TrainConfig cfg;
  for (const auto& [k, v] : kv) cfg.apply(k, v);
  return cfg;
}

TrainConfig TrainConfig::from_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw DataError("cannot open config file " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  try {
    return from_kv(parse_kv_text(ss.str()));
  } catch (const DataError& e) {
    throw DataError(path + ": " + e.what());
  }
}

std::string epoch_log_row(const EpochLog& log) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "%zu,%.6f,%.4f,%.4f,%ld", log.epoch,
                log.train_loss, log.train_accuracy, log.val_accuracy,
                log.wall_ms);
  return buf;
}

namespace {

CheckpointData build_checkpoint(const TrainConfig& cfg, Model& model,
                                SgdMomentum& opt, std::size_t epochs_done,
                                double best_val, std::size_t best_epoch) {
  CheckpointData data;
  data.config = cfg.to_kv();
  for (auto& ref : model.params())
    data.tensors.emplace_back(ref.name, *ref.value);
  for (auto& [name, v] : opt.velocities())
    data.tensors.emplace_back("velocity." + name, v);
  auto scalar = [&](const std::string& name, double v) {
    data.tensors.emplace_back(name, Tensor::from({1}, {static_cast<float>(v)}));
  };
  scalar("state.epochs_completed", static_cast<double>(epochs_done));
  scalar("state.step", static_cast<double>(model.step()));
  scalar("state.best_val", best_val);
  scalar("state.best_epoch", static_cast<double>(best_epoch));
  return data;
}

const Tensor* find_tensor(const CheckpointData& data, const std::string& name) {
  for (const auto& [n, t] : data.tensors)
    if (n == name) return &t;
  return nullptr;
}

void restore_params(Model& model, const CheckpointData& data) {
  for (auto& ref : model.params()) {
    const Tensor* t = find_tensor(data, ref.name);
    if (!t)
      throw CheckpointError("checkpoint is missing tensor '" + ref.name + "'");
    if (t->shape() != ref.value->shape())
      throw CheckpointError("checkpoint tensor '" + ref.name +
                            "' has mismatched shape");
    *ref.value = *t;
  }
}

// keys that must agree between a resume checkpoint and the active config
const char* kResumeKeys[] = {"variant",    "batchnorm", "dropout",
                             "image_size", "batch_size", "learning_rate",
                             "momentum",   "seed",       "ratio_train",
                             "ratio_val",  "ratio_test"};

std::string kv_get(const std::vector<std::pair<std::string, std::string>>& kv,
                   const std::string& key) {
  for (const auto& [k, v] : kv)
    if (k == key) return v;
  return "";
}

}  // namespace

FitResult fit_split(const TrainConfig& config, const DatasetSplit& split,
                    const std::optional<std::string>& resume_path) {
  if (split.train.empty() || split.validation.empty())
    throw DataError("fit: train and validation subsets must be non-empty");

  TrainConfig cfg = config;
  cfg.model.init_seed = cfg.seed;
  auto model = std::make_unique<Model>(cfg.model);
  model->set_run_seed(cfg.seed);
  SgdMomentum opt(cfg.learning_rate, cfg.momentum);

  std::size_t epochs_done = 0, best_epoch = 0;
  double best_val = -1.0;

  if (resume_path) {
    CheckpointData data = load_checkpoint(*resume_path);
    auto current = cfg.to_kv();
    for (const char* key : kResumeKeys)
      if (kv_get(data.config, key) != kv_get(current, key))
        throw ContractError("resume checkpoint disagrees on '" +
                            std::string(key) + "' (" + kv_get(data.config, key) +
                            " vs " + kv_get(current, key) + ")");
    restore_params(*model, data);
    for (const auto& [name, t] : data.tensors)
      if (name.rfind("velocity.", 0) == 0)
        opt.velocities()[name.substr(9)] = t;
    if (const Tensor* t = find_tensor(data, "state.epochs_completed"))
      epochs_done = static_cast<std::size_t>((*t)[0]);
    if (const Tensor* t = find_tensor(data, "state.step"))
      model->set_step(static_cast<std::uint64_t>((*t)[0]));
    if (const Tensor* t = find_tensor(data, "state.best_val"))
      best_val = (*t)[0];
    if (const Tensor* t = find_tensor(data, "state.best_epoch"))
      best_epoch = static_cast<std::size_t>((*t)[0]);
    if (epochs_done > cfg.epochs)
      throw ContractError("resume checkpoint already past epoch " +
                          std::to_string(cfg.epochs));
  }

  std::ofstream log;
  if (!cfg.log_path.empty()) {
    log.open(cfg.log_path, resume_path ? std::ios::app : std::ios::trunc);
    if (!log) throw DataError("cannot write log " + cfg.log_path);
    if (!resume_path) log << kEpochLogHeader << "\n";
  }

  FitResult result;
  std::optional<EvalResult> last_train_eval, last_val_eval;

  for (std::size_t epoch = epochs_done; epoch < cfg.epochs; ++epoch) {
    auto t0 = std::chrono::steady_clock::now();
    double loss_sum = 0.0;
    std::size_t seen = 0, batch_idx = 0;
    for (Batch& b :
         batches(split.train, cfg.batch_size, cfg.seed, epoch, true)) {
      Tensor logits = model->forward(b.inputs, Mode::kTrain);
      LossOutput lo = softmax_cross_entropy(logits, b.labels);
      if (!std::isfinite(lo.loss))
        throw NumericError("non-finite loss at epoch " + std::to_string(epoch) +
                           ", batch " + std::to_string(batch_idx) + " (loss " +
                           std::to_string(lo.loss) + ")");
      model->backward(lo.logit_grad);
      opt.step(*model);
      loss_sum += lo.loss * b.labels.size();
      seen += b.labels.size();
      ++batch_idx;
    }

    last_train_eval = evaluate(*model, split.train, cfg.batch_size);
    last_val_eval = evaluate(*model, split.validation, cfg.batch_size);
    auto t1 = std::chrono::steady_clock::now();

    EpochLog el;
    el.epoch = epoch + 1;
    el.train_loss = loss_sum / seen;
    el.train_accuracy = last_train_eval->accuracy * 100.0;
    el.val_accuracy = last_val_eval->accuracy * 100.0;
    el.wall_ms = static_cast<long>(
        std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0).count());
    result.logs.push_back(el);
    if (log) log << epoch_log_row(el) << "\n" << std::flush;

    if (el.val_accuracy > best_val) {  // ties keep the earlier epoch
      best_val = el.val_accuracy;
      best_epoch = epoch + 1;
      if (!cfg.checkpoint_path.empty())
        save_checkpoint(cfg.checkpoint_path + ".best",
                        build_checkpoint(cfg, *model, opt, epoch + 1, best_val,
                                         best_epoch));
    }
  }

  if (!last_train_eval) {
    last_train_eval = evaluate(*model, split.train, cfg.batch_size);
    last_val_eval = evaluate(*model, split.validation, cfg.batch_size);
  }
  result.final_train_accuracy = last_train_eval->accuracy * 100.0;
  result.final_val_accuracy = last_val_eval->accuracy * 100.0;
  result.best_val_accuracy = best_val < 0.0 ? result.final_val_accuracy : best_val;
  result.best_epoch = best_epoch;

  if (!cfg.checkpoint_path.empty())
    save_checkpoint(cfg.checkpoint_path,
                    build_checkpoint(cfg, *model, opt, cfg.epochs, best_val,
                                     best_epoch));

  result.validation_report =
      report(last_val_eval->confusion, result.final_train_accuracy,
             result.final_val_accuracy);
  if (!split.test.empty()) {
    EvalResult test_eval = evaluate(*model, split.test, cfg.batch_size);
    result.test_report = report(test_eval.confusion, result.final_train_accuracy,
                                result.final_val_accuracy);
  } else {
    result.test_report = result.validation_report;
  }
  result.model = std::move(model);
  return result;
}

FitResult fit(const TrainConfig& config,
              const std::optional<std::string>& resume_path) {
  if (config.data_root.empty()) throw DataError("fit: data_root is not set");
  CorpusLoadReport corpus =
      load_corpus(config.data_root, static_cast<int>(config.model.input_size));
  for (const auto& e : corpus.errors)
    std::cerr << "warning: skipped undecodable file: " << e << "\n";
  DatasetSplit split =
      stratified_split(corpus.samples, config.ratios, config.seed);
  return fit_split(config, split, resume_path);
}

RestoredModel restore_model(const std::string& path) {
  CheckpointData data = load_checkpoint(path);
  RestoredModel out;
  out.config = TrainConfig::from_kv(data.config);
  out.config.model.init_seed = out.config.seed;
  out.model = std::make_unique<Model>(out.config.model);
  out.model->set_run_seed(out.config.seed);
  restore_params(*out.model, data);
  if (const Tensor* t = find_tensor(data, "state.step"))
    out.model->set_step(static_cast<std::uint64_t>((*t)[0]));
  if (const Tensor* t = find_tensor(data, "state.epochs_completed"))
    out.epochs_completed = static_cast<std::size_t>((*t)[0]);
  return out;
}

GridSpec parse_grid(const std::string& text) {
  GridSpec grid;
  for (const auto& [key, value] : parse_kv_text(text)) {
    std::istringstream vs(value);
    std::string item;
    while (std::getline(vs, item, ',')) {
      if (item.empty()) continue;
      if (key == "variants" || key == "variant")
        grid.variants.push_back(parse_variant(item));
      else if (key == "batchnorm")
        grid.batchnorm.push_back(item == "1" || item == "true" || item == "on");
      else if (key == "dropout")
        grid.dropout_rates.push_back(static_cast<float>(parse_f(key, item)));
      else
        throw DataError("unknown grid key '" + key + "'");
    }
  }
  if (grid.variants.empty()) grid.variants = {Variant::kFinal};
  if (grid.batchnorm.empty()) grid.batchnorm = {false};
  if (grid.dropout_rates.empty()) grid.dropout_rates = {0.0f};
  return grid;
}

std::string run_experiment_grid(const TrainConfig& base, const GridSpec& grid) {
  std::ostringstream csv;
  csv << report_csv_header() << "\n";
  std::size_t cell = 0;
  for (Variant v : grid.variants)
    for (bool bn : grid.batchnorm)
      for (float rate : grid.dropout_rates) {
        TrainConfig cfg = base;
        cfg.model.variant = v;
        cfg.model.use_batchnorm = bn;
        cfg.model.dropout_rate = rate;
        cfg.seed = hash2(base.seed, cell);
        std::string suffix = ".cell" + std::to_string(cell);
        if (!cfg.log_path.empty()) cfg.log_path += suffix;
        if (!cfg.checkpoint_path.empty()) cfg.checkpoint_path += suffix;
        std::string name = variant_name(v);
        if (bn) name += "+bn";
        name += "+dropout-" + fmt_g(rate);
        try {
          FitResult res = fit(cfg);
          csv << report_csv_row(name, res.test_report) << "\n";
        } catch (const std::exception& e) {
          std::cerr << "grid cell '" << name << "' failed: " << e.what() << "\n";
          csv << name << ",,,,,\n";
        }
        ++cell;
      }
  return csv.str();
}

}  // namespace helmnet
