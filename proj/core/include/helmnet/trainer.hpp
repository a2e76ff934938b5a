#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "helmnet/checkpoint.hpp"
#include "helmnet/dataset.hpp"
#include "helmnet/metrics.hpp"
#include "helmnet/model.hpp"
#include "helmnet/optim.hpp"

namespace helmnet {

// Defaults mirror the training recipe: batch 32, lr 0.02, 60 epochs,
// momentum 0.9.
struct TrainConfig {
  ModelConfig model;
  std::size_t batch_size = 32;
  float learning_rate = 0.02f;
  std::size_t epochs = 60;
  float momentum = 0.9f;
  std::uint64_t seed = 0;
  SplitRatios ratios;
  std::string data_root;
  std::string log_path;
  std::string checkpoint_path;  // best checkpoint goes to <path>.best

  // Flat key=value form, also the checkpoint config echo.
  std::vector<std::pair<std::string, std::string>> to_kv() const;
  static TrainConfig from_kv(
      const std::vector<std::pair<std::string, std::string>>& kv);
  static TrainConfig from_file(const std::string& path);
  void apply(const std::string& key, const std::string& value);  // one override
};

struct EpochLog {
  std::size_t epoch = 0;
  double train_loss = 0.0;
  double train_accuracy = 0.0;  // percent
  double val_accuracy = 0.0;    // percent
  long wall_ms = 0;
};

constexpr const char* kEpochLogHeader = "epoch,train_loss,train_acc,val_acc,wall_ms";
std::string epoch_log_row(const EpochLog& log);

struct FitResult {
  std::vector<EpochLog> logs;
  double final_train_accuracy = 0.0;  // percent
  double final_val_accuracy = 0.0;    // percent
  double best_val_accuracy = 0.0;     // percent
  std::size_t best_epoch = 0;
  EvalReport validation_report;
  EvalReport test_report;
  std::unique_ptr<Model> model;
};

// Loads the corpus from config.data_root, splits, trains. resume_path
// restarts from a checkpoint's epoch boundary and reproduces the
// uninterrupted run bitwise.
FitResult fit(const TrainConfig& config,
              const std::optional<std::string>& resume_path = {});

// Same loop on a caller-provided split (tests, memorization runs).
FitResult fit_split(const TrainConfig& config, const DatasetSplit& split,
                    const std::optional<std::string>& resume_path = {});

struct RestoredModel {
  TrainConfig config;
  std::unique_ptr<Model> model;
  std::size_t epochs_completed = 0;
};

// Rebuilds the model of a checkpoint for inference (eval / predict).
RestoredModel restore_model(const std::string& path);

struct GridSpec {
  std::vector<Variant> variants;
  std::vector<bool> batchnorm;
  std::vector<float> dropout_rates;
};

// Grid file: key=value lists, e.g.
//   variants=final
//   batchnorm=on
//   dropout=0.10,0.15,0.25,0.50
GridSpec parse_grid(const std::string& text);

// One fit per grid cell (cartesian product), each with a derived sub-seed.
// Returns the CSV (header + one row per cell); failed cells keep their row
// with empty metric fields and the error goes to stderr.
std::string run_experiment_grid(const TrainConfig& base, const GridSpec& grid);

}  // namespace helmnet
