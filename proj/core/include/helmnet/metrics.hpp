#pragma once

#include <string>
#include <vector>

#include "helmnet/dataset.hpp"
#include "helmnet/model.hpp"

namespace helmnet {

// Positive class = helmet (1).
struct ConfusionMatrix {
  std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
  std::size_t total() const { return tp + fp + fn + tn; }
};

ConfusionMatrix confusion(const std::vector<int>& predictions,
                          const std::vector<int>& labels);

struct EvalReport {
  double precision = 0.0, recall = 0.0, f1 = 0.0, accuracy = 0.0;
  bool precision_undefined = false;  // zero-denominator cases report 0 + flag
  bool recall_undefined = false;
  bool f1_undefined = false;
  ConfusionMatrix confusion;
  // final training accuracy minus validation accuracy, percentage points
  double overfitting_degree = 0.0;
};

// train/val accuracies are percentages in [0,100].
EvalReport report(const ConfusionMatrix& cm, double train_accuracy,
                  double val_accuracy);

struct EvalResult {
  std::vector<int> predictions;
  ConfusionMatrix confusion;
  double accuracy = 0.0;  // fraction in [0,1]
};

// Eval-mode forward over the whole subset; prediction = argmax of the two
// logits, ties toward class 0.
EvalResult evaluate(Model& model, const std::vector<Sample>& subset,
                    std::size_t batch_size);

// Fig-10-style 2x2 text layout.
std::string format_confusion(const ConfusionMatrix& cm);
std::string format_report(const EvalReport& r);
std::string report_csv_header();
std::string report_csv_row(const std::string& name, const EvalReport& r);

}  // namespace helmnet
