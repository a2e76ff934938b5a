#include "helmnet/metrics.hpp"

#include <cstdio>
#include <sstream>

namespace helmnet {

ConfusionMatrix confusion(const std::vector<int>& predictions,
                          const std::vector<int>& labels) {
  if (predictions.size() != labels.size())
    throw ContractError("predictions/labels length mismatch");
  if (predictions.empty()) throw ContractError("empty evaluation");
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    bool pos_label = labels[i] == kLabelHelmet;
    bool pos_pred = predictions[i] == kLabelHelmet;
    if (pos_label && pos_pred) ++cm.tp;
    else if (!pos_label && pos_pred) ++cm.fp;
    else if (pos_label && !pos_pred) ++cm.fn;
    else ++cm.tn;
  }
  return cm;
}

EvalReport report(const ConfusionMatrix& cm, double train_accuracy,
                  double val_accuracy) {
  if (cm.total() == 0) throw ContractError("empty confusion matrix");
  EvalReport r;
  r.confusion = cm;
  if (cm.tp + cm.fp == 0)
    r.precision_undefined = true;
  else
    r.precision = double(cm.tp) / (cm.tp + cm.fp);
  if (cm.tp + cm.fn == 0)
    r.recall_undefined = true;
  else
    r.recall = double(cm.tp) / (cm.tp + cm.fn);
  if (r.precision_undefined || r.recall_undefined ||
      r.precision + r.recall == 0.0)
    r.f1_undefined = true;
  else
    r.f1 = 2.0 * r.precision * r.recall / (r.precision + r.recall);
  r.accuracy = double(cm.tp + cm.tn) / cm.total();
  r.overfitting_degree = train_accuracy - val_accuracy;
  return r;
}

EvalResult evaluate(Model& model, const std::vector<Sample>& subset,
                    std::size_t batch_size) {
  if (subset.empty()) throw ContractError("evaluate: empty subset");
  EvalResult res;
  std::vector<int> labels;
  for (const Batch& b : batches(subset, batch_size, 0, 0, /*shuffle=*/false)) {
    Tensor logits = model.forward(b.inputs, Mode::kEval);
    for (std::size_t n = 0; n < b.labels.size(); ++n) {
      const float* row = logits.data() + n * Model::kNumClasses;
      int pred = row[1] > row[0] ? 1 : 0;  // tie -> class 0
      res.predictions.push_back(pred);
      labels.push_back(b.labels[n]);
    }
  }
  res.confusion = confusion(res.predictions, labels);
  res.accuracy =
      double(res.confusion.tp + res.confusion.tn) / res.confusion.total();
  return res;
}

std::string format_confusion(const ConfusionMatrix& cm) {
  char buf[512];
  std::snprintf(buf, sizeof buf,
                "                    predicted\n"
                "                 helmet  no_helmet\n"
                "actual helmet    %6zu  %9zu\n"
                "actual no_helmet %6zu  %9zu\n",
                cm.tp, cm.fn, cm.fp, cm.tn);
  return buf;
}

std::string format_report(const EvalReport& r) {
  std::ostringstream os;
  char buf[256];
  auto line = [&](const char* name, double v, bool undef) {
    std::snprintf(buf, sizeof buf, "%-22s %.4f%s\n", name, v,
                  undef ? "  (undefined: zero denominator)" : "");
    os << buf;
  };
  line("precision", r.precision, r.precision_undefined);
  line("recall", r.recall, r.recall_undefined);
  line("f1", r.f1, r.f1_undefined);
  line("accuracy", r.accuracy, false);
  std::snprintf(buf, sizeof buf, "%-22s %.2f points\n", "overfitting_degree",
                r.overfitting_degree);
  os << buf;
  return os.str();
}

std::string report_csv_header() {
  return "experiment,precision,recall,f1,accuracy,overfitting_degree";
}

std::string report_csv_row(const std::string& name, const EvalReport& r) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "%s,%.4f,%.4f,%.4f,%.4f,%.2f", name.c_str(),
                r.precision, r.recall, r.f1, r.accuracy, r.overfitting_degree);
  return buf;
}

}  // namespace helmnet
