#pragma once

#include <span>
#include <string>
#include <vector>

#include "heartid/tensor.hpp"

namespace heartid {

struct RocCurve {
  int cls = 0;
  std::vector<double> fpr, tpr;  // starts at (0,0), ends at (1,1)
  double auc = 0.5;
};

struct MetricsReport {
  double accuracy = 0.0;         // percent
  double macro_precision = 0.0;  // percent
  double macro_recall = 0.0;     // percent
  double macro_f1 = 0.0;         // percent
  double macro_auc = 0.0;        // in [0,1]
  std::vector<std::vector<std::size_t>> confusion;  // [true][pred]
  std::vector<RocCurve> roc;                        // one-vs-rest per class
  std::vector<int> absent_classes;  // present in the label space, not in y_true

  std::string confusion_csv() const;
  std::string roc_csv() const;  // class,fpr,tpr rows
};

// One-vs-rest counting metrics, macro-averaged; accuracy = correct/total.
// ROC via descending threshold sweep over each class column, AUC by
// trapezoid. Classes absent from y_true get recall 0 and are skipped in the
// macro AUC (and flagged). Set check_simplex=false to pass monotone-
// transformed scores whose rows no longer sum to 1.
MetricsReport compute_metrics(std::span<const int> y_true, std::span<const int> y_pred,
                              const Tensor& scores, bool check_simplex = true);

// AUC for one class column (used by the sweep and the report tooling).
double auc_one_vs_rest(std::span<const int> y_true, std::span<const double> score,
                       int cls);

}  // namespace heartid
