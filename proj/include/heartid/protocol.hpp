#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "heartid/dataset.hpp"
#include "heartid/folds.hpp"
#include "heartid/metrics.hpp"
#include "heartid/train.hpp"

namespace heartid {

// What a training backend returns for one evaluation split.
struct FoldEval {
  std::vector<int> y_pred;
  Tensor scores;               // [N, C] simplex rows
  Curves curves;               // may be empty for stub classifiers
  std::vector<double> alphas;  // may be empty
};

// Pluggable training backend: gets train/val/test splits plus a seed,
// returns predictions on test. Real backends train networks; tests plug in
// stubs.
using TrainEvalFn = std::function<FoldEval(const Dataset& train, const Dataset& val,
                                           const Dataset& test, std::uint64_t seed)>;

struct AggregateStats {
  double mean_accuracy = 0.0, std_accuracy = 0.0;
  double mean_precision = 0.0, std_precision = 0.0;
  double mean_recall = 0.0, std_recall = 0.0;
  double mean_f1 = 0.0, std_f1 = 0.0;
  double mean_auc = 0.0, std_auc = 0.0;
};

struct CvOutcome {
  std::vector<MetricsReport> fold_reports;
  std::vector<Curves> fold_curves;
  std::vector<double> alphas;  // pooled over folds
  AggregateStats aggregate;
  std::vector<std::string> dropped_subjects;
};

// Stratified k-fold cross-validation: per fold, the other k-1 folds train
// (with a 10% subject-stratified validation carve-out for early stopping)
// and the fold itself tests.
CvOutcome run_cv(const Dataset& data, std::size_t k, std::uint64_t seed,
                 const TrainEvalFn& fn);

struct SessionProtocol {
  enum class Kind { Same, Mixed, Cross };
  Kind kind = Kind::Same;
  std::vector<std::string> train_sessions;
  std::vector<std::string> test_sessions;  // Cross only
  double train_fraction = 0.8;             // Same/Mixed split
};

SessionProtocol::Kind parse_protocol_kind(const std::string& name);

struct SessionOutcome {
  MetricsReport report;
  Curves curves;
  std::size_t excluded_test_instances = 0;  // subjects absent from training
  std::vector<std::string> excluded_subjects;
  std::size_t train_size = 0, test_size = 0;
};

// Same: 80/20 split within the named sessions (subject-stratified).
// Mixed: 80/20 within the union of train_sessions.
// Cross: all instances of train_sessions vs all of test_sessions; test
// subjects unseen in training are excluded and reported.
SessionOutcome run_session_protocol(const Dataset& data, const SessionProtocol& protocol,
                                    std::uint64_t seed, const TrainEvalFn& fn);

// Aggregate helper shared by run_cv and reporting.
AggregateStats aggregate_reports(const std::vector<MetricsReport>& reports);

}  // namespace heartid
