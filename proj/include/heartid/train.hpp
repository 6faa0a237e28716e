#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "heartid/adam.hpp"
#include "heartid/models.hpp"

namespace heartid {

struct TrainConfig {
  double learning_rate = 1e-3;
  std::size_t batch_size = 16;
  std::size_t max_epochs = 50;
  std::size_t patience = 10;  // early stop on stalled validation loss
  double dropout = 0.5;
  std::uint64_t seed = 1;
};

// Per-epoch learning curves (validation columns repeat the train values when
// no validation split was given).
struct Curves {
  std::vector<double> train_loss, train_acc, val_loss, val_acc;
  std::string to_csv() const;  // epoch,train_loss,train_acc,val_loss,val_acc
};

struct FitResult {
  Curves curves;
  std::size_t epochs_run = 0;
  double best_val_loss = 0.0;
};

// Adam + shuffled minibatches, deterministic per (seed, config, data).
// Stops early after `patience` epochs without validation-loss improvement
// and restores the best snapshot. Throws DataError on an empty split or a
// single-class training set.
FitResult fit(Model& model, const Dataset& train_set, const Dataset& val_set,
              const TrainConfig& config);

struct PredictOutput {
  Tensor probs;                // [N, C] softmax probabilities
  std::vector<int> predicted;  // argmax per row
  std::vector<double> alphas;  // per instance, attention models only
};

PredictOutput predict(Model& model, const Dataset& data, std::size_t batch_size = 64);

// Roundtrip helpers for snapshots (early stopping, checkpoint writing).
std::vector<Tensor> snapshot_params(const std::vector<Param*>& params);
void restore_params(const std::vector<Param*>& params, const std::vector<Tensor>& snap);

}  // namespace heartid
