#include "heartid/train.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>

#include "heartid/errors.hpp"
#include "heartid/textio.hpp"

namespace heartid {

std::string Curves::to_csv() const {
  std::ostringstream ss;
  ss << "epoch,train_loss,train_acc,val_loss,val_acc\n";
  for (std::size_t e = 0; e < train_loss.size(); ++e)
    ss << (e + 1) << ',' << fmt_double(train_loss[e]) << ','
       << fmt_double(train_acc[e]) << ',' << fmt_double(val_loss[e]) << ','
       << fmt_double(val_acc[e]) << '\n';
  return ss.str();
}

std::vector<Tensor> snapshot_params(const std::vector<Param*>& params) {
  std::vector<Tensor> out;
  out.reserve(params.size());
  for (const Param* p : params) out.push_back(p->w);
  return out;
}

void restore_params(const std::vector<Param*>& params, const std::vector<Tensor>& snap) {
  for (std::size_t i = 0; i < params.size(); ++i) params[i]->w = snap[i];
}

namespace {

struct EvalStats {
  double loss = 0.0;
  double acc = 0.0;  // percent
};

EvalStats evaluate(Model& model, const Dataset& data, std::size_t batch_size,
                   Rng& rng) {
  EvalStats st;
  if (data.items.empty()) return st;
  SoftmaxXent xent;
  std::size_t correct = 0;
  double loss_sum = 0.0;
  for (std::size_t start = 0; start < data.size(); start += batch_size) {
    std::vector<std::size_t> idx;
    for (std::size_t i = start; i < std::min(start + batch_size, data.size()); ++i)
      idx.push_back(i);
    Batch b = make_batch(data, idx);
    Tensor logits = model.forward_logits(b, /*train=*/false, rng);
    loss_sum += xent.forward(logits, b.labels) * static_cast<double>(idx.size());
    const std::size_t c = logits.shape[1];
    for (std::size_t i = 0; i < idx.size(); ++i) {
      const double* lp = logits.data() + i * c;
      std::size_t best = 0;
      for (std::size_t k = 1; k < c; ++k)
        if (lp[k] > lp[best]) best = k;
      if (static_cast<int>(best) == b.labels[i]) ++correct;
    }
  }
  st.loss = loss_sum / static_cast<double>(data.size());
  st.acc = 100.0 * static_cast<double>(correct) / static_cast<double>(data.size());
  return st;
}

}  // namespace

FitResult fit(Model& model, const Dataset& train_set, const Dataset& val_set,
              const TrainConfig& config) {
  if (config.batch_size == 0 || config.max_epochs == 0 || config.learning_rate <= 0)
    throw std::invalid_argument("fit: batch_size, max_epochs, learning_rate must be positive");
  if (train_set.items.empty()) throw DataError("fit: empty training split");
  const std::vector<int> train_labels = train_set.labels();
  std::set<int> label_set(train_labels.begin(), train_labels.end());
  if (label_set.size() < 2) throw DataError("fit: training set has a single class");

  Rng rng(fanout_seed(config.seed, "train"));
  std::vector<Param*> params = model.params();
  AdamState adam = make_adam_state(params);
  AdamConfig adam_cfg;
  adam_cfg.lr = config.learning_rate;

  const Dataset& val = val_set.items.empty() ? train_set : val_set;

  FitResult res;
  double best_val = std::numeric_limits<double>::infinity();
  std::vector<Tensor> best_snap;
  std::size_t stall = 0;

  std::vector<std::size_t> order(train_set.size());
  std::iota(order.begin(), order.end(), 0);

  for (std::size_t epoch = 0; epoch < config.max_epochs; ++epoch) {
    rng.shuffle(order);
    SoftmaxXent xent;
    double loss_sum = 0.0;
    std::size_t correct = 0;
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      std::vector<std::size_t> idx(
          order.begin() + start,
          order.begin() + std::min(start + config.batch_size, order.size()));
      Batch b = make_batch(train_set, idx);
      for (Param* p : params) p->zero_grad();
      Tensor logits = model.forward_logits(b, /*train=*/true, rng);
      double loss = xent.forward(logits, b.labels);
      loss_sum += loss * static_cast<double>(idx.size());
      const std::size_t c = logits.shape[1];
      for (std::size_t i = 0; i < idx.size(); ++i) {
        const double* lp = logits.data() + i * c;
        std::size_t best = 0;
        for (std::size_t k = 1; k < c; ++k)
          if (lp[k] > lp[best]) best = k;
        if (static_cast<int>(best) == b.labels[i]) ++correct;
      }
      model.backward(xent.backward());
      adam_step(params, adam, adam_cfg);
    }

    res.curves.train_loss.push_back(loss_sum / static_cast<double>(order.size()));
    res.curves.train_acc.push_back(100.0 * static_cast<double>(correct) /
                                   static_cast<double>(order.size()));
    EvalStats vs = evaluate(model, val, config.batch_size, rng);
    res.curves.val_loss.push_back(vs.loss);
    res.curves.val_acc.push_back(vs.acc);
    ++res.epochs_run;

    if (vs.loss < best_val - 1e-9) {
      best_val = vs.loss;
      best_snap = snapshot_params(params);
      stall = 0;
    } else if (++stall >= config.patience) {
      break;
    }
  }

  if (!best_snap.empty()) restore_params(params, best_snap);
  res.best_val_loss = best_val;
  return res;
}

PredictOutput predict(Model& model, const Dataset& data, std::size_t batch_size) {
  if (data.items.empty()) throw DataError("predict: empty dataset");
  Rng rng(0);  // eval mode draws nothing
  PredictOutput out;
  std::vector<Tensor> prob_chunks;
  for (std::size_t start = 0; start < data.size(); start += batch_size) {
    std::vector<std::size_t> idx;
    for (std::size_t i = start; i < std::min(start + batch_size, data.size()); ++i)
      idx.push_back(i);
    Batch b = make_batch(data, idx);
    Tensor logits = model.forward_logits(b, /*train=*/false, rng);
    Tensor probs = softmax_rows(logits);
    std::vector<double> alphas = model.last_alphas();
    out.alphas.insert(out.alphas.end(), alphas.begin(), alphas.end());
    const std::size_t c = probs.shape[1];
    if (out.probs.empty()) out.probs = Tensor({data.size(), c});
    std::copy(probs.v.begin(), probs.v.end(), out.probs.data() + start * c);
    for (std::size_t i = 0; i < idx.size(); ++i) {
      const double* pp = probs.data() + i * c;
      std::size_t best = 0;
      for (std::size_t k = 1; k < c; ++k)
        if (pp[k] > pp[best]) best = k;
      out.predicted.push_back(static_cast<int>(best));
    }
  }
  return out;
}

}  // namespace heartid
