#include "heartid/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>

#include "heartid/errors.hpp"
#include "heartid/rng.hpp"

namespace heartid {

namespace {

// subject-stratified split: takes ceil(fraction * count) of each subject's
// instances into `first`
void stratified_split(const Dataset& data, const std::vector<std::size_t>& indices,
                      double fraction, Rng& rng, std::vector<std::size_t>& first,
                      std::vector<std::size_t>& second) {
  std::map<std::string, std::vector<std::size_t>> by_subject;
  for (std::size_t i : indices) by_subject[data.items[i].subject_id].push_back(i);
  for (auto& [subject, list] : by_subject) {
    rng.shuffle(list);
    std::size_t take = static_cast<std::size_t>(
        std::ceil(fraction * static_cast<double>(list.size())));
    take = std::min(take, list.size());
    for (std::size_t j = 0; j < list.size(); ++j)
      (j < take ? first : second).push_back(list[j]);
  }
  std::sort(first.begin(), first.end());
  std::sort(second.begin(), second.end());
}

double stddev(const std::vector<double>& xs, double mean) {
  if (xs.size() < 2) return 0.0;
  double acc = 0.0;
  for (double x : xs) acc += (x - mean) * (x - mean);
  return std::sqrt(acc / static_cast<double>(xs.size()));
}

}  // namespace

AggregateStats aggregate_reports(const std::vector<MetricsReport>& reports) {
  AggregateStats st;
  if (reports.empty()) return st;
  std::vector<double> acc, prec, rec, f1, auc;
  for (const auto& r : reports) {
    acc.push_back(r.accuracy);
    prec.push_back(r.macro_precision);
    rec.push_back(r.macro_recall);
    f1.push_back(r.macro_f1);
    auc.push_back(r.macro_auc);
  }
  auto mean = [](const std::vector<double>& xs) {
    double s = 0.0;
    for (double x : xs) s += x;
    return s / static_cast<double>(xs.size());
  };
  st.mean_accuracy = mean(acc);
  st.std_accuracy = stddev(acc, st.mean_accuracy);
  st.mean_precision = mean(prec);
  st.std_precision = stddev(prec, st.mean_precision);
  st.mean_recall = mean(rec);
  st.std_recall = stddev(rec, st.mean_recall);
  st.mean_f1 = mean(f1);
  st.std_f1 = stddev(f1, st.mean_f1);
  st.mean_auc = mean(auc);
  st.std_auc = stddev(auc, st.mean_auc);
  return st;
}

CvOutcome run_cv(const Dataset& data, std::size_t k, std::uint64_t seed,
                 const TrainEvalFn& fn) {
  if (data.items.empty()) throw DataError("run_cv: empty dataset");
  FoldAssignment fa = make_folds(data.subjects_of_instances(), k,
                                 fanout_seed(seed, "folds"));
  CvOutcome out;
  out.dropped_subjects = fa.dropped_subjects;

  for (std::size_t fold = 0; fold < k; ++fold) {
    std::vector<std::size_t> test_idx = fa.fold_indices(fold);
    std::vector<std::size_t> pool_idx = fa.rest_indices(fold);
    if (test_idx.empty() || pool_idx.empty())
      throw DataError("run_cv: fold " + std::to_string(fold) + " is empty");

    // 10% validation carve-out from the training pool
    Rng rng(fanout_seed(seed, "val_split_fold" + std::to_string(fold)));
    std::vector<std::size_t> val_idx, train_idx;
    stratified_split(data, pool_idx, 0.1, rng, val_idx, train_idx);

    Dataset train = data.subset(train_idx);
    Dataset val = data.subset(val_idx);
    Dataset test = data.subset(test_idx);

    FoldEval ev;
    try {
      ev = fn(train, val, test, fanout_seed(seed, "fold" + std::to_string(fold)));
    } catch (const std::exception& e) {
      throw DataError("run_cv: training failed in fold " + std::to_string(fold) +
                      ": " + e.what());
    }
    std::vector<int> y_true = test.labels();
    out.fold_reports.push_back(compute_metrics(y_true, ev.y_pred, ev.scores));
    out.fold_curves.push_back(ev.curves);
    out.alphas.insert(out.alphas.end(), ev.alphas.begin(), ev.alphas.end());
  }
  out.aggregate = aggregate_reports(out.fold_reports);
  return out;
}

SessionProtocol::Kind parse_protocol_kind(const std::string& name) {
  if (name == "same") return SessionProtocol::Kind::Same;
  if (name == "mixed") return SessionProtocol::Kind::Mixed;
  if (name == "cross") return SessionProtocol::Kind::Cross;
  throw std::invalid_argument("unknown protocol '" + name +
                              "' (valid: same, mixed, cross)");
}

SessionOutcome run_session_protocol(const Dataset& data, const SessionProtocol& protocol,
                                    std::uint64_t seed, const TrainEvalFn& fn) {
  auto in_sessions = [&](const Instance& it, const std::vector<std::string>& sessions) {
    return std::find(sessions.begin(), sessions.end(), it.session_id) != sessions.end();
  };
  if (protocol.train_sessions.empty())
    throw std::invalid_argument("session protocol: no training sessions named");

  std::vector<std::size_t> train_pool;
  for (std::size_t i = 0; i < data.items.size(); ++i)
    if (in_sessions(data.items[i], protocol.train_sessions)) train_pool.push_back(i);
  if (train_pool.empty()) throw DataError("session protocol: empty training session");

  SessionOutcome out;
  std::vector<std::size_t> train_idx, test_idx;

  if (protocol.kind == SessionProtocol::Kind::Cross) {
    if (protocol.test_sessions.empty())
      throw std::invalid_argument("cross protocol: no test sessions named");
    std::set<std::string> train_subjects;
    for (std::size_t i : train_pool) train_subjects.insert(data.items[i].subject_id);
    std::set<std::string> excluded;
    for (std::size_t i = 0; i < data.items.size(); ++i) {
      if (!in_sessions(data.items[i], protocol.test_sessions)) continue;
      if (train_subjects.count(data.items[i].subject_id)) {
        test_idx.push_back(i);
      } else {
        ++out.excluded_test_instances;
        excluded.insert(data.items[i].subject_id);
      }
    }
    out.excluded_subjects.assign(excluded.begin(), excluded.end());
    if (test_idx.empty())
      throw DataError("cross protocol: no test subjects overlap the training session");
    train_idx = train_pool;
  } else {
    // Same and Mixed: stratified train_fraction split within the pool
    Rng rng(fanout_seed(seed, "session_split"));
    stratified_split(data, train_pool, protocol.train_fraction, rng, train_idx, test_idx);
    if (test_idx.empty()) throw DataError("session protocol: empty test split");
  }

  // closed set: restrict the label space to subjects present in training
  std::set<std::string> subjects;
  for (std::size_t i : train_idx) subjects.insert(data.items[i].subject_id);
  std::vector<std::string> subject_list(subjects.begin(), subjects.end());
  Dataset train = remap_to_subjects(data.subset(train_idx), subject_list);
  Dataset test = remap_to_subjects(data.subset(test_idx), subject_list);

  // validation carve-out from training for early stopping
  Rng vrng(fanout_seed(seed, "session_val"));
  std::vector<std::size_t> all(train.items.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  std::vector<std::size_t> val_idx, fit_idx;
  stratified_split(train, all, 0.1, vrng, val_idx, fit_idx);
  Dataset fit_set = train.subset(fit_idx);
  Dataset val_set = train.subset(val_idx);

  FoldEval ev = fn(fit_set, val_set, test, fanout_seed(seed, "session"));
  std::vector<int> y_true = test.labels();
  out.report = compute_metrics(y_true, ev.y_pred, ev.scores);
  out.curves = ev.curves;
  out.train_size = train.items.size();
  out.test_size = test.items.size();
  return out;
}

}  // namespace heartid
