#include "heartid/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "heartid/textio.hpp"

namespace heartid {

namespace {

struct RocPoints {
  std::vector<double> fpr, tpr;
  double auc;
};

RocPoints roc_points(std::span<const int> y_true, std::span<const double> score, int cls) {
  std::size_t pos = 0, neg = 0;
  for (int y : y_true) (y == cls ? pos : neg)++;
  RocPoints out;
  out.fpr = {0.0};
  out.tpr = {0.0};
  if (pos == 0 || neg == 0) {
    out.fpr.push_back(1.0);
    out.tpr.push_back(1.0);
    out.auc = 0.5;
    return out;
  }
  // sweep thresholds downward; samples with equal scores enter together
  std::vector<std::size_t> order(y_true.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return score[a] > score[b]; });
  std::size_t tp = 0, fp = 0;
  double auc = 0.0;
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    std::size_t d_tp = 0, d_fp = 0;
    while (j < order.size() && score[order[j]] == score[order[i]]) {
      if (y_true[order[j]] == cls) ++d_tp;
      else ++d_fp;
      ++j;
    }
    double tpr0 = static_cast<double>(tp) / pos;
    double fpr0 = static_cast<double>(fp) / neg;
    tp += d_tp;
    fp += d_fp;
    double tpr1 = static_cast<double>(tp) / pos;
    double fpr1 = static_cast<double>(fp) / neg;
    auc += 0.5 * (tpr0 + tpr1) * (fpr1 - fpr0);
    out.fpr.push_back(fpr1);
    out.tpr.push_back(tpr1);
    i = j;
  }
  out.auc = auc;
  return out;
}

}  // namespace

double auc_one_vs_rest(std::span<const int> y_true, std::span<const double> score, int cls) {
  return roc_points(y_true, score, cls).auc;
}

MetricsReport compute_metrics(std::span<const int> y_true, std::span<const int> y_pred,
                              const Tensor& scores, bool check_simplex) {
  if (y_true.size() != y_pred.size())
    throw std::invalid_argument("compute_metrics: y_true/y_pred length mismatch");
  if (y_true.empty()) throw std::invalid_argument("compute_metrics: empty input");
  if (scores.shape.size() != 2 || scores.shape[0] != y_true.size())
    throw std::invalid_argument("compute_metrics: scores must be [N, C]");
  const std::size_t n = y_true.size();
  const std::size_t c = scores.shape[1];
  for (std::size_t i = 0; i < n; ++i) {
    if (y_true[i] < 0 || static_cast<std::size_t>(y_true[i]) >= c ||
        y_pred[i] < 0 || static_cast<std::size_t>(y_pred[i]) >= c)
      throw std::invalid_argument("compute_metrics: label outside score columns");
  }
  if (check_simplex) {
    for (std::size_t i = 0; i < n; ++i) {
      double sum = 0.0;
      for (std::size_t k = 0; k < c; ++k) {
        double v = scores.v[i * c + k];
        if (v < 0.0) throw std::invalid_argument("compute_metrics: negative score");
        sum += v;
      }
      if (std::abs(sum - 1.0) > 1e-6)
        throw std::invalid_argument("compute_metrics: score row not on the simplex");
    }
  }

  MetricsReport rep;
  rep.confusion.assign(c, std::vector<std::size_t>(c, 0));
  std::size_t correct = 0;
  for (std::size_t i = 0; i < n; ++i) {
    rep.confusion[static_cast<std::size_t>(y_true[i])]
                 [static_cast<std::size_t>(y_pred[i])]++;
    if (y_true[i] == y_pred[i]) ++correct;
  }
  rep.accuracy = 100.0 * static_cast<double>(correct) / static_cast<double>(n);

  double prec_sum = 0.0, rec_sum = 0.0, f1_sum = 0.0;
  for (std::size_t k = 0; k < c; ++k) {
    std::size_t tp = rep.confusion[k][k];
    std::size_t fn = 0, fp = 0;
    for (std::size_t j = 0; j < c; ++j) {
      if (j != k) {
        fn += rep.confusion[k][j];
        fp += rep.confusion[j][k];
      }
    }
    std::size_t true_count = tp + fn;
    if (true_count == 0) rep.absent_classes.push_back(static_cast<int>(k));
    double prec = (tp + fp) > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
    double rec = true_count > 0 ? static_cast<double>(tp) / static_cast<double>(true_count) : 0.0;
    double f1 = (prec + rec) > 0 ? 2.0 * prec * rec / (prec + rec) : 0.0;
    prec_sum += prec;
    rec_sum += rec;
    f1_sum += f1;
  }
  rep.macro_precision = 100.0 * prec_sum / static_cast<double>(c);
  rep.macro_recall = 100.0 * rec_sum / static_cast<double>(c);
  rep.macro_f1 = 100.0 * f1_sum / static_cast<double>(c);

  double auc_sum = 0.0;
  std::size_t auc_classes = 0;
  for (std::size_t k = 0; k < c; ++k) {
    std::vector<double> col(n);
    for (std::size_t i = 0; i < n; ++i) col[i] = scores.v[i * c + k];
    RocPoints pts = roc_points(y_true, col, static_cast<int>(k));
    RocCurve curve;
    curve.cls = static_cast<int>(k);
    curve.fpr = std::move(pts.fpr);
    curve.tpr = std::move(pts.tpr);
    curve.auc = pts.auc;
    bool present = std::find(rep.absent_classes.begin(), rep.absent_classes.end(),
                             static_cast<int>(k)) == rep.absent_classes.end();
    if (present) {
      auc_sum += curve.auc;
      ++auc_classes;
    }
    rep.roc.push_back(std::move(curve));
  }
  rep.macro_auc = auc_classes > 0 ? auc_sum / static_cast<double>(auc_classes) : 0.5;
  return rep;
}

std::string MetricsReport::confusion_csv() const {
  std::ostringstream ss;
  for (const auto& row : confusion) {
    for (std::size_t j = 0; j < row.size(); ++j) ss << (j ? "," : "") << row[j];
    ss << '\n';
  }
  return ss.str();
}

std::string MetricsReport::roc_csv() const {
  std::ostringstream ss;
  ss << "class,fpr,tpr\n";
  for (const RocCurve& curve : roc)
    for (std::size_t i = 0; i < curve.fpr.size(); ++i)
      ss << curve.cls << ',' << fmt_double(curve.fpr[i]) << ','
         << fmt_double(curve.tpr[i]) << '\n';
  return ss.str();
}

}  // namespace heartid
