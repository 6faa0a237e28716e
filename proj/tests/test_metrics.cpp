#include <cmath>

#include "doctest.h"
#include "heartid/metrics.hpp"
#include "heartid/rng.hpp"
#include "test_util.hpp"

using namespace heartid;
using testutil::brute_force_metrics;
using testutil::OracleMetrics;

namespace {

Tensor simplex_scores(std::size_t n, std::size_t c, Rng& rng) {
  Tensor s({n, c});
  for (std::size_t i = 0; i < n; ++i) {
    double total = 0.0;
    for (std::size_t k = 0; k < c; ++k) {
      s.v[i * c + k] = rng.uniform(0.001, 1.0);
      total += s.v[i * c + k];
    }
    for (std::size_t k = 0; k < c; ++k) s.v[i * c + k] /= total;
  }
  return s;
}

}  // namespace

TEST_SUITE("metrics") {

TEST_CASE("worked example: accuracy 75, macro precision 83.33, macro recall 75") {
  std::vector<int> y_true = {0, 0, 1, 1};
  std::vector<int> y_pred = {0, 1, 1, 1};
  Tensor scores({4, 2});
  for (std::size_t i = 0; i < 4; ++i) {
    scores.v[i * 2 + static_cast<std::size_t>(y_pred[i])] = 0.9;
    scores.v[i * 2 + static_cast<std::size_t>(1 - y_pred[i])] = 0.1;
  }
  MetricsReport rep = compute_metrics(y_true, y_pred, scores);
  CHECK(rep.accuracy == doctest::Approx(75.0));
  CHECK(rep.macro_precision == doctest::Approx(100.0 * (1.0 + 2.0 / 3.0) / 2.0));
  CHECK(rep.macro_recall == doctest::Approx(75.0));
  CHECK(rep.confusion[0][0] == 1);
  CHECK(rep.confusion[0][1] == 1);
  CHECK(rep.confusion[1][1] == 2);
}

TEST_CASE("perfect predictions score 100 everywhere with AUC 1") {
  Rng rng(3);
  const std::size_t n = 24, c = 4;
  std::vector<int> y_true, y_pred;
  Tensor scores({n, c});
  for (std::size_t i = 0; i < n; ++i) {
    int y = static_cast<int>(i % c);
    y_true.push_back(y);
    y_pred.push_back(y);
    for (std::size_t k = 0; k < c; ++k) scores.v[i * c + k] = 0.02;
    scores.v[i * c + static_cast<std::size_t>(y)] = 1.0 - 0.02 * (c - 1);
  }
  MetricsReport rep = compute_metrics(y_true, y_pred, scores);
  CHECK(rep.accuracy == doctest::Approx(100.0));
  CHECK(rep.macro_precision == doctest::Approx(100.0));
  CHECK(rep.macro_recall == doctest::Approx(100.0));
  CHECK(rep.macro_f1 == doctest::Approx(100.0));
  CHECK(rep.macro_auc == doctest::Approx(1.0));
}

TEST_CASE("constant scores give chance AUC") {
  std::vector<int> y_true = {0, 1, 0, 1, 1, 0};
  std::vector<int> y_pred = {0, 0, 0, 0, 0, 0};
  Tensor scores({6, 2});
  for (double& v : scores.v) v = 0.5;
  MetricsReport rep = compute_metrics(y_true, y_pred, scores);
  for (const RocCurve& curve : rep.roc) CHECK(curve.auc == doctest::Approx(0.5));
}

TEST_CASE("row sums of the confusion matrix match per-class test counts") {
  Rng rng(9);
  const std::size_t n = 60, c = 5;
  std::vector<int> y_true, y_pred;
  for (std::size_t i = 0; i < n; ++i) {
    y_true.push_back(static_cast<int>(rng.below(c)));
    y_pred.push_back(static_cast<int>(rng.below(c)));
  }
  Tensor scores = simplex_scores(n, c, rng);
  MetricsReport rep = compute_metrics(y_true, y_pred, scores);
  for (std::size_t k = 0; k < c; ++k) {
    std::size_t count = 0;
    for (int y : y_true)
      if (y == static_cast<int>(k)) ++count;
    std::size_t row_sum = 0;
    for (std::size_t j = 0; j < c; ++j) row_sum += rep.confusion[k][j];
    CHECK(row_sum == count);
  }
}

TEST_CASE("brute-force counting oracle agrees on 1000 random draws") {
  Rng rng(101);
  for (int trial = 0; trial < 1000; ++trial) {
    std::size_t c = 2 + rng.below(9);  // 2..10 classes
    std::size_t n = 10 + rng.below(41);
    std::vector<int> y_true, y_pred;
    for (std::size_t i = 0; i < n; ++i) {
      y_true.push_back(static_cast<int>(rng.below(c)));
      y_pred.push_back(static_cast<int>(rng.below(c)));
    }
    Tensor scores = simplex_scores(n, c, rng);
    MetricsReport rep = compute_metrics(y_true, y_pred, scores);
    OracleMetrics oracle = brute_force_metrics(y_true, y_pred, scores);
    CHECK(std::abs(rep.accuracy - oracle.accuracy) < 1e-12);
    CHECK(std::abs(rep.macro_precision - oracle.macro_precision) < 1e-12);
    CHECK(std::abs(rep.macro_recall - oracle.macro_recall) < 1e-12);
    CHECK(std::abs(rep.macro_f1 - oracle.macro_f1) < 1e-12);
    CHECK(rep.confusion == oracle.confusion);
    for (std::size_t k = 0; k < c; ++k)
      CHECK(std::abs(rep.roc[k].auc - oracle.auc_per_class[k]) < 1e-12);
  }
}

TEST_CASE("AUC is invariant under strictly monotone score transforms") {
  Rng rng(55);
  const std::size_t n = 40, c = 4;
  std::vector<int> y_true, y_pred;
  for (std::size_t i = 0; i < n; ++i) {
    y_true.push_back(static_cast<int>(rng.below(c)));
    y_pred.push_back(static_cast<int>(rng.below(c)));
  }
  Tensor scores = simplex_scores(n, c, rng);
  MetricsReport base = compute_metrics(y_true, y_pred, scores);

  Tensor warped = scores;
  for (double& v : warped.v) v = v * v * v + 2.0 * v;  // strictly increasing
  MetricsReport after = compute_metrics(y_true, y_pred, warped, /*check_simplex=*/false);
  for (std::size_t k = 0; k < c; ++k)
    CHECK(after.roc[k].auc == doctest::Approx(base.roc[k].auc).epsilon(1e-12));
  CHECK(after.macro_auc == doctest::Approx(base.macro_auc).epsilon(1e-12));
}

TEST_CASE("classes absent from y_true are flagged with zero recall") {
  std::vector<int> y_true = {0, 0, 1, 1};
  std::vector<int> y_pred = {0, 2, 1, 1};
  Rng rng(7);
  Tensor scores = simplex_scores(4, 3, rng);
  MetricsReport rep = compute_metrics(y_true, y_pred, scores);
  REQUIRE(rep.absent_classes.size() == 1);
  CHECK(rep.absent_classes[0] == 2);
}

TEST_CASE("input validation") {
  std::vector<int> y_true = {0, 1};
  std::vector<int> y_short = {0};
  Rng rng(1);
  Tensor scores = simplex_scores(2, 2, rng);
  CHECK_THROWS_AS(compute_metrics(y_true, y_short, scores), std::invalid_argument);
  Tensor bad = scores;
  bad.v[0] = 0.9;
  bad.v[1] = 0.9;
  CHECK_THROWS_AS(compute_metrics(y_true, y_true, bad), std::invalid_argument);
  std::vector<int> out_of_range = {0, 5};
  CHECK_THROWS_AS(compute_metrics(y_true, out_of_range, scores), std::invalid_argument);
}

TEST_CASE("roc csv lists monotone points from (0,0) to (1,1)") {
  Rng rng(31);
  const std::size_t n = 30, c = 3;
  std::vector<int> y_true, y_pred;
  for (std::size_t i = 0; i < n; ++i) {
    y_true.push_back(static_cast<int>(rng.below(c)));
    y_pred.push_back(static_cast<int>(rng.below(c)));
  }
  Tensor scores = simplex_scores(n, c, rng);
  MetricsReport rep = compute_metrics(y_true, y_pred, scores);
  for (const RocCurve& curve : rep.roc) {
    REQUIRE(curve.fpr.size() >= 2);
    CHECK(curve.fpr.front() == 0.0);
    CHECK(curve.tpr.front() == 0.0);
    CHECK(curve.fpr.back() == doctest::Approx(1.0));
    CHECK(curve.tpr.back() == doctest::Approx(1.0));
    for (std::size_t i = 1; i < curve.fpr.size(); ++i) {
      CHECK(curve.fpr[i] >= curve.fpr[i - 1]);
      CHECK(curve.tpr[i] >= curve.tpr[i - 1]);
    }
  }
  CHECK(rep.roc_csv().rfind("class,fpr,tpr\n", 0) == 0);
}

}  // TEST_SUITE
