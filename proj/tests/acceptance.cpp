// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Built as its own binary so `ctest` runs it alongside the unit
// suites.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <vector>

#include "heartid/cwt.hpp"
#include "heartid/delineation.hpp"
#include "heartid/experiment.hpp"
#include "heartid/fusion.hpp"
#include "heartid/metrics.hpp"
#include "heartid/pan_tompkins.hpp"
#include "heartid/savgol.hpp"
#include "heartid/synth_ecg.hpp"
#include "test_util.hpp"

using namespace heartid;

namespace {

int g_failures = 0;

class Criterion {
 public:
  Criterion(int number, const std::string& name) : number_(number), name_(name) {
    start_ = std::chrono::steady_clock::now();
  }

  void expect(bool ok, const std::string& detail) {
    if (!ok) {
      ok_ = false;
      if (!detail.empty()) failures_.push_back(detail);
    }
  }

  void finish(const std::string& summary = "") {
    auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
                       std::chrono::steady_clock::now() - start_)
                       .count();
    std::printf("[%s] criterion %d: %s (%.1f s)%s%s\n", ok_ ? "PASS" : "FAIL", number_,
                name_.c_str(), static_cast<double>(elapsed) / 1000.0,
                summary.empty() ? "" : " -- ", summary.c_str());
    for (const std::string& f : failures_) std::printf("       detail: %s\n", f.c_str());
    if (!ok_) ++g_failures;
  }

 private:
  int number_;
  std::string name_;
  bool ok_ = true;
  std::vector<std::string> failures_;
  std::chrono::steady_clock::time_point start_;
};

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.4f", v);
  return buf;
}

// ------------------------------------------------------------ criterion 1

void criterion_scale_table() {
  Criterion c(1, "CWT scale table matches the published per-dataset values");
  struct Row {
    const char* name;
    double fs, a_min, a_max;
  };
  const Row rows[] = {{"fs=500", 500, 4.06, 812.50},
                      {"fs=360", 360, 2.93, 585.00},
                      {"fs=1000", 1000, 8.13, 1625.00},
                      {"fs=250", 250, 2.03, 406.25}};
  for (const Row& r : rows) {
    CwtPlan plan;
    plan.fs = r.fs;
    double lo = scale_for_frequency(100.0, plan);
    double hi = scale_for_frequency(0.5, plan);
    c.expect(std::abs(lo - r.a_min) <= 0.01,
             std::string(r.name) + " a_min " + fmt(lo) + " vs " + fmt(r.a_min));
    c.expect(std::abs(hi - r.a_max) <= 0.01,
             std::string(r.name) + " a_max " + fmt(hi) + " vs " + fmt(r.a_max));
  }
  c.finish("8 table entries within 0.01");
}

// ------------------------------------------------------------ criterion 2

void criterion_savgol() {
  Criterion c(2, "Savitzky-Golay polynomial reproduction and coefficients");
  // window 11 order 3 on an exact cubic: interior relative error < 1e-9
  SavGolConfig cfg{5, 3};
  std::vector<double> x(200);
  for (std::size_t n = 0; n < x.size(); ++n) {
    double t = static_cast<double>(n);
    x[n] = 3.0 + 0.4 * t + 0.015 * t * t + 0.0007 * t * t * t;
  }
  std::vector<double> y = savgol_filter(x, cfg);
  double worst = 0.0;
  for (std::size_t n = 5; n + 5 < x.size(); ++n)
    worst = std::max(worst, std::abs(y[n] - x[n]) / std::abs(x[n]));
  c.expect(worst < 1e-9, "cubic interior relative error " + fmt(worst));

  // window 5 order 2 weights: frozen values and the independent oracle
  std::vector<double> w = savgol_coefficients({2, 2});
  const double frozen[] = {-3.0 / 35, 12.0 / 35, 17.0 / 35, 12.0 / 35, -3.0 / 35};
  std::vector<double> oracle = testutil::gram_savgol_weights(2, 2);
  for (std::size_t i = 0; i < 5; ++i) {
    c.expect(std::abs(w[i] - frozen[i]) < 1e-12, "weight vs frozen at " + std::to_string(i));
    c.expect(std::abs(w[i] - oracle[i]) < 1e-12, "weight vs oracle at " + std::to_string(i));
  }
  c.finish("cubic max rel err " + fmt(worst));
}

// ------------------------------------------------------------ criterion 3

void criterion_pan_tompkins() {
  Criterion c(3, "Pan-Tompkins sensitivity and PPV >= 0.99 on synthetic ECG");
  double worst_se = 1.0, worst_ppv = 1.0;
  for (double bpm : {60.0, 80.0, 100.0, 120.0}) {
    for (double fs : {250.0, 360.0, 500.0}) {
      for (double noise : {0.0, 0.05}) {
        SyntheticEcgSpec spec;
        spec.heart_rate_bpm = bpm;
        spec.noise_std_mv = noise;
        spec.seed = static_cast<std::uint64_t>(bpm * 1000 + fs + noise * 100);
        SynthResult res = synth_ecg(spec, 30.0, fs);
        RPeakList peaks = detect_r_peaks(res.record);

        const double tol = 0.040 * fs;
        std::vector<bool> used(peaks.indices.size(), false);
        std::size_t tp = 0;
        for (std::size_t t : res.r_peaks) {
          for (std::size_t j = 0; j < peaks.indices.size(); ++j) {
            if (used[j]) continue;
            if (std::abs(static_cast<double>(peaks.indices[j]) -
                         static_cast<double>(t)) <= tol) {
              used[j] = true;
              ++tp;
              break;
            }
          }
        }
        double se = static_cast<double>(tp) / static_cast<double>(res.r_peaks.size());
        double ppv = peaks.indices.empty()
                         ? 0.0
                         : static_cast<double>(tp) / static_cast<double>(peaks.indices.size());
        worst_se = std::min(worst_se, se);
        worst_ppv = std::min(worst_ppv, ppv);
        std::ostringstream tag;
        tag << "bpm=" << bpm << " fs=" << fs << " noise=" << noise;
        c.expect(se >= 0.99, tag.str() + " sensitivity " + fmt(se));
        c.expect(ppv >= 0.99, tag.str() + " ppv " + fmt(ppv));
      }
    }
  }
  c.finish("worst sensitivity " + fmt(worst_se) + ", worst ppv " + fmt(worst_ppv));
}

// ------------------------------------------------------------ criterion 4

Tensor random_tensor(std::vector<std::size_t> shape, Rng& rng) {
  Tensor t(std::move(shape));
  for (double& v : t.v) v = rng.uniform(-1.0, 1.0);
  return t;
}

double check_single_layer(Layer& layer, const Tensor& x0, std::uint64_t seed,
                          bool train_mode = false) {
  Rng setup(seed);
  Param input("input", x0.shape);
  input.w = x0;
  Rng probe(seed + 1);
  Tensor y0 = layer.forward(input.w, train_mode, probe);
  Tensor coeff(y0.shape);
  for (double& v : coeff.v) v = setup.uniform(-1, 1);

  std::vector<Param*> params;
  layer.collect_params(params);
  params.push_back(&input);
  auto run = [&](bool with_grad) {
    Rng rng(seed + 1);
    Tensor y = layer.forward(input.w, train_mode, rng);
    if (with_grad) {
      Tensor gx = layer.backward(coeff);
      for (std::size_t i = 0; i < gx.v.size(); ++i) input.g.v[i] += gx.v[i];
    }
    double loss = 0.0;
    for (std::size_t i = 0; i < y.v.size(); ++i) loss += coeff.v[i] * y.v[i];
    return loss;
  };
  return testutil::max_grad_rel_err(params, run);
}

void criterion_gradients() {
  Criterion c(4, "finite-difference gradient check, every layer and the fusion model");
  Rng rng(404);
  double worst = 0.0;
  auto track = [&](const char* name, double err) {
    worst = std::max(worst, err);
    c.expect(err < 1e-4, std::string(name) + " rel err " + fmt(err));
  };
  {
    Conv1d l("c1", 2, 3, 5, 1, rng);
    track("conv1d", check_single_layer(l, random_tensor({2, 2, 12}, rng), 1));
  }
  {
    Conv2d l("c2", 2, 3, 3, 2, rng);
    track("conv2d", check_single_layer(l, random_tensor({2, 2, 8, 8}, rng), 2));
  }
  {
    Dense l("d", 6, 4, rng);
    track("dense", check_single_layer(l, random_tensor({3, 6}, rng), 3));
  }
  {
    Tanh l;
    track("tanh", check_single_layer(l, random_tensor({3, 5}, rng), 4));
  }
  {
    Sigmoid l;
    track("sigmoid", check_single_layer(l, random_tensor({3, 5}, rng), 5));
  }
  {
    Dropout l(0.5);
    track("dropout", check_single_layer(l, random_tensor({3, 10}, rng), 6, true));
  }
  {
    Relu l;
    track("relu", check_single_layer(l, random_tensor({3, 8}, rng), 7));
  }
  {
    MaxPool1d l(3);
    track("maxpool1d", check_single_layer(l, random_tensor({2, 2, 9}, rng), 8));
  }
  {
    MaxPool2d l(2);
    track("maxpool2d", check_single_layer(l, random_tensor({2, 2, 6, 6}, rng), 9));
  }
  {
    GlobalAvgPool l;
    track("avgpool", check_single_layer(l, random_tensor({2, 3, 4, 4}, rng), 10));
  }
  // softmax cross-entropy
  {
    Param logits("logits", {4, 3});
    logits.w = random_tensor({4, 3}, rng);
    std::vector<int> labels = {0, 2, 1, 2};
    SoftmaxXent xent;
    std::vector<Param*> params = {&logits};
    auto run = [&](bool with_grad) {
      double loss = xent.forward(logits.w, labels);
      if (with_grad) {
        Tensor g = xent.backward();
        for (std::size_t i = 0; i < g.v.size(); ++i) logits.g.v[i] += g.v[i];
      }
      return loss;
    };
    track("softmax-xent", testutil::max_grad_rel_err(params, run));
  }

  // full attention-fusion model on a 3-subject micro-dataset
  {
    Branch1DConfig b1;
    b1.input_len = 16;
    b1.kernel_sizes = {3, 5, 9};
    b1.channels_per_path = 2;
    b1.depth = 1;
    b1.embed_dim = 6;
    Branch2DConfig b2;
    b2.input_h = 8;
    b2.input_w = 8;
    b2.base_channels = 2;
    b2.blocks = 1;
    b2.embed_dim = 6;
    FusionConfig fc;
    fc.mode = FusionConfig::Mode::Attention;
    fc.latent_dim = 5;
    fc.attn_hidden = 4;
    Rng init(405);
    FusionModel model(b1, b2, fc, 3, 0.5, init);

    Batch batch;
    batch.x1 = random_tensor({6, 1, 16}, rng);
    batch.x2 = random_tensor({6, 1, 8, 8}, rng);
    batch.labels = {0, 1, 2, 0, 1, 2};
    SoftmaxXent xent;
    std::vector<Param*> params = model.params();
    auto run = [&](bool with_grad) {
      Rng r(406);  // dropout masks repeat across evaluations
      Tensor logits = model.forward_logits(batch, /*train=*/true, r);
      double loss = xent.forward(logits, batch.labels);
      if (with_grad) model.backward(xent.backward());
      return loss;
    };
    track("attention-fusion-model", testutil::max_grad_rel_err(params, run));
  }
  c.finish("max relative error " + fmt(worst));
}

// ------------------------------------------------------------ criterion 5

void criterion_fusion_algebra() {
  Criterion c(5, "fusion algebra on 1000 random draws");
  Rng rng(505);
  AttentionFusion af(4, 5, 3, 4, rng);
  std::vector<Param*> ps;
  af.collect_params(ps);
  // zero parameters force alpha = 0.5
  for (auto* p : ps) p->w.fill(0.0);
  Rng fwd(1);
  Tensor f1a({1, 4}), f2a({1, 5});
  for (double& v : f1a.v) v = rng.uniform(-1, 1);
  for (double& v : f2a.v) v = rng.uniform(-1, 1);
  AttentionFusion::Output zero_out = af.forward(f1a, f2a, false, fwd);
  c.expect(std::abs(zero_out.alphas[0] - 0.5) < 1e-15, "zero-parameter alpha=0.5");

  bool simplex_ok = true, endpoint_ok = true, alpha_ok = true, convex_ok = true;
  for (int trial = 0; trial < 1000; ++trial) {
    // score fusion endpoints and simplex preservation
    std::size_t cls = 2 + rng.below(6);
    std::vector<double> s1(cls), s2(cls);
    double t1 = 0, t2 = 0;
    for (std::size_t i = 0; i < cls; ++i) {
      s1[i] = rng.uniform(0.0, 1.0) + 1e-9;
      s2[i] = rng.uniform(0.0, 1.0) + 1e-9;
      t1 += s1[i];
      t2 += s2[i];
    }
    for (std::size_t i = 0; i < cls; ++i) {
      s1[i] /= t1;
      s2[i] /= t2;
    }
    if (fuse_scores(s1, s2, 1.0) != s1 || fuse_scores(s1, s2, 0.0) != s2)
      endpoint_ok = false;
    std::vector<double> fused = fuse_scores(s1, s2, rng.uniform(0.0, 1.0));
    double sum = 0.0;
    for (double v : fused) {
      if (v < 0) simplex_ok = false;
      sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-6) simplex_ok = false;

    // attention gate bounds and convexity
    for (auto* p : ps)
      for (double& v : p->w.v) v = rng.uniform(-2.5, 2.5);
    Tensor f1({1, 4}), f2({1, 5});
    for (double& v : f1.v) v = rng.uniform(-4, 4);
    for (double& v : f2.v) v = rng.uniform(-4, 4);
    AttentionFusion::Output out = af.forward(f1, f2, false, fwd);
    if (!(out.alphas[0] > 0.0 && out.alphas[0] < 1.0)) alpha_ok = false;
    const Tensor& p1 = af.projected1();
    const Tensor& p2 = af.projected2();
    for (std::size_t i = 0; i < out.fused.v.size(); ++i) {
      double lo = std::min(p1.v[i], p2.v[i]) - 1e-12;
      double hi = std::max(p1.v[i], p2.v[i]) + 1e-12;
      if (out.fused.v[i] < lo || out.fused.v[i] > hi) convex_ok = false;
    }
  }
  c.expect(endpoint_ok, "lambda in {0,1} returns the unimodal scores exactly");
  c.expect(simplex_ok, "fused scores stay on the simplex");
  c.expect(alpha_ok, "alpha strictly inside (0,1)");
  c.expect(convex_ok, "fused output componentwise inside the projected endpoints");
  c.finish();
}

// ------------------------------------------------------------ criterion 6

void criterion_metrics_oracle() {
  Criterion c(6, "metrics equal brute-force counting; AUC monotone-invariant");
  Rng rng(606);
  bool agree = true;
  for (int trial = 0; trial < 1000; ++trial) {
    std::size_t cls = 2 + rng.below(9);
    std::size_t n = 10 + rng.below(41);
    std::vector<int> y_true, y_pred;
    for (std::size_t i = 0; i < n; ++i) {
      y_true.push_back(static_cast<int>(rng.below(cls)));
      y_pred.push_back(static_cast<int>(rng.below(cls)));
    }
    Tensor scores({n, cls});
    for (std::size_t i = 0; i < n; ++i) {
      double total = 0.0;
      for (std::size_t k = 0; k < cls; ++k) {
        scores.v[i * cls + k] = rng.uniform(0.001, 1.0);
        total += scores.v[i * cls + k];
      }
      for (std::size_t k = 0; k < cls; ++k) scores.v[i * cls + k] /= total;
    }
    MetricsReport rep = compute_metrics(y_true, y_pred, scores);
    testutil::OracleMetrics oracle = testutil::brute_force_metrics(y_true, y_pred, scores);
    if (std::abs(rep.accuracy - oracle.accuracy) > 1e-12 ||
        std::abs(rep.macro_precision - oracle.macro_precision) > 1e-12 ||
        std::abs(rep.macro_recall - oracle.macro_recall) > 1e-12 ||
        std::abs(rep.macro_f1 - oracle.macro_f1) > 1e-12 ||
        rep.confusion != oracle.confusion)
      agree = false;
    for (std::size_t k = 0; k < cls; ++k)
      if (std::abs(rep.roc[k].auc - oracle.auc_per_class[k]) > 1e-12) agree = false;

    if (trial % 50 == 0) {  // monotone transform leaves every AUC unchanged
      Tensor warped = scores;
      for (double& v : warped.v) v = std::exp(2.0 * v) + v;
      MetricsReport after = compute_metrics(y_true, y_pred, warped, false);
      for (std::size_t k = 0; k < cls; ++k)
        if (std::abs(after.roc[k].auc - rep.roc[k].auc) > 1e-12) agree = false;
    }
  }
  c.expect(agree, "all 1000 draws agree to 1e-12");
  c.finish();
}

// ------------------------------------------------------------ criterion 7

void criterion_end_to_end() {
  Criterion c(7, "end-to-end overfit: 10 subjects x 20 PT segments");

  // full pipeline on synthetic records
  std::vector<SyntheticEcgSpec> population = make_synth_population(10, 700);
  DatasetManifest manifest;
  manifest.declared_fs_hz = 250.0;
  for (std::size_t s = 0; s < population.size(); ++s) {
    SyntheticEcgSpec spec = population[s];
    spec.noise_std_mv = 0.01;
    ManifestEntry e;
    e.kind = ManifestEntry::Kind::Synth;
    e.source = spec.to_string(35.0);
    e.subject_id = "s" + std::to_string(10 + s);  // fixed-width sort
    e.session_id = "a";
    manifest.entries.push_back(e);
  }

  PipelineOptions opt;
  opt.strategy = SegmentStrategy::PT;
  opt.target_len = 256;
  opt.budget_per_subject = 20;
  opt.f_min = 1.0;
  opt.f_max = 60.0;
  opt.n_scales = 48;
  opt.img_h = 32;
  opt.img_w = 32;
  opt.seed = 701;
  BuildLog log;
  Dataset data = build_dataset(manifest, "", opt, &log);
  c.expect(data.size() == 200, "200 instances built, got " + std::to_string(data.size()));
  c.expect(data.num_classes() == 10, "10 subjects present");

  ModelConfigs mc;
  mc.branch1d.input_len = 256;
  mc.branch1d.kernel_sizes = {9, 19, 39};
  mc.branch1d.channels_per_path = 10;
  mc.branch1d.depth = 2;
  mc.branch1d.embed_dim = 128;
  mc.branch2d.input_h = 32;
  mc.branch2d.input_w = 32;
  mc.branch2d.base_channels = 10;
  mc.branch2d.blocks = 3;
  mc.branch2d.embed_dim = 128;
  mc.fusion.mode = FusionConfig::Mode::Attention;
  mc.fusion.latent_dim = 128;
  mc.fusion.attn_hidden = 32;
  mc.train.learning_rate = 1e-3;  // Adam
  mc.train.batch_size = 16;
  mc.train.max_epochs = 50;
  mc.train.patience = 50;  // the criterion grants the full epoch cap
  mc.train.dropout = 0.5;

  // like make_fusion_trainer, but also measures eval-mode training accuracy
  std::vector<double> fold_train_acc;
  TrainEvalFn fn = [&](const Dataset& train, const Dataset& val, const Dataset& test,
                       std::uint64_t seed) {
    Rng init_rng(fanout_seed(seed, "init"));
    FusionModel model(mc.branch1d, mc.branch2d, mc.fusion, train.num_classes(),
                      mc.train.dropout, init_rng);
    TrainConfig tc = mc.train;
    tc.seed = seed;
    FitResult fr = fit(model, train, val, tc);
    PredictOutput on_train = predict(model, train);
    std::size_t correct = 0;
    std::vector<int> labels = train.labels();
    for (std::size_t i = 0; i < labels.size(); ++i)
      if (on_train.predicted[i] == labels[i]) ++correct;
    fold_train_acc.push_back(100.0 * static_cast<double>(correct) /
                             static_cast<double>(labels.size()));
    PredictOutput on_test = predict(model, test);
    FoldEval ev;
    ev.y_pred = std::move(on_test.predicted);
    ev.scores = std::move(on_test.probs);
    ev.alphas = std::move(on_test.alphas);
    ev.curves = fr.curves;
    return ev;
  };

  CvOutcome cv = run_cv(data, 5, 702, fn);
  double min_train = 100.0;
  for (double a : fold_train_acc) min_train = std::min(min_train, a);
  c.expect(min_train >= 95.0, "train accuracy per fold >= 95, worst " + fmt(min_train));
  c.expect(cv.aggregate.mean_accuracy >= 90.0,
           "5-fold test accuracy >= 90, got " + fmt(cv.aggregate.mean_accuracy));
  c.finish("train acc (worst fold) " + fmt(min_train) + ", test acc " +
           fmt(cv.aggregate.mean_accuracy));
}

// ------------------------------------------------------------ criterion 8

// half the identity bits live in the waveform, half in the spectrum
Dataset complementary_dataset(std::uint64_t seed) {
  const std::size_t len = 64, img = 16, per_class = 40;
  Rng rng(seed);
  Dataset data;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      data.classes.push_back("c" + std::to_string(a) + std::to_string(b));
  CwtPlan plan;
  plan.fs = 128.0;
  plan.f_min = 2.0;
  plan.f_max = 40.0;
  plan.n_scales = 12;
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      for (std::size_t i = 0; i < per_class; ++i) {
        Instance it;
        it.label = a * 2 + b;
        it.subject_id = data.classes[static_cast<std::size_t>(it.label)];
        // temporal view encodes bit a only: bump width
        it.x1 = Tensor({1, len});
        double width = a == 0 ? 3.0 : 7.0;
        for (std::size_t t = 0; t < len; ++t) {
          double d = (static_cast<double>(t) - 32.0) / width;
          it.x1.v[t] = std::exp(-0.5 * d * d) + 0.05 * rng.normal();
        }
        // spectral view encodes bit b only: tone frequency
        std::vector<double> tone(len);
        double freq = b == 0 ? 6.0 : 18.0;
        double phase = rng.uniform(0.0, 2.0 * M_PI);
        for (std::size_t t = 0; t < len; ++t)
          tone[t] = std::sin(2.0 * M_PI * freq * static_cast<double>(t) / plan.fs + phase) +
                    0.05 * rng.normal();
        Scalogram sc = render_scalogram(cwt(tone, plan), img, img);
        it.x2 = Tensor({1, img, img});
        std::copy(sc.pixels.begin(), sc.pixels.end(), it.x2.data());
        data.items.push_back(std::move(it));
      }
    }
  }
  return data;
}

void criterion_complementarity() {
  Criterion c(8, "attention fusion beats both unimodal branches on split information");

  ModelConfigs mc;
  mc.branch1d.input_len = 64;
  mc.branch1d.kernel_sizes = {3, 7, 15};
  mc.branch1d.channels_per_path = 3;
  mc.branch1d.depth = 1;
  mc.branch1d.embed_dim = 16;
  mc.branch2d.input_h = 16;
  mc.branch2d.input_w = 16;
  mc.branch2d.base_channels = 4;
  mc.branch2d.blocks = 2;
  mc.branch2d.embed_dim = 16;
  mc.fusion.mode = FusionConfig::Mode::Attention;
  mc.fusion.latent_dim = 12;
  mc.fusion.attn_hidden = 8;
  mc.train.batch_size = 16;
  mc.train.max_epochs = 40;
  mc.train.patience = 40;
  mc.train.dropout = 0.2;

  std::ostringstream detail;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    Dataset data = complementary_dataset(800 + seed);
    // stratified 60/20/20 split
    std::vector<std::size_t> pool(data.size());
    for (std::size_t i = 0; i < pool.size(); ++i) pool[i] = i;
    Rng rng(900 + seed);
    std::vector<std::size_t> train_pool, test_idx;
    stratified_split_indices(data, pool, 0.8, rng, train_pool, test_idx);
    std::vector<std::size_t> train_idx, val_idx;
    stratified_split_indices(data, train_pool, 0.75, rng, train_idx, val_idx);
    Dataset train = data.subset(train_idx);
    Dataset val = data.subset(val_idx);
    Dataset test = data.subset(test_idx);

    auto accuracy_of = [&](TrainEvalFn fn) {
      FoldEval ev = fn(train, val, test, 1000 + seed);
      std::vector<int> labels = test.labels();
      std::size_t correct = 0;
      for (std::size_t i = 0; i < labels.size(); ++i)
        if (ev.y_pred[i] == labels[i]) ++correct;
      return 100.0 * static_cast<double>(correct) / static_cast<double>(labels.size());
    };
    double acc_1d = accuracy_of(make_branch_trainer(BranchKind::Temporal1D, mc));
    double acc_2d = accuracy_of(make_branch_trainer(BranchKind::Spectral2D, mc));
    double acc_fused = accuracy_of(make_fusion_trainer(mc));
    detail << "seed " << seed << ": 1d " << fmt(acc_1d) << " 2d " << fmt(acc_2d)
           << " fused " << fmt(acc_fused) << "; ";
    c.expect(acc_fused >= std::max(acc_1d, acc_2d),
             "seed " + std::to_string(seed) + ": fused " + fmt(acc_fused) +
                 " vs unimodal max " + fmt(std::max(acc_1d, acc_2d)));
  }
  c.finish(detail.str());
}

// ------------------------------------------------------------ criterion 9

void criterion_lambda_sweep_shape() {
  Criterion c(9, "lambda sweep is non-increasing when the 2D head dominates");
  const std::size_t n = 200, cls = 5;
  Rng rng(909);
  Tensor s1({n, cls}), s2({n, cls});
  std::vector<int> labels;
  for (std::size_t i = 0; i < n; ++i) {
    int y = static_cast<int>(rng.below(cls));
    labels.push_back(y);
    int wrong = (y + 1 + static_cast<int>(rng.below(cls - 1))) % static_cast<int>(cls);
    if (wrong == y) wrong = (y + 1) % static_cast<int>(cls);
    for (std::size_t k = 0; k < cls; ++k) {
      s1.v[i * cls + k] = 0.04;
      s2.v[i * cls + k] = 0.04;
    }
    s1.v[i * cls + static_cast<std::size_t>(wrong)] = 0.84;  // 1D always wrong
    s2.v[i * cls + static_cast<std::size_t>(y)] = 0.84;      // 2D always right
  }
  std::vector<double> grid = {0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
  LambdaSweepResult res = sweep_lambda(s1, s2, labels, grid);

  // endpoint columns equal the unimodal accuracies exactly
  std::size_t c1 = 0, c2 = 0;
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t best1 = 0, best2 = 0;
    for (std::size_t k = 1; k < cls; ++k) {
      if (s1.v[i * cls + k] > s1.v[i * cls + best1]) best1 = k;
      if (s2.v[i * cls + k] > s2.v[i * cls + best2]) best2 = k;
    }
    if (static_cast<int>(best1) == labels[i]) ++c1;
    if (static_cast<int>(best2) == labels[i]) ++c2;
  }
  double acc1 = 100.0 * static_cast<double>(c1) / n;
  double acc2 = 100.0 * static_cast<double>(c2) / n;
  c.expect(res.accuracies.front() == acc2, "lambda=0 equals the 2D-only accuracy");
  c.expect(res.accuracies.back() == acc1, "lambda=1 equals the 1D-only accuracy");
  bool monotone = true;
  for (std::size_t i = 1; i < res.accuracies.size(); ++i)
    if (res.accuracies[i] > res.accuracies[i - 1] + 1e-12) monotone = false;
  c.expect(monotone, "accuracy non-increasing in lambda");
  c.finish("lambda=0: " + fmt(res.accuracies.front()) + ", lambda=1: " +
           fmt(res.accuracies.back()));
}

// ------------------------------------------------------------ criterion 10

void criterion_scale_statement() {
  Criterion c(10, "paper-scale accuracy reproduction is out of scope by design");
  c.finish(
      "the published headline accuracies (99.56 / 100.00 / 99.89 and the "
      "multi-session table) require the full public datasets and full-scale "
      "networks; this desk-scale harness ingests those datasets when supplied "
      "and reports metrics in the same format, but does not assert those numbers");
}

}  // namespace

int main() {
  std::printf("heartid acceptance suite\n");
  criterion_scale_table();
  criterion_savgol();
  criterion_pan_tompkins();
  criterion_gradients();
  criterion_fusion_algebra();
  criterion_metrics_oracle();
  criterion_end_to_end();
  criterion_complementarity();
  criterion_lambda_sweep_shape();
  criterion_scale_statement();
  if (g_failures > 0) {
    std::printf("%d criterion(s) FAILED\n", g_failures);
    return 1;
  }
  std::printf("all criteria passed\n");
  return 0;
}
