#include "heartid/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <thread>

#include "heartid/delineation.hpp"
#include "heartid/errors.hpp"
#include "heartid/pan_tompkins.hpp"

namespace heartid {

void stratified_split_indices(const Dataset& data, const std::vector<std::size_t>& pool,
                              double fraction, Rng& rng,
                              std::vector<std::size_t>& first,
                              std::vector<std::size_t>& second) {
  std::map<std::string, std::vector<std::size_t>> by_subject;
  for (std::size_t i : pool) by_subject[data.items[i].subject_id].push_back(i);
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

Dataset dataset_from_segments(const std::vector<Segment>& segments,
                              const PipelineOptions& options) {
  if (segments.empty()) throw DataError("no segments to build a dataset from");

  std::vector<std::string> subjects;
  for (const Segment& s : segments)
    if (std::find(subjects.begin(), subjects.end(), s.subject_id) == subjects.end())
      subjects.push_back(s.subject_id);
  std::sort(subjects.begin(), subjects.end());

  Dataset data;
  data.classes = subjects;
  data.items.resize(segments.size());

  auto build_one = [&](std::size_t i) {
    const Segment& s = segments[i];
    Instance& it = data.items[i];
    it.subject_id = s.subject_id;
    it.session_id = s.session_id;
    it.label = static_cast<int>(
        std::lower_bound(subjects.begin(), subjects.end(), s.subject_id) -
        subjects.begin());
    if (options.make_1d) {
      it.x1 = Tensor({1, s.values.size()});
      std::copy(s.values.begin(), s.values.end(), it.x1.data());
    }
    if (options.make_2d) {
      CwtPlan plan;
      plan.fs = s.source_fs;
      plan.f_min = options.f_min;
      plan.f_max = std::min(options.f_max, s.source_fs / 2.0);
      plan.n_scales = options.n_scales;
      plan.wavelet_center_freq = options.wavelet_center_freq;
      plan.log_power = options.log_power;
      Scalogram img = render_scalogram(cwt(s.values, plan), options.img_h,
                                       options.img_w, options.log_power);
      it.x2 = Tensor({1, img.height, img.width});
      std::copy(img.pixels.begin(), img.pixels.end(), it.x2.data());
    }
  };

  const std::size_t jobs = std::max<std::size_t>(1, options.jobs);
  if (jobs == 1 || segments.size() < 2) {
    for (std::size_t i = 0; i < segments.size(); ++i) build_one(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> workers;
    for (std::size_t w = 0; w < std::min(jobs, segments.size()); ++w)
      workers.emplace_back([&]() {
        for (std::size_t i = next.fetch_add(1); i < segments.size();
             i = next.fetch_add(1))
          build_one(i);
      });
    for (auto& t : workers) t.join();
  }
  return data;
}

std::vector<Segment> collect_segments(const DatasetManifest& manifest,
                                      const std::string& base_dir,
                                      const PipelineOptions& options, BuildLog* log) {
  BuildLog local;
  BuildLog& bl = log ? *log : local;

  std::vector<Segment> all;
  for (const ManifestEntry& entry : manifest.entries) {
    std::string note;
    EcgRecord rec = materialize_entry(entry, base_dir, manifest.declared_fs_hz,
                                      options.max_duration_s, &note);
    if (!note.empty()) bl.notes.push_back(note);
    ++bl.records;

    EcgRecord smoothed = rec;
    smoothed.samples_mv = savgol_filter(rec.samples_mv, options.savgol);
    RPeakList peaks = detect_r_peaks(smoothed);
    std::vector<FiducialMarks> marks = delineate(smoothed, peaks);
    bl.beats += marks.size();
    for (const auto& m : marks)
      if (m.valid) ++bl.valid_beats;

    std::uint64_t seg_seed = fanout_seed(
        options.seed, "segments/" + entry.subject_id + "/" + entry.session_id);
    try {
      std::vector<Segment> segs =
          extract_segments(smoothed, marks, options.strategy, options.target_len, seg_seed);
      all.insert(all.end(), segs.begin(), segs.end());
    } catch (const DataError& e) {
      bl.notes.push_back("record " + entry.subject_id + "/" + entry.session_id +
                         ": " + e.what());
    }
  }
  if (options.budget_per_subject > 0) {
    // budget per (subject, session): multi-session protocols keep every
    // session populated; with one session this is the plain per-subject cap
    std::map<std::string, std::size_t> counts;
    std::vector<Segment> kept;
    for (Segment& s : all) {
      std::size_t& c = counts[s.subject_id + "\x1f" + s.session_id];
      if (c < options.budget_per_subject) {
        kept.push_back(std::move(s));
        ++c;
      }
    }
    all = std::move(kept);
  }
  bl.segments = all.size();
  if (all.empty()) throw DataError("dataset build produced no segments");
  return all;
}

Dataset build_dataset(const DatasetManifest& manifest, const std::string& base_dir,
                      const PipelineOptions& options, BuildLog* log) {
  return dataset_from_segments(collect_segments(manifest, base_dir, options, log),
                               options);
}

std::vector<SyntheticEcgSpec> make_synth_population(std::size_t n_subjects,
                                                    std::uint64_t seed) {
  Rng rng(seed);
  std::vector<SyntheticEcgSpec> out;
  out.reserve(n_subjects);
  for (std::size_t i = 0; i < n_subjects; ++i) {
    SyntheticEcgSpec s;
    s.heart_rate_bpm = rng.uniform(55.0, 95.0);
    s.p = {rng.uniform(0.08, 0.25), rng.uniform(-190.0, -130.0), rng.uniform(19.5, 27.0)};
    s.q = {rng.uniform(-0.15, -0.05), rng.uniform(-30.0, -20.0), rng.uniform(6.0, 10.0)};
    s.r = {rng.uniform(0.7, 1.4), 0.0, rng.uniform(9.0, 16.0)};
    s.s = {rng.uniform(-0.30, -0.10), rng.uniform(22.0, 38.0), rng.uniform(6.0, 10.0)};
    s.t = {rng.uniform(0.20, 0.45), rng.uniform(220.0, 280.0), rng.uniform(30.0, 52.0)};
    s.seed = rng.next_u64();
    out.push_back(s);
  }
  return out;
}

namespace {

FoldEval eval_model(Model& model, const Dataset& test) {
  PredictOutput pred = predict(model, test);
  FoldEval ev;
  ev.y_pred = std::move(pred.predicted);
  ev.scores = std::move(pred.probs);
  ev.alphas = std::move(pred.alphas);
  return ev;
}

}  // namespace

TrainEvalFn make_fusion_trainer(const ModelConfigs& configs) {
  return [configs](const Dataset& train, const Dataset& val, const Dataset& test,
                   std::uint64_t seed) {
    Rng init_rng(fanout_seed(seed, "init"));
    FusionModel model(configs.branch1d, configs.branch2d, configs.fusion,
                      train.num_classes(), configs.train.dropout, init_rng);
    TrainConfig tc = configs.train;
    tc.seed = seed;
    FitResult fit_res = fit(model, train, val, tc);
    FoldEval ev = eval_model(model, test);
    ev.curves = fit_res.curves;
    return ev;
  };
}

TrainEvalFn make_branch_trainer(BranchKind kind, const ModelConfigs& configs) {
  return [kind, configs](const Dataset& train, const Dataset& val, const Dataset& test,
                         std::uint64_t seed) {
    Rng init_rng(fanout_seed(seed, "init"));
    BranchClassifier model(kind, configs.branch1d, configs.branch2d,
                           train.num_classes(), configs.train.dropout, init_rng);
    TrainConfig tc = configs.train;
    tc.seed = seed;
    FitResult fit_res = fit(model, train, val, tc);
    FoldEval ev = eval_model(model, test);
    ev.curves = fit_res.curves;
    return ev;
  };
}

TrainEvalFn make_score_fusion_trainer(const ModelConfigs& configs) {
  return [configs](const Dataset& train, const Dataset& val, const Dataset& test,
                   std::uint64_t seed) {
    Rng rng1(fanout_seed(seed, "init1d"));
    Rng rng2(fanout_seed(seed, "init2d"));
    BranchClassifier m1(BranchKind::Temporal1D, configs.branch1d, configs.branch2d,
                        train.num_classes(), configs.train.dropout, rng1);
    BranchClassifier m2(BranchKind::Spectral2D, configs.branch1d, configs.branch2d,
                        train.num_classes(), configs.train.dropout, rng2);
    TrainConfig tc1 = configs.train;
    tc1.seed = fanout_seed(seed, "train1d");
    TrainConfig tc2 = configs.train;
    tc2.seed = fanout_seed(seed, "train2d");
    fit(m1, train, val, tc1);
    FitResult fr2 = fit(m2, train, val, tc2);

    PredictOutput p1 = predict(m1, test);
    PredictOutput p2 = predict(m2, test);
    const std::size_t n = test.size(), c = train.num_classes();
    FoldEval ev;
    ev.scores = Tensor({n, c});
    const double lambda = configs.fusion.lambda;
    for (std::size_t i = 0; i < n; ++i) {
      std::span<const double> s1(p1.probs.data() + i * c, c);
      std::span<const double> s2(p2.probs.data() + i * c, c);
      std::vector<double> fused = fuse_scores(s1, s2, lambda);
      std::copy(fused.begin(), fused.end(), ev.scores.data() + i * c);
      std::size_t best = 0;
      for (std::size_t k = 1; k < c; ++k)
        if (fused[k] > fused[best]) best = k;
      ev.y_pred.push_back(static_cast<int>(best));
    }
    ev.curves = fr2.curves;  // spectral branch curves stand in for the pair
    return ev;
  };
}

SweepOutcome run_lambda_sweep(const Dataset& data, const ModelConfigs& configs,
                              const std::vector<double>& grid, std::uint64_t seed) {
  if (data.items.empty()) throw DataError("lambda sweep: empty dataset");
  std::vector<std::size_t> pool(data.size());
  for (std::size_t i = 0; i < pool.size(); ++i) pool[i] = i;
  Rng rng(fanout_seed(seed, "sweep_split"));
  std::vector<std::size_t> train_idx, test_idx;
  stratified_split_indices(data, pool, 0.8, rng, train_idx, test_idx);
  if (test_idx.empty()) throw DataError("lambda sweep: empty evaluation set");

  Dataset train_all = data.subset(train_idx);
  std::vector<std::size_t> sub(train_all.size());
  for (std::size_t i = 0; i < sub.size(); ++i) sub[i] = i;
  std::vector<std::size_t> val_idx, fit_idx;
  Rng vrng(fanout_seed(seed, "sweep_val"));
  stratified_split_indices(train_all, sub, 0.1, vrng, val_idx, fit_idx);
  Dataset train = train_all.subset(fit_idx);
  Dataset val = train_all.subset(val_idx);
  Dataset test = data.subset(test_idx);

  Rng rng1(fanout_seed(seed, "init1d"));
  Rng rng2(fanout_seed(seed, "init2d"));
  BranchClassifier m1(BranchKind::Temporal1D, configs.branch1d, configs.branch2d,
                      data.num_classes(), configs.train.dropout, rng1);
  BranchClassifier m2(BranchKind::Spectral2D, configs.branch1d, configs.branch2d,
                      data.num_classes(), configs.train.dropout, rng2);
  TrainConfig tc1 = configs.train;
  tc1.seed = fanout_seed(seed, "train1d");
  TrainConfig tc2 = configs.train;
  tc2.seed = fanout_seed(seed, "train2d");
  fit(m1, train, val, tc1);
  fit(m2, train, val, tc2);

  PredictOutput p1 = predict(m1, test);
  PredictOutput p2 = predict(m2, test);
  std::vector<int> labels = test.labels();

  SweepOutcome out;
  out.sweep = sweep_lambda(p1.probs, p2.probs, labels, grid);
  std::size_t c1 = 0, c2 = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (p1.predicted[i] == labels[i]) ++c1;
    if (p2.predicted[i] == labels[i]) ++c2;
  }
  out.accuracy_1d = 100.0 * static_cast<double>(c1) / static_cast<double>(labels.size());
  out.accuracy_2d = 100.0 * static_cast<double>(c2) / static_cast<double>(labels.size());
  return out;
}

}  // namespace heartid
