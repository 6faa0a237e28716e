// heartid: ECG biometric identification toolkit.
//
// Pipeline: WFDB/synthetic records -> Savitzky-Golay smoothing ->
// Pan-Tompkins R-peaks -> P/QRS/T delineation -> heartbeat segments ->
// Morlet scalograms -> dual-branch convolutional models with feature-,
// score-, or attention-guided fusion -> cross-validated metrics and reports.

#include <filesystem>
#include <iostream>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "heartid/checkpoint.hpp"
#include "heartid/delineation.hpp"
#include "heartid/errors.hpp"
#include "heartid/experiment.hpp"
#include "heartid/pan_tompkins.hpp"
#include "heartid/png_io.hpp"
#include "heartid/svg.hpp"
#include "heartid/version.hpp"
#include "heartid/wfdb.hpp"

namespace {

using namespace heartid;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitNumerical = 3;

// ------------------------------------------------------------ run config

// Sorted key=value echo of every effective parameter; its hash stamps all
// artifacts so two runs are comparable at a glance.
class ConfigEcho {
 public:
  void add(const std::string& key, const std::string& value) { kv_[key] = value; }
  void add(const std::string& key, double value) { kv_[key] = fmt_double_exact(value); }
  void add(const std::string& key, std::uint64_t value) { kv_[key] = std::to_string(value); }

  std::string text() const {
    std::ostringstream ss;
    for (const auto& [k, v] : kv_) ss << k << '=' << v << '\n';
    return ss.str();
  }
  std::uint64_t hash() const { return fnv1a64(text()); }
  ArtifactStamp stamp(std::uint64_t seed) const { return ArtifactStamp{seed, hash()}; }

  void write(const std::string& dir, std::uint64_t seed) const {
    make_dirs(dir);
    std::string body = stamp(seed).header_lines() + text();
    write_text_file((std::filesystem::path(dir) / "config_echo.txt").string(), body);
  }

 private:
  std::map<std::string, std::string> kv_;
};

// ---------------------------------------------------------- shared flags

struct PipelineFlags {
  std::string manifest_path;
  std::string base_dir;
  std::string strategy = "pt";
  std::size_t target_len = 256;
  std::size_t budget = 20;
  double max_duration = 0.0;
  int sg_window = 11;  // full window length, must be odd
  int sg_order = 3;
  double fmin = 0.5, fmax = 100.0;
  std::size_t scales = 64;
  std::size_t img_size = 64;
  bool log_power = false;
  std::size_t jobs = 1;

  void attach(CLI::App* cmd, bool with_cwt = true) {
    cmd->add_option("--manifest", manifest_path, "dataset manifest file")->required();
    cmd->add_option("--base-dir", base_dir, "base directory for relative record paths");
    cmd->add_option("--strategy", strategy, "segmentation strategy: pt|qrs|rr|random");
    cmd->add_option("--target-len", target_len, "segment length after resampling");
    cmd->add_option("--budget", budget, "max instances per subject and session (0 = unlimited)");
    cmd->add_option("--max-duration", max_duration, "truncate records to this many seconds");
    cmd->add_option("--sg-window", sg_window, "Savitzky-Golay window length (odd)");
    cmd->add_option("--sg-order", sg_order, "Savitzky-Golay polynomial order");
    if (with_cwt) {
      cmd->add_option("--fmin", fmin, "lowest CWT frequency (Hz)");
      cmd->add_option("--fmax", fmax, "highest CWT frequency (Hz)");
      cmd->add_option("--scales", scales, "number of CWT scales");
      cmd->add_option("--img-size", img_size, "scalogram render size (square)");
      cmd->add_flag("--log-power", log_power, "log-scale |W|^2 before normalizing");
      cmd->add_option("--jobs", jobs, "worker threads for scalogram generation");
    }
  }

  PipelineOptions to_options(std::uint64_t seed, bool make2d) const {
    if (sg_window < 3 || sg_window % 2 == 0)
      throw std::invalid_argument("--sg-window must be an odd length >= 3");
    PipelineOptions opt;
    opt.strategy = parse_strategy(strategy);
    opt.target_len = target_len;
    opt.budget_per_subject = budget;
    opt.max_duration_s = max_duration;
    opt.savgol = SavGolConfig{sg_window / 2, sg_order};
    opt.savgol.validate();
    opt.f_min = fmin;
    opt.f_max = fmax;
    opt.n_scales = scales;
    opt.log_power = log_power;
    opt.img_h = img_size;
    opt.img_w = img_size;
    opt.make_2d = make2d;
    opt.jobs = jobs;
    opt.seed = seed;
    return opt;
  }

  void echo_into(ConfigEcho& echo) const {
    echo.add("manifest", manifest_path);
    echo.add("strategy", strategy);
    echo.add("target_len", target_len);
    echo.add("budget", budget);
    echo.add("max_duration", max_duration);
    echo.add("sg_window", static_cast<std::size_t>(sg_window));
    echo.add("sg_order", static_cast<std::size_t>(sg_order));
    echo.add("fmin", fmin);
    echo.add("fmax", fmax);
    echo.add("scales", scales);
    echo.add("img_size", img_size);
    echo.add("log_power", std::string(log_power ? "1" : "0"));
  }
};

struct ModelFlags {
  std::string fusion = "attention";  // attention|feature|score|1d|2d
  double lambda = 0.9;
  std::size_t d1 = 512, d2 = 512;
  std::size_t latent = 256, attn_hidden = 128;
  std::size_t channels = 8, depth = 2;
  std::size_t base_ch = 8, blocks = 4;
  std::vector<std::size_t> kernels = {9, 19, 39};
  double lr = 1e-3;
  std::size_t batch = 16, epochs = 50, patience = 10;
  double dropout = 0.5;
  std::size_t folds = 5;

  void attach(CLI::App* cmd) {
    cmd->add_option("--fusion", fusion, "attention|feature|score|1d|2d");
    cmd->add_option("--lambda", lambda, "score-fusion weight on the 1D branch");
    cmd->add_option("--d1", d1, "1D branch embedding width");
    cmd->add_option("--d2", d2, "2D branch embedding width");
    cmd->add_option("--latent", latent, "shared projection dimension");
    cmd->add_option("--attn-hidden", attn_hidden, "attention hidden dimension");
    cmd->add_option("--channels", channels, "1D channels per kernel path");
    cmd->add_option("--depth", depth, "1D block count");
    cmd->add_option("--base-ch", base_ch, "2D stem channels");
    cmd->add_option("--blocks", blocks, "2D residual block count");
    cmd->add_option("--kernels", kernels, "1D kernel sizes (odd)");
    cmd->add_option("--lr", lr, "learning rate");
    cmd->add_option("--batch", batch, "batch size");
    cmd->add_option("--epochs", epochs, "max epochs");
    cmd->add_option("--patience", patience, "early-stop patience");
    cmd->add_option("--dropout", dropout, "dropout rate on dense heads");
    cmd->add_option("--folds", folds, "cross-validation folds");
  }

  ModelConfigs to_configs(const PipelineFlags& pf, std::uint64_t seed) const {
    ModelConfigs mc;
    mc.branch1d.input_len = pf.target_len;
    mc.branch1d.kernel_sizes = kernels;
    mc.branch1d.channels_per_path = channels;
    mc.branch1d.depth = depth;
    mc.branch1d.embed_dim = d1;
    mc.branch2d.input_h = pf.img_size;
    mc.branch2d.input_w = pf.img_size;
    mc.branch2d.base_channels = base_ch;
    mc.branch2d.blocks = blocks;
    mc.branch2d.embed_dim = d2;
    mc.fusion.lambda = lambda;
    mc.fusion.latent_dim = latent;
    mc.fusion.attn_hidden = attn_hidden;
    if (fusion == "feature") mc.fusion.mode = FusionConfig::Mode::Feature;
    else if (fusion == "score") mc.fusion.mode = FusionConfig::Mode::Score;
    else if (fusion == "attention") mc.fusion.mode = FusionConfig::Mode::Attention;
    else if (fusion != "1d" && fusion != "2d")
      throw std::invalid_argument("--fusion must be attention|feature|score|1d|2d");
    mc.train.learning_rate = lr;
    mc.train.batch_size = batch;
    mc.train.max_epochs = epochs;
    mc.train.patience = patience;
    mc.train.dropout = dropout;
    mc.train.seed = seed;
    return mc;
  }

  void echo_into(ConfigEcho& echo) const {
    echo.add("fusion", fusion);
    echo.add("lambda", lambda);
    echo.add("d1", d1);
    echo.add("d2", d2);
    echo.add("latent", latent);
    echo.add("attn_hidden", attn_hidden);
    echo.add("channels", channels);
    echo.add("depth", depth);
    echo.add("base_ch", base_ch);
    echo.add("blocks", blocks);
    std::ostringstream ks;
    for (std::size_t i = 0; i < kernels.size(); ++i) ks << (i ? "," : "") << kernels[i];
    echo.add("kernels", ks.str());
    echo.add("lr", lr);
    echo.add("batch", batch);
    echo.add("epochs", epochs);
    echo.add("patience", patience);
    echo.add("dropout", dropout);
    echo.add("folds", folds);
  }

  TrainEvalFn trainer(const ModelConfigs& mc) const {
    if (fusion == "1d") return make_branch_trainer(BranchKind::Temporal1D, mc);
    if (fusion == "2d") return make_branch_trainer(BranchKind::Spectral2D, mc);
    if (fusion == "score") return make_score_fusion_trainer(mc);
    return make_fusion_trainer(mc);
  }
};

std::string join_path(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

std::vector<double> parse_grid(const std::string& spec) {
  std::vector<std::string> parts = split(spec, ':');
  if (parts.size() != 3)
    throw std::invalid_argument("--grid expects start:stop:step");
  double start = std::stod(parts[0]), stop = std::stod(parts[1]),
         step = std::stod(parts[2]);
  if (step <= 0 || stop < start)
    throw std::invalid_argument("--grid expects start <= stop and step > 0");
  std::vector<double> grid;
  for (double v = start; v <= stop + 1e-9; v += step)
    grid.push_back(std::min(v, stop));
  return grid;
}

// ------------------------------------------------------------ reporting

void write_metrics_csv(const std::string& path, const CvOutcome& cv,
                       const ArtifactStamp& stamp) {
  std::ostringstream ss;
  ss << stamp.header_lines();
  ss << "fold,accuracy,macro_precision,macro_recall,macro_f1,macro_auc\n";
  for (std::size_t i = 0; i < cv.fold_reports.size(); ++i) {
    const MetricsReport& r = cv.fold_reports[i];
    ss << i << ',' << fmt_double(r.accuracy) << ',' << fmt_double(r.macro_precision)
       << ',' << fmt_double(r.macro_recall) << ',' << fmt_double(r.macro_f1) << ','
       << fmt_double(r.macro_auc) << '\n';
  }
  const AggregateStats& a = cv.aggregate;
  ss << "mean," << fmt_double(a.mean_accuracy) << ',' << fmt_double(a.mean_precision)
     << ',' << fmt_double(a.mean_recall) << ',' << fmt_double(a.mean_f1) << ','
     << fmt_double(a.mean_auc) << '\n';
  ss << "std," << fmt_double(a.std_accuracy) << ',' << fmt_double(a.std_precision)
     << ',' << fmt_double(a.std_recall) << ',' << fmt_double(a.std_f1) << ','
     << fmt_double(a.std_auc) << '\n';
  write_text_file(path, ss.str());
}

void write_confusion_csv(const std::string& path,
                         const std::vector<MetricsReport>& reports,
                         const ArtifactStamp& stamp) {
  if (reports.empty()) return;
  std::size_t c = reports[0].confusion.size();
  std::vector<std::vector<std::size_t>> total(c, std::vector<std::size_t>(c, 0));
  for (const auto& r : reports)
    for (std::size_t i = 0; i < c; ++i)
      for (std::size_t j = 0; j < c; ++j) total[i][j] += r.confusion[i][j];
  std::ostringstream ss;
  ss << stamp.header_lines();
  for (const auto& row : total) {
    for (std::size_t j = 0; j < row.size(); ++j) ss << (j ? "," : "") << row[j];
    ss << '\n';
  }
  write_text_file(path, ss.str());
}

void write_alpha_hist_csv(const std::string& path, const std::vector<double>& alphas,
                          const ArtifactStamp& stamp) {
  const std::size_t bins = 20;
  std::vector<std::size_t> hist(bins, 0);
  double mean = 0.0;
  for (double a : alphas) {
    std::size_t b = std::min(bins - 1, static_cast<std::size_t>(a * bins));
    hist[b]++;
    mean += a;
  }
  if (!alphas.empty()) mean /= static_cast<double>(alphas.size());
  std::ostringstream ss;
  ss << stamp.header_lines();
  ss << "# mean_alpha=" << fmt_double(mean) << '\n';
  ss << "bin_low,bin_high,count\n";
  for (std::size_t b = 0; b < bins; ++b)
    ss << fmt_double(static_cast<double>(b) / bins, 2) << ','
       << fmt_double(static_cast<double>(b + 1) / bins, 2) << ',' << hist[b] << '\n';
  write_text_file(path, ss.str());
}

// csv helper for the report command (skips # comments)
std::vector<std::vector<std::string>> read_csv_rows(const std::string& path) {
  std::istringstream in(read_text_file(path));
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    rows.push_back(split(t, ','));
  }
  return rows;
}

// ---------------------------------------------------------- subcommands

int cmd_synth(const std::string& out_dir, std::size_t subjects, std::size_t records,
              std::size_t sessions, double duration, double fs, double noise,
              std::uint64_t seed, int format, bool emit_truth) {
  make_dirs(out_dir);
  std::vector<SyntheticEcgSpec> population =
      make_synth_population(subjects, fanout_seed(seed, "population"));

  ConfigEcho echo;
  echo.add("command", std::string("synth"));
  echo.add("subjects", subjects);
  echo.add("records", records);
  echo.add("sessions", sessions);
  echo.add("duration", duration);
  echo.add("fs", fs);
  echo.add("noise", noise);
  echo.add("seed", seed);
  echo.add("format", static_cast<std::size_t>(format));
  echo.write(out_dir, seed);

  DatasetManifest manifest;
  manifest.declared_fs_hz = fs;
  for (std::size_t s = 0; s < subjects; ++s) {
    for (std::size_t sess = 0; sess < sessions; ++sess) {
      for (std::size_t r = 0; r < records; ++r) {
        SyntheticEcgSpec spec = population[s];
        spec.noise_std_mv = noise;
        spec.seed = fanout_seed(seed, "record/" + std::to_string(s) + "/" +
                                          std::to_string(sess) + "/" + std::to_string(r));
        std::string subject = "s" + std::to_string(s + 1);
        std::string session = "sess" + std::to_string(sess + 1);
        std::string name = subject + "_" + session + "_r" + std::to_string(r + 1);
        SynthResult res = synth_ecg(spec, duration, fs, subject, session);
        write_wfdb_record(out_dir, name, res.record, format);
        ManifestEntry entry;
        entry.kind = ManifestEntry::Kind::Wfdb;
        entry.source = name + ".hea";
        entry.subject_id = subject;
        entry.session_id = session;
        manifest.entries.push_back(entry);
        if (emit_truth) {
          std::ostringstream truth;
          truth << echo.stamp(seed).header_lines() << "r_index\n";
          for (std::size_t idx : res.r_peaks) truth << idx << '\n';
          write_text_file(join_path(out_dir, name + ".rtruth.csv"), truth.str());
        }
      }
    }
  }
  save_manifest(join_path(out_dir, "manifest.csv"), manifest);
  std::cout << "wrote " << manifest.entries.size() << " records and manifest.csv to "
            << out_dir << "\n";
  return kExitOk;
}

int cmd_ingest(const std::string& manifest_path, const std::string& base_dir) {
  DatasetManifest m = load_manifest(manifest_path);
  std::map<std::string, std::size_t> per_subject;
  double total_s = 0.0;
  for (const auto& e : m.entries) {
    EcgRecord rec = materialize_entry(e, base_dir, m.declared_fs_hz);
    per_subject[e.subject_id]++;
    total_s += rec.duration_s();
  }
  std::cout << "manifest: " << m.entries.size() << " records, "
            << m.subjects().size() << " subjects, " << m.sessions().size()
            << " sessions, " << fmt_double(total_s, 1) << " s of signal\n";
  for (const auto& [subject, count] : per_subject)
    std::cout << "  " << subject << ": " << count << " record(s)\n";
  return kExitOk;
}

int cmd_preprocess(const std::string& in_path, const std::string& lead, int sg_window,
                   int sg_order, const std::string& out_path, std::uint64_t seed) {
  if (sg_window < 3 || sg_window % 2 == 0)
    throw std::invalid_argument("--sg-window must be an odd length >= 3");
  EcgRecord rec = read_wfdb_record(in_path, lead);
  SavGolConfig cfg{sg_window / 2, sg_order};
  std::vector<double> smoothed = savgol_filter(rec.samples_mv, cfg);
  ConfigEcho echo;
  echo.add("command", std::string("preprocess"));
  echo.add("in", in_path);
  echo.add("sg_window", static_cast<std::size_t>(sg_window));
  echo.add("sg_order", static_cast<std::size_t>(sg_order));
  std::ostringstream ss;
  ss << echo.stamp(seed).header_lines() << "n,raw_mv,smoothed_mv\n";
  for (std::size_t i = 0; i < smoothed.size(); ++i)
    ss << i << ',' << fmt_double_exact(rec.samples_mv[i]) << ','
       << fmt_double_exact(smoothed[i]) << '\n';
  write_text_file(out_path, ss.str());
  std::cout << "wrote " << smoothed.size() << " samples to " << out_path << "\n";
  return kExitOk;
}

int cmd_segment(const PipelineFlags& pf, std::uint64_t seed, const std::string& out_path,
                const std::string& fiducials_path) {
  DatasetManifest manifest = load_manifest(pf.manifest_path);
  PipelineOptions opt = pf.to_options(seed, /*make2d=*/false);
  ConfigEcho echo;
  echo.add("command", std::string("segment"));
  pf.echo_into(echo);
  echo.add("seed", seed);

  BuildLog log;
  if (!fiducials_path.empty()) {
    // dump the per-beat fiducial table for the first record
    EcgRecord rec = materialize_entry(manifest.entries[0], pf.base_dir,
                                      manifest.declared_fs_hz, opt.max_duration_s);
    EcgRecord smoothed = rec;
    smoothed.samples_mv = savgol_filter(rec.samples_mv, opt.savgol);
    RPeakList peaks = detect_r_peaks(smoothed);
    write_text_file(fiducials_path, echo.stamp(seed).header_lines() +
                                        fiducial_table_csv(delineate(smoothed, peaks)));
  }
  std::vector<Segment> segments = collect_segments(manifest, pf.base_dir, opt, &log);
  write_segment_store(out_path, segments, echo.stamp(seed));
  std::cout << "records=" << log.records << " beats=" << log.beats
            << " valid_beats=" << log.valid_beats << " segments=" << log.segments
            << " invalid_rate=" << fmt_double(log.invalid_beat_rate(), 4) << '\n';
  for (const std::string& note : log.notes) std::cout << "note: " << note << '\n';
  std::cout << "wrote " << segments.size() << " segments to " << out_path << "\n";
  return kExitOk;
}

int cmd_scalogram(const std::string& store_path, double fmin, double fmax,
                  std::size_t scales, std::size_t img_size, bool log_power,
                  const std::string& png_dir, const std::string& matrix_dir,
                  std::uint64_t seed) {
  std::vector<Segment> segments = read_segment_store(store_path);
  if (segments.empty()) throw DataError("segment store is empty: " + store_path);
  if (png_dir.empty() && matrix_dir.empty())
    throw std::invalid_argument("scalogram: need --png-dir and/or --matrix-dir");
  if (!png_dir.empty()) make_dirs(png_dir);
  if (!matrix_dir.empty()) make_dirs(matrix_dir);
  ConfigEcho echo;
  echo.add("command", std::string("scalogram"));
  echo.add("store", store_path);
  echo.add("fmin", fmin);
  echo.add("fmax", fmax);
  echo.add("scales", scales);
  echo.add("img_size", img_size);

  std::size_t written = 0;
  for (std::size_t i = 0; i < segments.size(); ++i) {
    const Segment& s = segments[i];
    CwtPlan plan;
    plan.fs = s.source_fs;
    plan.f_min = fmin;
    plan.f_max = std::min(fmax, s.source_fs / 2.0);
    plan.n_scales = scales;
    plan.log_power = log_power;
    Scalogram img = render_scalogram(cwt(s.values, plan), img_size, img_size, log_power);
    std::string stem = s.subject_id + "_" + (s.session_id.empty() ? "x" : s.session_id) +
                       "_" + std::to_string(i);
    if (!png_dir.empty()) write_png_gray(join_path(png_dir, stem + ".png"), img);
    if (!matrix_dir.empty()) {
      std::ostringstream ss;
      ss << echo.stamp(seed).header_lines();
      for (std::size_t r = 0; r < img.height; ++r) {
        for (std::size_t c = 0; c < img.width; ++c)
          ss << (c ? "," : "") << fmt_double_exact(img.at(r, c));
        ss << '\n';
      }
      write_text_file(join_path(matrix_dir, stem + ".csv"), ss.str());
    }
    ++written;
  }
  std::cout << "rendered " << written << " scalograms\n";
  return kExitOk;
}

void write_run_reports(const std::string& out_dir, const CvOutcome& cv,
                       const ArtifactStamp& stamp, bool attention_mode) {
  write_metrics_csv(join_path(out_dir, "metrics.csv"), cv, stamp);
  write_confusion_csv(join_path(out_dir, "confusion.csv"), cv.fold_reports, stamp);
  if (!cv.fold_reports.empty())
    write_text_file(join_path(out_dir, "roc.csv"),
                    stamp.header_lines() + cv.fold_reports[0].roc_csv());
  for (std::size_t i = 0; i < cv.fold_curves.size(); ++i)
    if (!cv.fold_curves[i].train_loss.empty())
      write_text_file(join_path(out_dir, "curves_fold" + std::to_string(i) + ".csv"),
                      stamp.header_lines() + cv.fold_curves[i].to_csv());
  if (attention_mode)
    write_alpha_hist_csv(join_path(out_dir, "alpha_hist.csv"), cv.alphas, stamp);
}

int cmd_train(const PipelineFlags& pf, const ModelFlags& mf, std::uint64_t seed,
              const std::string& out_dir, bool save_ckpt) {
  DatasetManifest manifest = load_manifest(pf.manifest_path);
  bool needs_2d = mf.fusion != "1d";
  PipelineOptions opt = pf.to_options(seed, needs_2d);
  ModelConfigs mc = mf.to_configs(pf, seed);

  ConfigEcho echo;
  echo.add("command", std::string("train"));
  pf.echo_into(echo);
  mf.echo_into(echo);
  echo.add("seed", seed);
  echo.write(out_dir, seed);

  BuildLog log;
  Dataset data = build_dataset(manifest, pf.base_dir, opt, &log);
  std::cout << "dataset: " << data.size() << " instances, " << data.num_classes()
            << " subjects (invalid-beat rate " << fmt_double(log.invalid_beat_rate(), 4)
            << ")\n";

  CvOutcome cv = run_cv(data, mf.folds, seed, mf.trainer(mc));
  write_run_reports(out_dir, cv, echo.stamp(seed), mf.fusion == "attention");

  if (save_ckpt && (mf.fusion == "attention" || mf.fusion == "feature")) {
    // final model on a 90/10 split of everything, for `evaluate`
    std::vector<std::size_t> pool(data.size());
    for (std::size_t i = 0; i < pool.size(); ++i) pool[i] = i;
    Rng rng(fanout_seed(seed, "final_split"));
    std::vector<std::size_t> val_idx, train_idx;
    stratified_split_indices(data, pool, 0.1, rng, val_idx, train_idx);
    Rng init(fanout_seed(seed, "final_init"));
    FusionModel model(mc.branch1d, mc.branch2d, mc.fusion, data.num_classes(),
                      mc.train.dropout, init);
    TrainConfig tc = mc.train;
    tc.seed = fanout_seed(seed, "final_train");
    fit(model, data.subset(train_idx), data.subset(val_idx), tc);
    std::vector<Param*> params = model.params();
    save_checkpoint(join_path(out_dir, "checkpoint.bin"), echo.text(), params);
  }

  std::cout << "cv accuracy " << fmt_double(cv.aggregate.mean_accuracy, 2) << " +/- "
            << fmt_double(cv.aggregate.std_accuracy, 2) << " (macro F1 "
            << fmt_double(cv.aggregate.mean_f1, 2) << ")\n";
  std::cout << "reports written to " << out_dir << "\n";
  return kExitOk;
}

int cmd_evaluate(const PipelineFlags& pf, const ModelFlags& mf,
                 const std::string& ckpt_path, std::uint64_t seed,
                 const std::string& out_dir) {
  if (mf.fusion != "attention" && mf.fusion != "feature")
    throw std::invalid_argument("evaluate supports fusion modes attention|feature");
  CheckpointData ckpt = load_checkpoint(ckpt_path);
  DatasetManifest manifest = load_manifest(pf.manifest_path);
  PipelineOptions opt = pf.to_options(seed, true);
  ModelConfigs mc = mf.to_configs(pf, seed);

  ConfigEcho echo;
  echo.add("command", std::string("evaluate"));
  pf.echo_into(echo);
  mf.echo_into(echo);
  echo.add("checkpoint", ckpt_path);
  echo.add("seed", seed);
  echo.write(out_dir, seed);

  Dataset data = build_dataset(manifest, pf.base_dir, opt);
  Rng init(1);
  FusionModel model(mc.branch1d, mc.branch2d, mc.fusion, data.num_classes(),
                    mc.train.dropout, init);
  std::vector<Param*> params = model.params();
  apply_checkpoint(ckpt, params);

  PredictOutput pred = predict(model, data);
  std::vector<int> y_true = data.labels();
  MetricsReport rep = compute_metrics(y_true, pred.predicted, pred.probs);

  CvOutcome single;
  single.fold_reports.push_back(rep);
  single.alphas = pred.alphas;
  single.aggregate = aggregate_reports(single.fold_reports);
  write_run_reports(out_dir, single, echo.stamp(seed), mf.fusion == "attention");
  std::cout << "accuracy " << fmt_double(rep.accuracy, 2) << " macro F1 "
            << fmt_double(rep.macro_f1, 2) << " on " << data.size() << " instances\n";
  return kExitOk;
}

int cmd_sweep_lambda(const PipelineFlags& pf, const ModelFlags& mf,
                     const std::string& grid_spec, std::uint64_t seed,
                     const std::string& out_dir) {
  DatasetManifest manifest = load_manifest(pf.manifest_path);
  PipelineOptions opt = pf.to_options(seed, true);
  ModelConfigs mc = mf.to_configs(pf, seed);
  std::vector<double> grid = grid_spec.empty() ? lambda_grid_default() : parse_grid(grid_spec);

  ConfigEcho echo;
  echo.add("command", std::string("sweep-lambda"));
  pf.echo_into(echo);
  mf.echo_into(echo);
  echo.add("grid", grid_spec.empty() ? std::string("0.1:0.9:0.1") : grid_spec);
  echo.add("seed", seed);
  echo.write(out_dir, seed);

  Dataset data = build_dataset(manifest, pf.base_dir, opt);
  SweepOutcome out = run_lambda_sweep(data, mc, grid, seed);

  std::ostringstream ss;
  ss << echo.stamp(seed).header_lines();
  ss << "# accuracy_1d=" << fmt_double(out.accuracy_1d) << " accuracy_2d="
     << fmt_double(out.accuracy_2d) << '\n';
  ss << "lambda,accuracy\n";
  for (std::size_t i = 0; i < out.sweep.lambdas.size(); ++i)
    ss << fmt_double(out.sweep.lambdas[i], 2) << ','
       << fmt_double(out.sweep.accuracies[i]) << '\n';
  write_text_file(join_path(out_dir, "sweep.csv"), ss.str());
  std::cout << "best lambda " << fmt_double(out.sweep.best_lambda, 2) << " accuracy "
            << fmt_double(out.sweep.best_accuracy, 2) << "\n";
  return kExitOk;
}

int cmd_session(const PipelineFlags& pf, const ModelFlags& mf,
                const std::string& protocol_name, const std::string& train_sessions,
                const std::string& test_sessions, std::uint64_t seed,
                const std::string& out_dir) {
  DatasetManifest manifest = load_manifest(pf.manifest_path);
  bool needs_2d = mf.fusion != "1d";
  PipelineOptions opt = pf.to_options(seed, needs_2d);
  ModelConfigs mc = mf.to_configs(pf, seed);

  SessionProtocol proto;
  proto.kind = parse_protocol_kind(protocol_name);
  proto.train_sessions = split(train_sessions, ',');
  if (!test_sessions.empty()) proto.test_sessions = split(test_sessions, ',');

  ConfigEcho echo;
  echo.add("command", std::string("session"));
  pf.echo_into(echo);
  mf.echo_into(echo);
  echo.add("protocol", protocol_name);
  echo.add("train_sessions", train_sessions);
  echo.add("test_sessions", test_sessions);
  echo.add("seed", seed);
  echo.write(out_dir, seed);

  Dataset data = build_dataset(manifest, pf.base_dir, opt);
  SessionOutcome out = run_session_protocol(data, proto, seed, mf.trainer(mc));

  CvOutcome single;
  single.fold_reports.push_back(out.report);
  single.fold_curves.push_back(out.curves);
  single.aggregate = aggregate_reports(single.fold_reports);
  write_run_reports(out_dir, single, echo.stamp(seed), false);

  std::ostringstream ss;
  ss << echo.stamp(seed).header_lines();
  ss << "train_size," << out.train_size << '\n';
  ss << "test_size," << out.test_size << '\n';
  ss << "excluded_test_instances," << out.excluded_test_instances << '\n';
  for (const std::string& s : out.excluded_subjects) ss << "excluded_subject," << s << '\n';
  write_text_file(join_path(out_dir, "session.csv"), ss.str());
  std::cout << "session accuracy " << fmt_double(out.report.accuracy, 2) << " ("
            << out.excluded_test_instances << " test instances excluded)\n";
  return kExitOk;
}

int cmd_report(const std::string& run_dir) {
  namespace fs = std::filesystem;
  if (!fs::exists(run_dir)) throw DataError("run directory not found: " + run_dir);
  bool produced = false;

  // learning curves: first fold csv found
  for (int fold = 0; fold < 32; ++fold) {
    std::string path = join_path(run_dir, "curves_fold" + std::to_string(fold) + ".csv");
    if (!file_exists(path)) continue;
    auto rows = read_csv_rows(path);
    if (rows.size() < 2) continue;
    SvgChart acc, loss;
    acc.title = "learning curves (accuracy)";
    acc.x_label = "epoch";
    acc.y_label = "accuracy %";
    loss.title = "learning curves (loss)";
    loss.x_label = "epoch";
    loss.y_label = "loss";
    SvgSeries train_acc{"train", "steelblue", {}, {}};
    SvgSeries val_acc{"validation", "darkorange", {}, {}};
    SvgSeries train_loss{"train", "steelblue", {}, {}};
    SvgSeries val_loss{"validation", "darkorange", {}, {}};
    for (std::size_t i = 1; i < rows.size(); ++i) {
      double epoch = std::stod(rows[i][0]);
      train_loss.x.push_back(epoch);
      train_loss.y.push_back(std::stod(rows[i][1]));
      train_acc.x.push_back(epoch);
      train_acc.y.push_back(std::stod(rows[i][2]));
      val_loss.x.push_back(epoch);
      val_loss.y.push_back(std::stod(rows[i][3]));
      val_acc.x.push_back(epoch);
      val_acc.y.push_back(std::stod(rows[i][4]));
    }
    acc.series = {train_acc, val_acc};
    loss.series = {train_loss, val_loss};
    write_text_file(join_path(run_dir, "learning_curves.svg"),
                    acc.render() + loss.render());
    produced = true;
    break;
  }

  std::string roc_path = join_path(run_dir, "roc.csv");
  if (file_exists(roc_path)) {
    auto rows = read_csv_rows(roc_path);
    SvgChart chart;
    chart.title = "ROC (one-vs-rest)";
    chart.x_label = "false positive rate";
    chart.y_label = "true positive rate";
    chart.diagonal = true;
    std::map<int, SvgSeries> per_class;
    const char* colors[] = {"steelblue", "darkorange", "seagreen", "crimson",
                            "slategray", "goldenrod", "orchid", "teal"};
    for (std::size_t i = 1; i < rows.size(); ++i) {
      if (rows[i].size() < 3) continue;
      int cls = std::stoi(rows[i][0]);
      SvgSeries& s = per_class[cls];
      if (s.x.empty()) {
        s.label = "class " + std::to_string(cls);
        s.color = colors[static_cast<std::size_t>(cls) % 8];
      }
      s.x.push_back(std::stod(rows[i][1]));
      s.y.push_back(std::stod(rows[i][2]));
    }
    for (auto& [cls, series] : per_class) chart.series.push_back(series);
    if (!chart.series.empty()) {
      write_text_file(join_path(run_dir, "roc.svg"), chart.render());
      produced = true;
    }
  }

  std::string conf_path = join_path(run_dir, "confusion.csv");
  if (file_exists(conf_path)) {
    auto rows = read_csv_rows(conf_path);
    std::vector<std::vector<std::size_t>> counts;
    for (const auto& row : rows) {
      std::vector<std::size_t> r;
      for (const std::string& cell : row) r.push_back(std::stoull(cell));
      counts.push_back(std::move(r));
    }
    if (!counts.empty()) {
      write_text_file(join_path(run_dir, "confusion.svg"),
                      render_heatmap_svg(counts, "confusion matrix"));
      produced = true;
    }
  }

  std::string metrics_path = join_path(run_dir, "metrics.csv");
  if (file_exists(metrics_path)) {
    auto rows = read_csv_rows(metrics_path);
    std::ostringstream ss;
    ss << "run summary (" << run_dir << ")\n";
    for (const auto& row : rows) {
      for (std::size_t i = 0; i < row.size(); ++i) ss << (i ? "  " : "") << row[i];
      ss << '\n';
    }
    write_text_file(join_path(run_dir, "summary.txt"), ss.str());
    produced = true;
  }

  if (!produced)
    throw DataError("no report inputs (metrics.csv, curves_fold*.csv, roc.csv, "
                    "confusion.csv) in " + run_dir);
  std::cout << "report bundle written to " << run_dir << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ECG biometric identification toolkit"};
  app.set_version_flag("--version", std::string(kToolName) + " " + kToolVersion);
  app.require_subcommand(1);

  std::uint64_t seed = 1;
  app.add_option("--seed", seed, "global seed fanned out to every stage");
  app.set_config("--config", "", "read options from a key=value file");

  // synth
  auto* synth = app.add_subcommand("synth", "generate a synthetic WFDB dataset");
  std::string synth_out = "synth_data";
  std::size_t synth_subjects = 10, synth_records = 1, synth_sessions = 1;
  double synth_duration = 30.0, synth_fs = 250.0, synth_noise = 0.02;
  int synth_format = kWfdbFormat212;
  bool synth_truth = false;
  synth->add_option("-o,--out", synth_out, "output directory");
  synth->add_option("--subjects", synth_subjects, "number of subjects");
  synth->add_option("--records", synth_records, "records per subject per session");
  synth->add_option("--sessions", synth_sessions, "sessions per subject");
  synth->add_option("--duration", synth_duration, "record duration (s)");
  synth->add_option("--fs", synth_fs, "sampling rate (Hz)");
  synth->add_option("--noise", synth_noise, "additive noise std (mV)");
  synth->add_option("--format", synth_format, "WFDB format code: 16 or 212");
  synth->add_flag("--emit-truth", synth_truth, "write ground-truth R index files");

  // ingest
  auto* ingest = app.add_subcommand("ingest", "validate and summarize a manifest");
  std::string ingest_manifest, ingest_base;
  ingest->add_option("--manifest", ingest_manifest, "manifest file")->required();
  ingest->add_option("--base-dir", ingest_base, "base directory for record paths");

  // preprocess
  auto* preprocess = app.add_subcommand("preprocess", "smooth one record to CSV");
  std::string pre_in, pre_lead, pre_out = "smoothed.csv";
  int pre_window = 11, pre_order = 3;
  preprocess->add_option("--in", pre_in, "WFDB header path")->required();
  preprocess->add_option("--lead", pre_lead, "lead name (default: first)");
  preprocess->add_option("--sg-window", pre_window, "window length (odd)");
  preprocess->add_option("--sg-order", pre_order, "polynomial order");
  preprocess->add_option("-o,--out", pre_out, "output CSV");

  // segment
  auto* segment = app.add_subcommand("segment", "extract heartbeat segments");
  PipelineFlags seg_flags;
  seg_flags.attach(segment, /*with_cwt=*/false);
  std::string seg_out = "segments.csv", seg_fiducials;
  segment->add_option("-o,--out", seg_out, "segment store path");
  segment->add_option("--fiducials", seg_fiducials, "also dump a fiducial table CSV");

  // scalogram
  auto* scalo = app.add_subcommand("scalogram", "render scalograms from a store");
  std::string scalo_store, scalo_png, scalo_matrix;
  double scalo_fmin = 0.5, scalo_fmax = 100.0;
  std::size_t scalo_scales = 64, scalo_img = 224;
  bool scalo_log = false;
  scalo->add_option("--store", scalo_store, "segment store path")->required();
  scalo->add_option("--fmin", scalo_fmin, "lowest frequency (Hz)");
  scalo->add_option("--fmax", scalo_fmax, "highest frequency (Hz)");
  scalo->add_option("--scales", scalo_scales, "scale count");
  scalo->add_option("--img-size", scalo_img, "render size");
  scalo->add_flag("--log-power", scalo_log, "log-scale |W|^2");
  scalo->add_option("--png-dir", scalo_png, "write PNGs here");
  scalo->add_option("--matrix-dir", scalo_matrix, "write float matrices here");

  // train
  auto* train = app.add_subcommand("train", "cross-validated training run");
  PipelineFlags train_flags;
  ModelFlags train_model;
  train_flags.attach(train);
  train_model.attach(train);
  std::string train_out = "run";
  bool train_ckpt = false;
  train->add_option("-o,--out", train_out, "run output directory");
  train->add_flag("--save-checkpoint", train_ckpt, "train a final model and save it");

  // evaluate
  auto* evaluate = app.add_subcommand("evaluate", "score a checkpoint on a dataset");
  PipelineFlags eval_flags;
  ModelFlags eval_model;
  eval_flags.attach(evaluate);
  eval_model.attach(evaluate);
  std::string eval_ckpt, eval_out = "eval";
  evaluate->add_option("--checkpoint", eval_ckpt, "checkpoint file")->required();
  evaluate->add_option("-o,--out", eval_out, "output directory");

  // sweep-lambda
  auto* sweep = app.add_subcommand("sweep-lambda", "score-fusion weight sweep");
  PipelineFlags sweep_flags;
  ModelFlags sweep_model;
  sweep_flags.attach(sweep);
  sweep_model.attach(sweep);
  std::string sweep_grid, sweep_out = "sweep";
  sweep->add_option("--grid", sweep_grid, "lambda grid start:stop:step");
  sweep->add_option("-o,--out", sweep_out, "output directory");

  // session
  auto* session = app.add_subcommand("session", "same/mixed/cross-session evaluation");
  PipelineFlags sess_flags;
  ModelFlags sess_model;
  sess_flags.attach(session);
  sess_model.attach(session);
  std::string sess_protocol = "same", sess_train = "sess1", sess_test, sess_out = "session";
  session->add_option("--protocol", sess_protocol, "same|mixed|cross");
  session->add_option("--train-sessions", sess_train, "comma-separated session ids");
  session->add_option("--test-sessions", sess_test, "comma-separated session ids (cross)");
  session->add_option("-o,--out", sess_out, "output directory");

  // report
  auto* report = app.add_subcommand("report", "render SVG plots from run CSVs");
  std::string report_dir;
  report->add_option("--run", report_dir, "run directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (synth->parsed())
      return cmd_synth(synth_out, synth_subjects, synth_records, synth_sessions,
                       synth_duration, synth_fs, synth_noise, seed, synth_format,
                       synth_truth);
    if (ingest->parsed()) return cmd_ingest(ingest_manifest, ingest_base);
    if (preprocess->parsed())
      return cmd_preprocess(pre_in, pre_lead, pre_window, pre_order, pre_out, seed);
    if (segment->parsed()) return cmd_segment(seg_flags, seed, seg_out, seg_fiducials);
    if (scalo->parsed())
      return cmd_scalogram(scalo_store, scalo_fmin, scalo_fmax, scalo_scales, scalo_img,
                           scalo_log, scalo_png, scalo_matrix, seed);
    if (train->parsed()) return cmd_train(train_flags, train_model, seed, train_out, train_ckpt);
    if (evaluate->parsed())
      return cmd_evaluate(eval_flags, eval_model, eval_ckpt, seed, eval_out);
    if (sweep->parsed())
      return cmd_sweep_lambda(sweep_flags, sweep_model, sweep_grid, seed, sweep_out);
    if (session->parsed())
      return cmd_session(sess_flags, sess_model, sess_protocol, sess_train, sess_test,
                         seed, sess_out);
    if (report->parsed()) return cmd_report(report_dir);
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid argument: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}
