#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "heartid/cwt.hpp"
#include "heartid/manifest.hpp"
#include "heartid/protocol.hpp"
#include "heartid/savgol.hpp"
#include "heartid/segmentation.hpp"
#include "heartid/synth_ecg.hpp"

namespace heartid {

// Everything between raw records and model-ready instances.
struct PipelineOptions {
  SegmentStrategy strategy = SegmentStrategy::PT;
  std::size_t target_len = 256;
  std::size_t budget_per_subject = 20;
  double max_duration_s = 0.0;  // 0 = keep whole records
  SavGolConfig savgol;
  double f_min = 0.5, f_max = 100.0;
  std::size_t n_scales = 64;
  double wavelet_center_freq = 0.8125;
  bool log_power = false;
  std::size_t img_h = 64, img_w = 64;
  bool make_1d = true, make_2d = true;
  std::size_t jobs = 1;
  std::uint64_t seed = 1;
};

struct BuildLog {
  std::size_t records = 0;
  std::size_t beats = 0;
  std::size_t valid_beats = 0;
  std::size_t segments = 0;
  std::vector<std::string> notes;

  double invalid_beat_rate() const {
    return beats ? 1.0 - static_cast<double>(valid_beats) / static_cast<double>(beats) : 0.0;
  }
};

// Smooth -> detect -> delineate -> segment for every manifest entry, with
// the per-subject budget applied.
std::vector<Segment> collect_segments(const DatasetManifest& manifest,
                                      const std::string& base_dir,
                                      const PipelineOptions& options,
                                      BuildLog* log = nullptr);

// collect_segments plus model-ready instance views. Scalogram generation
// fans out over `jobs` workers; results are identical for any job count.
Dataset build_dataset(const DatasetManifest& manifest, const std::string& base_dir,
                      const PipelineOptions& options, BuildLog* log = nullptr);

// Segment list -> instances (shared by build_dataset and the store path).
Dataset dataset_from_segments(const std::vector<Segment>& segments,
                              const PipelineOptions& options);

// Per-subject morphology variations drawn from one seed; subjects differ in
// wave amplitudes, offsets, widths, and heart rate but all delineate cleanly.
std::vector<SyntheticEcgSpec> make_synth_population(std::size_t n_subjects,
                                                    std::uint64_t seed);

// Model and training settings for one experiment run.
struct ModelConfigs {
  Branch1DConfig branch1d;
  Branch2DConfig branch2d;
  FusionConfig fusion;
  TrainConfig train;
};

// Training backends for run_cv / run_session_protocol.
TrainEvalFn make_fusion_trainer(const ModelConfigs& configs);          // feature | attention
TrainEvalFn make_branch_trainer(BranchKind kind, const ModelConfigs& configs);
TrainEvalFn make_score_fusion_trainer(const ModelConfigs& configs);    // fixed lambda

struct SweepOutcome {
  LambdaSweepResult sweep;
  double accuracy_1d = 0.0;  // percent, unimodal on the same test split
  double accuracy_2d = 0.0;
};

// Trains both unimodal classifiers on a stratified 80/20 split of `data`
// (10% of the training side reserved for validation) and sweeps lambda on
// the held-out test scores.
SweepOutcome run_lambda_sweep(const Dataset& data, const ModelConfigs& configs,
                              const std::vector<double>& grid, std::uint64_t seed);

// Public split helper (subject-stratified, ceil(fraction) per subject into
// the first list).
void stratified_split_indices(const Dataset& data, const std::vector<std::size_t>& pool,
                              double fraction, Rng& rng,
                              std::vector<std::size_t>& first,
                              std::vector<std::size_t>& second);

}  // namespace heartid
