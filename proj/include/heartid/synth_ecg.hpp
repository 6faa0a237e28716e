#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "heartid/ecg_record.hpp"

namespace heartid {

// One Gaussian bump: amplitude in mV, center offset from the R-peak in ms,
// width = Gaussian sigma in ms.
struct WaveSpec {
  double amp_mv = 0.0;
  double center_ms = 0.0;
  double width_ms = 1.0;
};

// Gaussian-bump P-QRS-T model with known fiducial ground truth. Serves as
// the oracle generator for the detector and delineator.
struct SyntheticEcgSpec {
  double heart_rate_bpm = 72.0;
  WaveSpec p{0.15, -160.0, 23.0};
  WaveSpec q{-0.10, -25.0, 8.0};
  WaveSpec r{1.00, 0.0, 12.0};
  WaveSpec s{-0.20, 30.0, 8.0};
  WaveSpec t{0.30, 250.0, 40.0};
  double noise_std_mv = 0.0;
  std::uint64_t seed = 1;

  void validate() const;  // throws std::invalid_argument

  // Compact "key=val;..." form used in manifests; round-trips exactly.
  std::string to_string(double duration_s) const;
};

struct SynthSpecEntry {
  SyntheticEcgSpec spec;
  double duration_s = 10.0;
};
SynthSpecEntry parse_synth_spec(const std::string& text);

// Nominal per-beat ground-truth indices. Onsets/offsets are where each bump
// falls to 10% of its amplitude (center +/- sigma*sqrt(2*ln 10)).
struct BeatTruth {
  std::size_t p_onset, p_peak, p_offset;
  std::size_t q, r, s;
  std::size_t t_onset, t_peak, t_offset;
};

struct SynthResult {
  EcgRecord record;
  std::vector<std::size_t> r_peaks;
  std::vector<BeatTruth> beats;
};

// Deterministic for a fixed seed. First beat is placed 0.45 s into the
// record so every beat carries full P and T search windows.
SynthResult synth_ecg(const SyntheticEcgSpec& spec, double duration_s, double fs,
                      const std::string& subject_id = "synth",
                      const std::string& session_id = "");

}  // namespace heartid
