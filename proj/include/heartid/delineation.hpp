#pragma once

#include <string>
#include <vector>

#include "heartid/ecg_record.hpp"
#include "heartid/pan_tompkins.hpp"

namespace heartid {

// Per-beat fiducial indices. Invalid beats keep whatever indices were found
// and carry a reason; they are flagged, never dropped silently.
struct FiducialMarks {
  std::size_t p_onset = 0, p_peak = 0, p_offset = 0;
  std::size_t q = 0, r = 0, s = 0;
  std::size_t t_onset = 0, t_peak = 0, t_offset = 0;
  bool valid = false;
  std::string reason;
};

// Rule-based delineation around each detected R-peak:
//  - Q and S: local minima within 60 ms before/after R
//  - P peak: maximum of the signal in [R-200 ms, R-100 ms]
//  - T peak: largest baseline deviation in [R+150 ms, R+400 ms] (handles
//    inverted T waves)
//  - onsets/offsets: walk from the peak until the deviation from the
//    isoelectric baseline (median of [R-90 ms, R-60 ms]) drops below 10% of
//    the peak deviation
// Beats are flagged invalid when a wave is missing, the ordering chain
// breaks, durations fall outside 80-120 ms (P) / 120-240 ms (T), or the beat
// sits too close to a record edge for the full search window.
std::vector<FiducialMarks> delineate(const EcgRecord& record, const RPeakList& r_peaks);

// Debug dump: beat#, nine indices, valid flag, reason.
std::string fiducial_table_csv(const std::vector<FiducialMarks>& marks);

}  // namespace heartid
