#pragma once

#include <cstddef>
#include <vector>

#include "heartid/ecg_record.hpp"

namespace heartid {

struct RPeakList {
  std::vector<std::size_t> indices;  // strictly increasing, >= 200 ms apart
  double fs = 0.0;
};

// QRS detection: band-pass (cascaded integer-coefficient low/high-pass
// designed at 200 Hz; the record is resampled internally and indices mapped
// back), five-point derivative, squaring, 150 ms moving-window integration,
// dual adaptive thresholds with a 200 ms refractory period, 360 ms T-wave
// slope discrimination, and RR-gated searchback. Each reported index is
// refined to the local maximum of the record within +/-50 ms.
//
// Throws std::invalid_argument for records < 2 s or fs < 100 Hz, and
// DataError for flat (zero-variance) signals.
RPeakList detect_r_peaks(const EcgRecord& record);

}  // namespace heartid
