#pragma once

#include <string>
#include <vector>

namespace heartid {

// One lead of sampled ECG. Amplitudes are always millivolts; conversion from
// raw ADC units happens at ingest so downstream thresholds stay unit-stable.
struct EcgRecord {
  std::string subject_id;
  std::string session_id;
  std::string lead_name;
  double sampling_rate_hz = 0.0;
  std::vector<double> samples_mv;

  double duration_s() const {
    return sampling_rate_hz > 0 ? static_cast<double>(samples_mv.size()) / sampling_rate_hz : 0.0;
  }

  // Throws std::invalid_argument when invariants are broken.
  void validate() const;
};

}  // namespace heartid
