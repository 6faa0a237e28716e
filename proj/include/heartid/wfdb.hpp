#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "heartid/ecg_record.hpp"

namespace heartid {

// WFDB signal formats supported at ingest. Everything else is an explicit
// error: 16 and 212 cover MIT-BIH and the common ECG-ID/PTB exports.
inline constexpr int kWfdbFormat16 = 16;
inline constexpr int kWfdbFormat212 = 212;

// Format 212 packs two 12-bit two's-complement samples into 3 bytes:
// byte0 = s1 low 8, byte1 = (s2 high 4 << 4) | s1 high 4, byte2 = s2 low 8.
std::vector<std::uint8_t> pack212(std::span<const int> samples);
std::vector<int> unpack212(std::span<const std::uint8_t> bytes, std::size_t count);

std::vector<std::uint8_t> pack16(std::span<const int> samples);
std::vector<int> unpack16(std::span<const std::uint8_t> bytes, std::size_t count);

struct WfdbSignalSpec {
  std::string file_name;
  int format = kWfdbFormat16;
  double gain = 200.0;  // ADC units per millivolt
  int baseline = 0;
  std::string description;  // used as the lead name
};

struct WfdbHeader {
  std::string record_name;
  std::size_t n_signals = 0;
  double sampling_rate_hz = 0.0;
  std::size_t n_samples = 0;  // 0 = not declared, read to EOF
  std::vector<WfdbSignalSpec> signals;
};

WfdbHeader parse_wfdb_header(const std::string& header_text);

// Reads one lead (by description, or the first lead when `lead` is empty)
// and converts to millivolts via (raw - baseline) / gain. Subject and
// session default to the record name and "" unless overridden.
EcgRecord read_wfdb_record(const std::string& header_path,
                           const std::string& lead = "",
                           const std::string& subject_override = "",
                           const std::string& session_override = "");

// Writes a single-lead record pair <name>.hea/<name>.dat under dir.
void write_wfdb_record(const std::string& dir, const std::string& name,
                       const EcgRecord& record, int format = kWfdbFormat16,
                       double gain = 200.0, int baseline = 0);

}  // namespace heartid
