#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "heartid/delineation.hpp"
#include "heartid/ecg_record.hpp"
#include "heartid/textio.hpp"

namespace heartid {

enum class SegmentStrategy { PT, QrsCentric, RR, Random };

const char* strategy_name(SegmentStrategy s);
SegmentStrategy parse_strategy(const std::string& name);  // throws on unknown

// One heartbeat-level instance: the raw window [start, end) resampled to
// target_len samples by linear interpolation (endpoints preserved exactly).
struct Segment {
  std::string subject_id;
  std::string session_id;
  SegmentStrategy strategy = SegmentStrategy::PT;
  std::size_t start = 0, end = 0;  // raw bounds in the source record
  std::size_t target_len = 0;
  double source_fs = 0.0;
  std::vector<double> values;
};

// Linear interpolation onto target points; values[0] and values[target-1]
// equal the raw endpoints exactly.
std::vector<double> resample_linear(std::span<const double> raw, std::size_t target);

// Window selection per strategy:
//   PT          -> [p_onset, t_offset] per valid beat
//   QrsCentric  -> [R - 150 ms, R + 150 ms] per beat inside the record
//   RR          -> [R_i, R_{i+2}], two consecutive cardiac cycles
//   Random      -> seeded non-overlapping 1 s windows, one per valid beat
//                  (capped by record length)
// Throws DataError when no window can be produced and std::invalid_argument
// for target_len < 8.
std::vector<Segment> extract_segments(const EcgRecord& record,
                                      const std::vector<FiducialMarks>& marks,
                                      SegmentStrategy strategy,
                                      std::size_t target_len, std::uint64_t seed);

// Keeps the first `budget` segments of every subject, preserving order.
std::vector<Segment> cap_per_subject(const std::vector<Segment>& segments,
                                     std::size_t budget);

void write_segment_store(const std::string& path, std::span<const Segment> segments,
                         const ArtifactStamp& stamp);
std::vector<Segment> read_segment_store(const std::string& path);

}  // namespace heartid
