#include "heartid/segmentation.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>

#include "heartid/errors.hpp"
#include "heartid/rng.hpp"

namespace heartid {

const char* strategy_name(SegmentStrategy s) {
  switch (s) {
    case SegmentStrategy::PT: return "pt";
    case SegmentStrategy::QrsCentric: return "qrs";
    case SegmentStrategy::RR: return "rr";
    case SegmentStrategy::Random: return "random";
  }
  return "?";
}

SegmentStrategy parse_strategy(const std::string& name) {
  if (name == "pt") return SegmentStrategy::PT;
  if (name == "qrs") return SegmentStrategy::QrsCentric;
  if (name == "rr") return SegmentStrategy::RR;
  if (name == "random") return SegmentStrategy::Random;
  throw std::invalid_argument("unknown strategy '" + name +
                              "' (valid: pt, qrs, rr, random)");
}

std::vector<double> resample_linear(std::span<const double> raw, std::size_t target) {
  if (raw.size() < 2) throw std::invalid_argument("resample needs >= 2 samples");
  if (target < 2) throw std::invalid_argument("resample target must be >= 2");
  std::vector<double> out(target);
  const double step = static_cast<double>(raw.size() - 1) / static_cast<double>(target - 1);
  for (std::size_t j = 0; j < target; ++j) {
    double pos = static_cast<double>(j) * step;
    std::size_t lo = static_cast<std::size_t>(pos);
    if (lo >= raw.size() - 1) {
      out[j] = raw[raw.size() - 1];
      continue;
    }
    double frac = pos - static_cast<double>(lo);
    out[j] = raw[lo] * (1.0 - frac) + raw[lo + 1] * frac;
  }
  out[0] = raw[0];
  out[target - 1] = raw[raw.size() - 1];
  return out;
}

namespace {

Segment make_segment(const EcgRecord& rec, SegmentStrategy strategy,
                     std::size_t start, std::size_t end, std::size_t target_len) {
  Segment s;
  s.subject_id = rec.subject_id;
  s.session_id = rec.session_id;
  s.strategy = strategy;
  s.start = start;
  s.end = end;
  s.target_len = target_len;
  s.source_fs = rec.sampling_rate_hz;
  s.values = resample_linear(
      std::span<const double>(rec.samples_mv.data() + start, end - start), target_len);
  return s;
}

}  // namespace

std::vector<Segment> extract_segments(const EcgRecord& record,
                                      const std::vector<FiducialMarks>& marks,
                                      SegmentStrategy strategy,
                                      std::size_t target_len, std::uint64_t seed) {
  record.validate();
  if (target_len < 8) throw std::invalid_argument("target_len must be >= 8");
  const std::size_t n = record.samples_mv.size();
  const double fs = record.sampling_rate_hz;

  std::size_t n_valid = 0;
  for (const auto& m : marks)
    if (m.valid) ++n_valid;

  std::vector<Segment> out;
  switch (strategy) {
    case SegmentStrategy::PT: {
      for (const auto& m : marks) {
        if (!m.valid) continue;
        if (m.t_offset >= n || m.t_offset <= m.p_onset) continue;
        out.push_back(make_segment(record, strategy, m.p_onset, m.t_offset, target_len));
      }
      break;
    }
    case SegmentStrategy::QrsCentric: {
      const std::size_t len = static_cast<std::size_t>(std::lround(0.3 * fs));
      const std::size_t half = static_cast<std::size_t>(std::lround(0.15 * fs));
      for (const auto& m : marks) {
        if (m.r < half) continue;
        std::size_t start = m.r - half;
        if (start + len > n) continue;
        out.push_back(make_segment(record, strategy, start, start + len, target_len));
      }
      break;
    }
    case SegmentStrategy::RR: {
      for (std::size_t i = 0; i + 2 < marks.size(); ++i) {
        std::size_t start = marks[i].r, end = marks[i + 2].r;
        if (end <= start || end > n) continue;
        out.push_back(make_segment(record, strategy, start, end, target_len));
      }
      break;
    }
    case SegmentStrategy::Random: {
      const std::size_t win = static_cast<std::size_t>(std::lround(fs));
      if (n < win) throw DataError("record shorter than 1 s: cannot place random windows");
      std::size_t k = std::min(n_valid, n / win);
      if (k == 0) break;
      // k sorted draws from [0, n - k*win], spread by i*win: uniform
      // non-overlapping placement, deterministic per seed
      Rng rng(seed);
      std::vector<std::size_t> u(k);
      for (std::size_t i = 0; i < k; ++i)
        u[i] = static_cast<std::size_t>(rng.below(n - k * win + 1));
      std::sort(u.begin(), u.end());
      for (std::size_t i = 0; i < k; ++i) {
        std::size_t start = u[i] + i * win;
        out.push_back(make_segment(record, strategy, start, start + win, target_len));
      }
      break;
    }
  }
  if (out.empty()) throw DataError("no segments produced: zero usable beats");
  return out;
}

std::vector<Segment> cap_per_subject(const std::vector<Segment>& segments,
                                     std::size_t budget) {
  std::map<std::string, std::size_t> counts;
  std::vector<Segment> out;
  for (const auto& s : segments) {
    std::size_t& c = counts[s.subject_id];
    if (c < budget) {
      out.push_back(s);
      ++c;
    }
  }
  return out;
}

void write_segment_store(const std::string& path, std::span<const Segment> segments,
                         const ArtifactStamp& stamp) {
  std::ostringstream out;
  out << stamp.header_lines();
  out << "# columns: subject_id,session_id,strategy,start,end,target_len,source_fs,values...\n";
  for (const auto& s : segments) {
    out << s.subject_id << ',' << s.session_id << ',' << strategy_name(s.strategy)
        << ',' << s.start << ',' << s.end << ',' << s.target_len << ','
        << fmt_double_exact(s.source_fs);
    for (double v : s.values) out << ',' << fmt_double_exact(v);
    out << '\n';
  }
  write_text_file(path, out.str());
}

std::vector<Segment> read_segment_store(const std::string& path) {
  std::istringstream in(read_text_file(path));
  std::vector<Segment> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    std::vector<std::string> f = split(t, ',');
    if (f.size() < 8)
      throw DataError("segment store line " + std::to_string(line_no) + ": too few fields");
    Segment s;
    s.subject_id = f[0];
    s.session_id = f[1];
    s.strategy = parse_strategy(f[2]);
    s.start = std::stoull(f[3]);
    s.end = std::stoull(f[4]);
    s.target_len = std::stoull(f[5]);
    s.source_fs = std::stod(f[6]);
    for (std::size_t i = 7; i < f.size(); ++i) s.values.push_back(std::stod(f[i]));
    if (s.values.size() != s.target_len)
      throw DataError("segment store line " + std::to_string(line_no) +
                      ": value count does not match target_len");
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace heartid
