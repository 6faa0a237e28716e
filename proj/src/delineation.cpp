#include "heartid/delineation.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace heartid {

namespace {

constexpr double kMinWaveAmp_mv = 0.02;  // below this, a wave is "not found"

double median_of(const std::vector<double>& x, long lo, long hi) {
  std::vector<double> w(x.begin() + lo, x.begin() + hi + 1);
  std::sort(w.begin(), w.end());
  std::size_t n = w.size();
  return n % 2 ? w[n / 2] : 0.5 * (w[n / 2 - 1] + w[n / 2]);
}

}  // namespace

std::vector<FiducialMarks> delineate(const EcgRecord& record, const RPeakList& r_peaks) {
  record.validate();
  const std::vector<double>& x = record.samples_mv;
  const double fs = record.sampling_rate_hz;
  const long n = static_cast<long>(x.size());
  auto ms = [&](double v) { return static_cast<long>(std::lround(v * fs / 1000.0)); };

  std::vector<FiducialMarks> out;
  out.reserve(r_peaks.indices.size());
  for (std::size_t r_idx : r_peaks.indices) {
    FiducialMarks fm;
    const long r = static_cast<long>(r_idx);
    fm.r = r_idx;
    if (r < ms(400) || r + ms(400) >= n) {
      fm.reason = "incomplete search window at record edge";
      out.push_back(fm);
      continue;
    }

    auto argmin = [&](long lo, long hi) {
      long best = lo;
      for (long i = lo; i <= hi; ++i)
        if (x[static_cast<std::size_t>(i)] < x[static_cast<std::size_t>(best)]) best = i;
      return best;
    };
    fm.q = static_cast<std::size_t>(argmin(r - ms(60), r - 1));
    fm.s = static_cast<std::size_t>(argmin(r + 1, r + ms(60)));

    const double baseline = median_of(x, r - ms(90), r - ms(60));

    // P: positive maximum in [R-200, R-100]
    long p_peak = r - ms(200);
    for (long i = r - ms(200); i <= r - ms(100); ++i)
      if (x[static_cast<std::size_t>(i)] > x[static_cast<std::size_t>(p_peak)]) p_peak = i;
    double p_amp = x[static_cast<std::size_t>(p_peak)] - baseline;
    if (p_amp < kMinWaveAmp_mv) {
      fm.reason = "P not found";
      out.push_back(fm);
      continue;
    }
    fm.p_peak = static_cast<std::size_t>(p_peak);
    const double p_thr = 0.1 * p_amp;
    long p_on = p_peak;
    const long p_scan_lo = std::max(0L, r - ms(400));
    while (p_on > p_scan_lo &&
           std::abs(x[static_cast<std::size_t>(p_on)] - baseline) > p_thr)
      --p_on;
    if (std::abs(x[static_cast<std::size_t>(p_on)] - baseline) > p_thr) {
      fm.reason = "P onset not found";
      out.push_back(fm);
      continue;
    }
    long p_off = p_peak;
    const long q_l = static_cast<long>(fm.q);
    while (p_off < q_l && std::abs(x[static_cast<std::size_t>(p_off)] - baseline) > p_thr)
      ++p_off;
    if (std::abs(x[static_cast<std::size_t>(p_off)] - baseline) > p_thr) {
      fm.reason = "P offset not found";
      out.push_back(fm);
      continue;
    }
    fm.p_onset = static_cast<std::size_t>(p_on);
    fm.p_offset = static_cast<std::size_t>(p_off);

    // T: largest |deviation| in [R+150, R+400], so inverted T waves delineate
    long t_peak = r + ms(150);
    for (long i = r + ms(150); i <= r + ms(400); ++i)
      if (std::abs(x[static_cast<std::size_t>(i)] - baseline) >
          std::abs(x[static_cast<std::size_t>(t_peak)] - baseline))
        t_peak = i;
    double t_amp = std::abs(x[static_cast<std::size_t>(t_peak)] - baseline);
    if (t_amp < kMinWaveAmp_mv) {
      fm.reason = "T not found";
      out.push_back(fm);
      continue;
    }
    fm.t_peak = static_cast<std::size_t>(t_peak);
    const double t_thr = 0.1 * t_amp;
    long t_on = t_peak;
    const long s_l = static_cast<long>(fm.s);
    while (t_on > s_l && std::abs(x[static_cast<std::size_t>(t_on)] - baseline) > t_thr)
      --t_on;
    if (std::abs(x[static_cast<std::size_t>(t_on)] - baseline) > t_thr) {
      fm.reason = "T onset not found";
      out.push_back(fm);
      continue;
    }
    long t_off = t_peak;
    const long t_scan_hi = std::min(n - 1, r + ms(600));
    while (t_off < t_scan_hi &&
           std::abs(x[static_cast<std::size_t>(t_off)] - baseline) > t_thr)
      ++t_off;
    if (std::abs(x[static_cast<std::size_t>(t_off)] - baseline) > t_thr) {
      fm.reason = "T offset not found";
      out.push_back(fm);
      continue;
    }
    fm.t_onset = static_cast<std::size_t>(t_on);
    fm.t_offset = static_cast<std::size_t>(t_off);

    const double p_dur_ms = (fm.p_offset - fm.p_onset) * 1000.0 / fs;
    const double t_dur_ms = (fm.t_offset - fm.t_onset) * 1000.0 / fs;
    if (p_dur_ms < 80.0 || p_dur_ms > 120.0) {
      fm.reason = "P duration outside 80-120 ms";
      out.push_back(fm);
      continue;
    }
    if (t_dur_ms < 120.0 || t_dur_ms > 240.0) {
      fm.reason = "T duration outside 120-240 ms";
      out.push_back(fm);
      continue;
    }
    const std::size_t chain[] = {fm.p_onset, fm.p_peak, fm.p_offset, fm.q, fm.r,
                                 fm.s,       fm.t_onset, fm.t_peak,  fm.t_offset};
    bool ordered = true;
    for (std::size_t i = 1; i < 9; ++i)
      if (chain[i] <= chain[i - 1]) ordered = false;
    if (!ordered) {
      fm.reason = "fiducial ordering violated";
      out.push_back(fm);
      continue;
    }
    fm.valid = true;
    out.push_back(fm);
  }
  return out;
}

std::string fiducial_table_csv(const std::vector<FiducialMarks>& marks) {
  std::ostringstream ss;
  ss << "beat,p_onset,p_peak,p_offset,q,r,s,t_onset,t_peak,t_offset,valid,reason\n";
  for (std::size_t i = 0; i < marks.size(); ++i) {
    const FiducialMarks& m = marks[i];
    ss << i << ',' << m.p_onset << ',' << m.p_peak << ',' << m.p_offset << ','
       << m.q << ',' << m.r << ',' << m.s << ',' << m.t_onset << ',' << m.t_peak
       << ',' << m.t_offset << ',' << (m.valid ? 1 : 0) << ',' << m.reason << '\n';
  }
  return ss.str();
}

}  // namespace heartid
