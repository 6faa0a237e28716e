#include "heartid/pan_tompkins.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "heartid/errors.hpp"

namespace heartid {

namespace {

constexpr double kDesignFs = 200.0;
constexpr int kLpDelay = 5;
constexpr int kHpDelay = 16;
constexpr int kRefractory = 40;   // 200 ms at 200 Hz
constexpr int kTwaveWindow = 72;  // 360 ms at 200 Hz
constexpr int kMwiWindow = 30;    // 150 ms at 200 Hz

std::vector<double> resample_to(const std::vector<double>& x, double fs_in, double fs_out) {
  if (fs_in == fs_out) return x;
  std::size_t n_out = static_cast<std::size_t>(
      std::floor((static_cast<double>(x.size()) - 1) * fs_out / fs_in)) + 1;
  std::vector<double> y(n_out);
  for (std::size_t i = 0; i < n_out; ++i) {
    double pos = static_cast<double>(i) * fs_in / fs_out;
    std::size_t lo = static_cast<std::size_t>(pos);
    if (lo >= x.size() - 1) {
      y[i] = x.back();
      continue;
    }
    double frac = pos - static_cast<double>(lo);
    y[i] = x[lo] * (1.0 - frac) + x[lo + 1] * frac;
  }
  return y;
}

// y[n] = 2y[n-1] - y[n-2] + x[n] - 2x[n-6] + x[n-12]
std::vector<double> lowpass(const std::vector<double>& x) {
  std::vector<double> y(x.size(), 0.0);
  auto xa = [&](long i) { return i >= 0 ? x[static_cast<std::size_t>(i)] : 0.0; };
  auto ya = [&](long i) { return i >= 0 ? y[static_cast<std::size_t>(i)] : 0.0; };
  for (long n = 0; n < static_cast<long>(x.size()); ++n)
    y[static_cast<std::size_t>(n)] =
        2.0 * ya(n - 1) - ya(n - 2) + xa(n) - 2.0 * xa(n - 6) + xa(n - 12);
  for (double& v : y) v /= 36.0;
  return y;
}

// y[n] = y[n-1] - x[n]/32 + x[n-16] - x[n-17] + x[n-32]/32
std::vector<double> highpass(const std::vector<double>& x) {
  std::vector<double> y(x.size(), 0.0);
  auto xa = [&](long i) { return i >= 0 ? x[static_cast<std::size_t>(i)] : 0.0; };
  auto ya = [&](long i) { return i >= 0 ? y[static_cast<std::size_t>(i)] : 0.0; };
  for (long n = 0; n < static_cast<long>(x.size()); ++n)
    y[static_cast<std::size_t>(n)] =
        ya(n - 1) - xa(n) / 32.0 + xa(n - 16) - xa(n - 17) + xa(n - 32) / 32.0;
  return y;
}

// y[n] = (2x[n] + x[n-1] - x[n-3] - 2x[n-4]) / 8
std::vector<double> derivative(const std::vector<double>& x) {
  std::vector<double> y(x.size(), 0.0);
  auto xa = [&](long i) { return i >= 0 ? x[static_cast<std::size_t>(i)] : 0.0; };
  for (long n = 0; n < static_cast<long>(x.size()); ++n)
    y[static_cast<std::size_t>(n)] =
        (2.0 * xa(n) + xa(n - 1) - xa(n - 3) - 2.0 * xa(n - 4)) / 8.0;
  return y;
}

std::vector<double> moving_window_integral(const std::vector<double>& x, int w) {
  std::vector<double> y(x.size(), 0.0);
  double acc = 0.0;
  for (std::size_t n = 0; n < x.size(); ++n) {
    acc += x[n];
    if (n >= static_cast<std::size_t>(w)) acc -= x[n - static_cast<std::size_t>(w)];
    y[n] = acc / w;
  }
  return y;
}

struct Candidate {
  long idx;
  double peak;
  double slope;  // max |derivative| nearby, for T-wave discrimination
};

}  // namespace

RPeakList detect_r_peaks(const EcgRecord& record) {
  record.validate();
  if (record.sampling_rate_hz < 100.0)
    throw std::invalid_argument("detect_r_peaks requires fs >= 100 Hz");
  if (record.duration_s() < 2.0)
    throw std::invalid_argument("detect_r_peaks requires a record >= 2 s");
  auto [mn, mx] = std::minmax_element(record.samples_mv.begin(), record.samples_mv.end());
  if (*mx - *mn <= 0.0) throw DataError("flat signal: zero variance");

  const double fs = record.sampling_rate_hz;
  std::vector<double> x = resample_to(record.samples_mv, fs, kDesignFs);
  std::vector<double> bp = highpass(lowpass(x));
  std::vector<double> der = derivative(bp);
  std::vector<double> sq(der.size());
  for (std::size_t i = 0; i < der.size(); ++i) sq[i] = der[i] * der[i];
  std::vector<double> mwi = moving_window_integral(sq, kMwiWindow);

  // candidate peaks: local maxima of the integrated signal
  std::vector<Candidate> cands;
  for (long i = 1; i + 1 < static_cast<long>(mwi.size()); ++i) {
    std::size_t u = static_cast<std::size_t>(i);
    if (mwi[u] > mwi[u - 1] && mwi[u] >= mwi[u + 1]) {
      double slope = 0.0;
      long lo = std::max(0L, i - kMwiWindow), hi = std::min<long>(der.size() - 1, i);
      for (long j = lo; j <= hi; ++j)
        slope = std::max(slope, std::abs(der[static_cast<std::size_t>(j)]));
      cands.push_back({i, mwi[u], slope});
    }
  }

  // initialize running estimates from the first two seconds
  long init_n = std::min<long>(static_cast<long>(mwi.size()), 2 * static_cast<long>(kDesignFs));
  double init_max = 0.0, init_mean = 0.0;
  for (long i = 0; i < init_n; ++i) {
    init_max = std::max(init_max, mwi[static_cast<std::size_t>(i)]);
    init_mean += mwi[static_cast<std::size_t>(i)];
  }
  init_mean /= std::max(1L, init_n);
  double spki = 0.25 * init_max;
  double npki = 0.5 * init_mean;

  std::vector<long> accepted;       // MWI indices of accepted beats
  std::vector<double> qrs_slopes;   // slope memory for T-wave check
  std::vector<double> rr_history;   // recent RR intervals (design-rate samples)
  auto threshold1 = [&]() { return npki + 0.25 * (spki - npki); };
  auto rr_average = [&]() {
    if (rr_history.empty()) return kDesignFs;  // assume 60 bpm until measured
    std::size_t k = std::min<std::size_t>(8, rr_history.size());
    double s = std::accumulate(rr_history.end() - static_cast<long>(k), rr_history.end(), 0.0);
    return s / static_cast<double>(k);
  };
  std::vector<bool> used(cands.size(), false);

  auto accept = [&](std::size_t ci, bool from_searchback) {
    const Candidate& c = cands[ci];
    used[ci] = true;
    if (!accepted.empty()) rr_history.push_back(static_cast<double>(c.idx - accepted.back()));
    accepted.push_back(c.idx);
    qrs_slopes.push_back(c.slope);
    if (from_searchback)
      spki = 0.25 * c.peak + 0.75 * spki;
    else
      spki = 0.125 * c.peak + 0.875 * spki;
  };

  for (std::size_t ci = 0; ci < cands.size(); ++ci) {
    const Candidate& c = cands[ci];
    long since_last = accepted.empty() ? std::numeric_limits<long>::max()
                                       : c.idx - accepted.back();
    if (since_last < kRefractory) continue;

    // searchback: no beat for 1.66 RR-averages -> revisit skipped candidates
    if (!accepted.empty() && static_cast<double>(since_last) > 1.66 * rr_average()) {
      std::size_t best = cands.size();
      for (std::size_t cj = 0; cj < ci; ++cj) {
        if (used[cj]) continue;
        if (cands[cj].idx <= accepted.back() + kRefractory) continue;
        if (cands[cj].peak > 0.5 * threshold1() &&
            (best == cands.size() || cands[cj].peak > cands[best].peak))
          best = cj;
      }
      if (best != cands.size()) accept(best, true);
      since_last = c.idx - accepted.back();
      if (since_last < kRefractory) continue;
    }

    if (since_last < kTwaveWindow && !qrs_slopes.empty() &&
        c.slope < 0.5 * qrs_slopes.back()) {
      npki = 0.125 * c.peak + 0.875 * npki;  // T wave
      continue;
    }
    if (c.peak > threshold1())
      accept(ci, false);
    else
      npki = 0.125 * c.peak + 0.875 * npki;
  }

  // map accepted MWI peaks back to record indices via the band-passed signal
  RPeakList out;
  out.fs = fs;
  const long n_rec = static_cast<long>(record.samples_mv.size());
  const long refine = std::max(1L, static_cast<long>(std::lround(0.05 * fs)));
  for (long mwi_idx : accepted) {
    long lo = std::max(0L, mwi_idx - kMwiWindow - 8);
    long hi = std::min<long>(static_cast<long>(bp.size()) - 1, mwi_idx);
    long bp_idx = lo;
    for (long j = lo; j <= hi; ++j)
      if (bp[static_cast<std::size_t>(j)] > bp[static_cast<std::size_t>(bp_idx)]) bp_idx = j;
    double t = static_cast<double>(bp_idx - kLpDelay - kHpDelay) / kDesignFs;
    long k0 = std::clamp(static_cast<long>(std::lround(t * fs)), 0L, n_rec - 1);
    long rlo = std::max(0L, k0 - refine), rhi = std::min(n_rec - 1, k0 + refine);
    long r = rlo;
    for (long j = rlo; j <= rhi; ++j)
      if (record.samples_mv[static_cast<std::size_t>(j)] >
          record.samples_mv[static_cast<std::size_t>(r)])
        r = j;
    out.indices.push_back(static_cast<std::size_t>(r));
  }

  std::sort(out.indices.begin(), out.indices.end());
  // enforce the refractory spacing on the mapped indices
  const double min_gap = 0.2 * fs;
  std::vector<std::size_t> dedup;
  for (std::size_t idx : out.indices) {
    if (!dedup.empty() && static_cast<double>(idx - dedup.back()) < min_gap) continue;
    dedup.push_back(idx);
  }
  out.indices = std::move(dedup);
  return out;
}

}  // namespace heartid
