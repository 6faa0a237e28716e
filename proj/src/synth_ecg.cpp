#include "heartid/synth_ecg.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "heartid/errors.hpp"
#include "heartid/rng.hpp"
#include "heartid/textio.hpp"

namespace heartid {

namespace {

constexpr double kLeadIn_s = 0.45;   // margin before the first R
constexpr double kLeadOut_s = 0.45;  // margin after the last R
// 10%-amplitude half-width of a Gaussian bump, in sigmas.
const double kTenPercentSigmas = std::sqrt(2.0 * std::log(10.0));

void add_bump(std::vector<double>& x, double fs, double center_s,
              const WaveSpec& w) {
  if (w.amp_mv == 0.0) return;
  double sigma_s = w.width_ms / 1000.0;
  double reach_s = 6.0 * sigma_s;
  long lo = std::max(0L, static_cast<long>(std::floor((center_s - reach_s) * fs)));
  long hi = std::min(static_cast<long>(x.size()) - 1,
                     static_cast<long>(std::ceil((center_s + reach_s) * fs)));
  for (long i = lo; i <= hi; ++i) {
    double dt = i / fs - center_s;
    x[static_cast<std::size_t>(i)] +=
        w.amp_mv * std::exp(-dt * dt / (2.0 * sigma_s * sigma_s));
  }
}

std::size_t clamp_index(double t_s, double fs, std::size_t n) {
  long i = std::lround(t_s * fs);
  if (i < 0) i = 0;
  if (i >= static_cast<long>(n)) i = static_cast<long>(n) - 1;
  return static_cast<std::size_t>(i);
}

}  // namespace

void SyntheticEcgSpec::validate() const {
  if (heart_rate_bpm <= 0) throw std::invalid_argument("heart_rate_bpm must be > 0");
  const WaveSpec* waves[] = {&p, &q, &r, &s, &t};
  const char* names[] = {"p", "q", "r", "s", "t"};
  double prev = -1e9;
  for (std::size_t i = 0; i < 5; ++i) {
    if (waves[i]->width_ms <= 0)
      throw std::invalid_argument(std::string(names[i]) + " width must be > 0");
    if (waves[i]->center_ms <= prev)
      throw std::invalid_argument("wave centers must be ordered P < Q < R < S < T");
    prev = waves[i]->center_ms;
  }
  if (noise_std_mv < 0) throw std::invalid_argument("noise std must be >= 0");
}

std::string SyntheticEcgSpec::to_string(double duration_s) const {
  std::ostringstream ss;
  auto wave = [&](const char* k, const WaveSpec& w) {
    ss << k << '=' << fmt_double_exact(w.amp_mv) << ' '
       << fmt_double_exact(w.center_ms) << ' ' << fmt_double_exact(w.width_ms)
       << ';';
  };
  ss << "hr=" << fmt_double_exact(heart_rate_bpm) << ';';
  wave("p", p);
  wave("q", q);
  wave("r", r);
  wave("s", s);
  wave("t", t);
  ss << "noise=" << fmt_double_exact(noise_std_mv) << ';';
  ss << "seed=" << seed << ';';
  ss << "dur=" << fmt_double_exact(duration_s);
  return ss.str();
}

SynthSpecEntry parse_synth_spec(const std::string& text) {
  SynthSpecEntry out;
  for (const std::string& kv : split(text, ';')) {
    std::string item = trim(kv);
    if (item.empty()) continue;
    auto eq = item.find('=');
    if (eq == std::string::npos)
      throw DataError("malformed synth spec item: " + item);
    std::string key = trim(item.substr(0, eq));
    std::string val = trim(item.substr(eq + 1));
    auto parse_wave = [&](WaveSpec& w) {
      std::istringstream vs(val);
      if (!(vs >> w.amp_mv >> w.center_ms >> w.width_ms))
        throw DataError("malformed wave spec: " + item);
    };
    if (key == "hr") out.spec.heart_rate_bpm = std::stod(val);
    else if (key == "p") parse_wave(out.spec.p);
    else if (key == "q") parse_wave(out.spec.q);
    else if (key == "r") parse_wave(out.spec.r);
    else if (key == "s") parse_wave(out.spec.s);
    else if (key == "t") parse_wave(out.spec.t);
    else if (key == "noise") out.spec.noise_std_mv = std::stod(val);
    else if (key == "seed") out.spec.seed = std::stoull(val);
    else if (key == "dur") out.duration_s = std::stod(val);
    else throw DataError("unknown synth spec key: " + key);
  }
  out.spec.validate();
  return out;
}

SynthResult synth_ecg(const SyntheticEcgSpec& spec, double duration_s, double fs,
                      const std::string& subject_id,
                      const std::string& session_id) {
  spec.validate();
  if (fs < 100.0) throw std::invalid_argument("fs too low to resolve QRS width (< 100 samples/s)");
  double rr_s = 60.0 / spec.heart_rate_bpm;
  if (duration_s < 2.0 * rr_s)
    throw std::invalid_argument("duration too short: need at least 2 beats");

  std::size_t n = static_cast<std::size_t>(std::llround(duration_s * fs));
  std::vector<double> x(n, 0.0);

  SynthResult out;
  out.record.subject_id = subject_id;
  out.record.session_id = session_id;
  out.record.lead_name = "II";
  out.record.sampling_rate_hz = fs;

  const WaveSpec* waves[] = {&spec.p, &spec.q, &spec.r, &spec.s, &spec.t};
  for (std::size_t beat = 0;; ++beat) {
    double t_r = kLeadIn_s + static_cast<double>(beat) * rr_s;
    if (t_r > duration_s - kLeadOut_s) break;
    // snap the bump center onto the sample grid so the ground-truth index is
    // exactly the sampled maximum
    std::size_t r_idx = clamp_index(t_r, fs, n);
    double center_r_s = static_cast<double>(r_idx) / fs;
    for (const WaveSpec* w : waves)
      add_bump(x, fs, center_r_s + w->center_ms / 1000.0, *w);

    BeatTruth bt;
    auto at = [&](double off_ms) { return clamp_index(center_r_s + off_ms / 1000.0, fs, n); };
    bt.r = r_idx;
    bt.p_peak = at(spec.p.center_ms);
    bt.p_onset = at(spec.p.center_ms - kTenPercentSigmas * spec.p.width_ms);
    bt.p_offset = at(spec.p.center_ms + kTenPercentSigmas * spec.p.width_ms);
    bt.q = at(spec.q.center_ms);
    bt.s = at(spec.s.center_ms);
    bt.t_peak = at(spec.t.center_ms);
    bt.t_onset = at(spec.t.center_ms - kTenPercentSigmas * spec.t.width_ms);
    bt.t_offset = at(spec.t.center_ms + kTenPercentSigmas * spec.t.width_ms);
    out.r_peaks.push_back(r_idx);
    out.beats.push_back(bt);
  }

  if (spec.noise_std_mv > 0) {
    Rng rng(spec.seed);
    for (double& v : x) v += spec.noise_std_mv * rng.normal();
  }

  out.record.samples_mv = std::move(x);
  out.record.validate();
  return out;
}

}  // namespace heartid
