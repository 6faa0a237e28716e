#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace heartid {

// Morlet CWT over a log-spaced frequency band. The wavelet is
// psi(t) = exp(-t^2/2) * cos(5 t); the plan's center-frequency constant maps
// physical frequencies to scales via a = f_c * fs / f, so scale tables stay
// comparable across sampling rates.
struct CwtPlan {
  double fs = 0.0;
  double f_min = 0.5;
  double f_max = 100.0;
  std::size_t n_scales = 64;
  double wavelet_center_freq = 0.8125;  // cycles per sample
  bool log_power = false;               // log-scale |W|^2 before normalizing

  void validate() const;  // f_max <= fs/2 (Nyquist), f_min < f_max, n >= 2
};

// a = f_c * fs / f. Throws std::invalid_argument for f outside (0, fs/2].
double scale_for_frequency(double f_hz, const CwtPlan& plan);

// f_i = f_min * (f_max/f_min)^(i/(N-1)), i = 0..N-1 (geometric progression).
std::vector<double> log_frequencies(const CwtPlan& plan);

// Scales corresponding to log_frequencies; decreasing as frequency rises.
std::vector<double> plan_scales(const CwtPlan& plan);

struct CwtResult {
  std::size_t n_scales = 0;
  std::size_t n_samples = 0;
  std::vector<double> w;  // row-major [n_scales][n_samples], low->high frequency
  std::vector<std::size_t> truncated_rows;  // wavelet support exceeded 8x signal

  double at(std::size_t scale, std::size_t t) const { return w[scale * n_samples + t]; }
};

// Row i is the convolution of the signal with the time-reversed,
// 1/sqrt(a)-normalized wavelet at scale a_i, evaluated at every sample with
// zero padding. Support is truncated where |psi| < 1e-8.
CwtResult cwt(std::span<const double> signal, const CwtPlan& plan);

// Normalized |W|^2 image, row 0 = lowest frequency.
struct Scalogram {
  std::size_t height = 0, width = 0;
  std::vector<double> pixels;  // row-major, in [0, 1]

  double at(std::size_t r, std::size_t c) const { return pixels[r * width + c]; }
};

// Elementwise squared magnitude, per-image min-max normalization to [0,1]
// (an all-equal matrix maps to all zeros), bilinear resize to out_h x out_w.
Scalogram render_scalogram(const CwtResult& coeffs, std::size_t out_h,
                           std::size_t out_w, bool log_power = false);

std::vector<double> resize_bilinear(const std::vector<double>& src, std::size_t src_h,
                                    std::size_t src_w, std::size_t dst_h,
                                    std::size_t dst_w);

}  // namespace heartid
