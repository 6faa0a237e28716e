#include "heartid/cwt.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace heartid {

namespace {

constexpr double kMorletOmega = 5.0;
constexpr double kSupportEps = 1e-8;

double morlet(double t) { return std::exp(-0.5 * t * t) * std::cos(kMorletOmega * t); }

}  // namespace

void CwtPlan::validate() const {
  if (fs <= 0) throw std::invalid_argument("cwt plan: fs must be > 0");
  if (f_min <= 0 || f_min >= f_max)
    throw std::invalid_argument("cwt plan: need 0 < f_min < f_max");
  if (f_max > fs / 2.0)
    throw std::invalid_argument("cwt plan: f_max exceeds Nyquist (fs/2)");
  if (n_scales < 2) throw std::invalid_argument("cwt plan: n_scales must be >= 2");
  if (wavelet_center_freq <= 0)
    throw std::invalid_argument("cwt plan: wavelet center frequency must be > 0");
}

double scale_for_frequency(double f_hz, const CwtPlan& plan) {
  if (plan.fs <= 0) throw std::invalid_argument("cwt plan: fs must be > 0");
  if (f_hz <= 0 || f_hz > plan.fs / 2.0)
    throw std::invalid_argument("frequency outside (0, fs/2]");
  return plan.wavelet_center_freq * plan.fs / f_hz;
}

std::vector<double> log_frequencies(const CwtPlan& plan) {
  plan.validate();
  std::vector<double> f(plan.n_scales);
  const double ratio = plan.f_max / plan.f_min;
  const double denom = static_cast<double>(plan.n_scales - 1);
  for (std::size_t i = 0; i < plan.n_scales; ++i)
    f[i] = plan.f_min * std::pow(ratio, static_cast<double>(i) / denom);
  f.front() = plan.f_min;
  f.back() = plan.f_max;
  return f;
}

std::vector<double> plan_scales(const CwtPlan& plan) {
  std::vector<double> freqs = log_frequencies(plan);
  std::vector<double> scales(freqs.size());
  for (std::size_t i = 0; i < freqs.size(); ++i)
    scales[i] = scale_for_frequency(freqs[i], plan);
  return scales;
}

CwtResult cwt(std::span<const double> signal, const CwtPlan& plan) {
  plan.validate();
  if (signal.size() < 8) throw std::invalid_argument("cwt: signal shorter than 8 samples");

  const long n = static_cast<long>(signal.size());
  const std::vector<double> scales = plan_scales(plan);
  // |psi| < eps beyond t_max: exp(-t^2/2) = eps -> t = sqrt(-2 ln eps)
  const double t_max = std::sqrt(-2.0 * std::log(kSupportEps));

  CwtResult out;
  out.n_scales = scales.size();
  out.n_samples = signal.size();
  out.w.assign(out.n_scales * out.n_samples, 0.0);

  std::vector<double> kernel;
  for (std::size_t si = 0; si < scales.size(); ++si) {
    const double a = scales[si];
    const long half = static_cast<long>(std::ceil(t_max * a));
    if (2 * half + 1 > 8 * n) out.truncated_rows.push_back(si);
    kernel.resize(static_cast<std::size_t>(2 * half + 1));
    const double norm = 1.0 / std::sqrt(a);
    for (long j = -half; j <= half; ++j)
      kernel[static_cast<std::size_t>(j + half)] = norm * morlet(static_cast<double>(j) / a);

    double* row = out.w.data() + si * out.n_samples;
    for (long b = 0; b < n; ++b) {
      const long j_lo = std::max(-half, b - (n - 1));
      const long j_hi = std::min(half, b);
      double acc = 0.0;
      const double* sig = signal.data() + (b - j_lo);
      const double* ker = kernel.data() + (j_lo + half);
      for (long j = j_lo; j <= j_hi; ++j, --sig, ++ker) acc += *sig * *ker;
      row[b] = acc;
    }
  }
  return out;
}

std::vector<double> resize_bilinear(const std::vector<double>& src, std::size_t src_h,
                                    std::size_t src_w, std::size_t dst_h,
                                    std::size_t dst_w) {
  if (src_h == 0 || src_w == 0 || dst_h == 0 || dst_w == 0)
    throw std::invalid_argument("resize: empty dimensions");
  std::vector<double> dst(dst_h * dst_w);
  const double ry = dst_h > 1 ? static_cast<double>(src_h - 1) / static_cast<double>(dst_h - 1) : 0.0;
  const double rx = dst_w > 1 ? static_cast<double>(src_w - 1) / static_cast<double>(dst_w - 1) : 0.0;
  for (std::size_t y = 0; y < dst_h; ++y) {
    double sy = static_cast<double>(y) * ry;
    std::size_t y0 = std::min(static_cast<std::size_t>(sy), src_h - 1);
    std::size_t y1 = std::min(y0 + 1, src_h - 1);
    double fy = sy - static_cast<double>(y0);
    for (std::size_t x = 0; x < dst_w; ++x) {
      double sx = static_cast<double>(x) * rx;
      std::size_t x0 = std::min(static_cast<std::size_t>(sx), src_w - 1);
      std::size_t x1 = std::min(x0 + 1, src_w - 1);
      double fx = sx - static_cast<double>(x0);
      double top = src[y0 * src_w + x0] * (1 - fx) + src[y0 * src_w + x1] * fx;
      double bot = src[y1 * src_w + x0] * (1 - fx) + src[y1 * src_w + x1] * fx;
      dst[y * dst_w + x] = top * (1 - fy) + bot * fy;
    }
  }
  return dst;
}

Scalogram render_scalogram(const CwtResult& coeffs, std::size_t out_h,
                           std::size_t out_w, bool log_power) {
  if (coeffs.n_scales == 0 || coeffs.n_samples == 0)
    throw std::invalid_argument("render_scalogram: empty coefficient matrix");
  std::vector<double> power(coeffs.w.size());
  for (std::size_t i = 0; i < coeffs.w.size(); ++i) {
    double p = coeffs.w[i] * coeffs.w[i];
    power[i] = log_power ? std::log1p(p) : p;
  }
  Scalogram img;
  img.height = out_h;
  img.width = out_w;
  auto [src_mn, src_mx] = std::minmax_element(power.begin(), power.end());
  if (*src_mx <= *src_mn) {  // all-equal input maps to an all-zero image
    img.pixels.assign(out_h * out_w, 0.0);
    return img;
  }
  // min-max normalization commutes with bilinear resize up to the same
  // affine map; normalizing the resized image pins the output range exactly
  img.pixels = resize_bilinear(power, coeffs.n_scales, coeffs.n_samples, out_h, out_w);
  auto [mn_it, mx_it] = std::minmax_element(img.pixels.begin(), img.pixels.end());
  const double mn = *mn_it, mx = *mx_it;
  const double inv = 1.0 / (mx - mn);
  for (double& p : img.pixels) p = (p - mn) * inv;
  return img;
}

}  // namespace heartid
