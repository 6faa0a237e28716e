#include <cmath>

#include "doctest.h"
#include "heartid/cwt.hpp"
#include "heartid/png_io.hpp"
#include "heartid/rng.hpp"
#include "heartid/textio.hpp"
#include "test_util.hpp"

using namespace heartid;
using testutil::TempDir;

TEST_SUITE("scalogram") {

TEST_CASE("scale table reproduces the published per-dataset values") {
  struct Row {
    double fs, a_min, a_max;
  };
  const Row rows[] = {{500, 4.06, 812.50}, {360, 2.93, 585.00},
                      {1000, 8.13, 1625.00}, {250, 2.03, 406.25}};
  for (const Row& r : rows) {
    CwtPlan plan;
    plan.fs = r.fs;
    CHECK(std::abs(scale_for_frequency(100.0, plan) - r.a_min) <= 0.01);
    CHECK(std::abs(scale_for_frequency(0.5, plan) - r.a_max) <= 0.01);
  }
}

TEST_CASE("scale_for_frequency rejects out-of-band frequencies") {
  CwtPlan plan;
  plan.fs = 500.0;
  CHECK_THROWS_AS(scale_for_frequency(0.0, plan), std::invalid_argument);
  CHECK_THROWS_AS(scale_for_frequency(-3.0, plan), std::invalid_argument);
  CHECK_THROWS_AS(scale_for_frequency(251.0, plan), std::invalid_argument);
  CHECK(scale_for_frequency(250.0, plan) == doctest::Approx(0.8125 * 2.0));
}

TEST_CASE("log frequencies hit both endpoints in geometric progression") {
  CwtPlan plan;
  plan.fs = 500.0;
  std::vector<double> f = log_frequencies(plan);
  REQUIRE(f.size() == 64);
  CHECK(f.front() == 0.5);
  CHECK(f.back() == 100.0);
  double ratio = f[1] / f[0];
  for (std::size_t i = 1; i + 1 < f.size(); ++i)
    CHECK(std::abs(f[i + 1] / f[i] - ratio) < 1e-10);

  CwtPlan small = plan;
  small.n_scales = 3;
  std::vector<double> f3 = log_frequencies(small);
  CHECK(f3[1] == doctest::Approx(std::sqrt(0.5 * 100.0)).epsilon(1e-10));

  CwtPlan bad = plan;
  bad.f_min = 100.0;
  bad.f_max = 100.0;
  CHECK_THROWS_AS(log_frequencies(bad), std::invalid_argument);
  bad.f_min = 0.5;
  bad.f_max = 400.0;  // above Nyquist
  CHECK_THROWS_AS(log_frequencies(bad), std::invalid_argument);
}

TEST_CASE("a pure sinusoid peaks at the matching scale row") {
  CwtPlan plan;
  plan.fs = 500.0;
  const std::size_t n = 512;
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i)
    x[i] = std::sin(2.0 * M_PI * 10.0 * static_cast<double>(i) / plan.fs);
  CwtResult w = cwt(x, plan);

  std::vector<double> scales = plan_scales(plan);
  const double target = 0.8125 * 500.0 / 10.0;  // 40.625
  std::size_t nearest = 0;
  for (std::size_t i = 1; i < scales.size(); ++i)
    if (std::abs(scales[i] - target) < std::abs(scales[nearest] - target)) nearest = i;

  std::size_t best_row = 0;
  double best_power = -1.0;
  for (std::size_t r = 0; r < w.n_scales; ++r) {
    double p = 0.0;
    for (std::size_t t = 0; t < w.n_samples; ++t) p += w.at(r, t) * w.at(r, t);
    if (p > best_power) {
      best_power = p;
      best_row = r;
    }
  }
  CHECK(best_row == nearest);

}

TEST_CASE("a constant signal responds a million times weaker than a tone") {
  // zero-mean wavelet: the constant response vanishes wherever the full
  // support fits inside the signal, so compare interior columns
  CwtPlan plan;
  plan.fs = 250.0;
  plan.f_min = 5.0;
  plan.f_max = 60.0;
  plan.n_scales = 16;
  const std::size_t n = 2048;
  std::vector<double> tone(n), flat(n, 1.0);
  for (std::size_t i = 0; i < n; ++i)
    tone[i] = std::sin(2.0 * M_PI * 10.0 * static_cast<double>(i) / plan.fs);
  CwtResult wt = cwt(tone, plan);
  CwtResult wc = cwt(flat, plan);
  const double a_max = plan_scales(plan).front();
  const std::size_t guard =
      static_cast<std::size_t>(std::ceil(std::sqrt(-2.0 * std::log(1e-8)) * a_max)) + 1;
  REQUIRE(2 * guard < n);
  double peak_sin = 0.0, peak_const = 0.0;
  for (std::size_t r = 0; r < wt.n_scales; ++r)
    for (std::size_t b = guard; b < n - guard; ++b) {
      peak_sin = std::max(peak_sin, wt.at(r, b) * wt.at(r, b));
      peak_const = std::max(peak_const, wc.at(r, b) * wc.at(r, b));
    }
  CHECK(peak_const < 1e-6 * peak_sin);
}

TEST_CASE("an impulse reproduces the wavelet envelope in every row") {
  CwtPlan plan;
  plan.fs = 250.0;
  plan.f_min = 5.0;
  plan.f_max = 60.0;
  plan.n_scales = 8;
  const std::size_t n = 256, c = 128;
  std::vector<double> x(n, 0.0);
  x[c] = 1.0;
  CwtResult w = cwt(x, plan);
  std::vector<double> scales = plan_scales(plan);
  const double t_max = std::sqrt(-2.0 * std::log(1e-8));
  for (std::size_t r = 0; r < w.n_scales; ++r) {
    const double a = scales[r];
    const double half = std::ceil(t_max * a);  // implementation's support cutoff
    for (std::size_t b = 0; b < n; ++b) {
      double dj = static_cast<double>(b) - static_cast<double>(c);
      double t = dj / a;
      double expected = (std::abs(dj) <= half)
                            ? std::exp(-0.5 * t * t) * std::cos(5.0 * t) / std::sqrt(a)
                            : 0.0;
      CHECK(std::abs(w.at(r, b) - expected) < 1e-12);
    }
  }
}

TEST_CASE("cwt is linear") {
  CwtPlan plan;
  plan.fs = 250.0;
  plan.f_min = 2.0;
  plan.f_max = 40.0;
  plan.n_scales = 6;
  Rng rng(12);
  std::vector<double> x(64), y(64), z(64);
  for (std::size_t i = 0; i < 64; ++i) {
    x[i] = rng.uniform(-1, 1);
    y[i] = rng.uniform(-1, 1);
    z[i] = x[i] + y[i];
  }
  CwtResult wx = cwt(x, plan), wy = cwt(y, plan), wz = cwt(z, plan);
  for (std::size_t i = 0; i < wz.w.size(); ++i)
    CHECK(std::abs(wz.w[i] - (wx.w[i] + wy.w[i])) < 1e-9);
}

TEST_CASE("shifting a localized input shifts every row") {
  CwtPlan plan;
  plan.fs = 250.0;
  plan.f_min = 4.0;
  plan.f_max = 40.0;
  plan.n_scales = 5;
  const std::size_t n = 256, k = 10;
  std::vector<double> x(n, 0.0), xs(n, 0.0);
  for (std::size_t i = 100; i < 140; ++i) {
    double t = (static_cast<double>(i) - 120.0) / 8.0;
    x[i] = std::exp(-0.5 * t * t);
    xs[i + k] = x[i];
  }
  CwtResult w = cwt(x, plan), ws = cwt(xs, plan);
  for (std::size_t r = 0; r < w.n_scales; ++r)
    for (std::size_t b = n / 4; b < 3 * n / 4 - k; ++b)
      CHECK(std::abs(ws.at(r, b + k) - w.at(r, b)) < 1e-9);
}

TEST_CASE("oversized wavelet support is flagged and still computed") {
  CwtPlan plan;
  plan.fs = 250.0;
  plan.f_min = 0.5;  // scale 406: support far beyond 8x a 16-sample signal
  plan.f_max = 100.0;
  plan.n_scales = 4;
  std::vector<double> x(16, 0.5);
  x[8] = 1.0;
  CwtResult w = cwt(x, plan);
  CHECK(!w.truncated_rows.empty());
  CHECK(w.w.size() == 4 * 16);
}

TEST_CASE("rendering normalizes to [0,1] with exact extremes") {
  CwtPlan plan;
  plan.fs = 250.0;
  plan.f_min = 2.0;
  plan.f_max = 40.0;
  plan.n_scales = 12;
  std::vector<double> x(128);
  for (std::size_t i = 0; i < x.size(); ++i)
    x[i] = std::sin(0.3 * static_cast<double>(i)) + 0.2 * std::sin(0.05 * static_cast<double>(i));
  Scalogram img = render_scalogram(cwt(x, plan), 64, 64);
  CHECK(img.height == 64);
  CHECK(img.width == 64);
  double mn = 2.0, mx = -1.0;
  for (double p : img.pixels) {
    mn = std::min(mn, p);
    mx = std::max(mx, p);
  }
  CHECK(mn == 0.0);
  CHECK(mx == 1.0);
}

TEST_CASE("a constant coefficient matrix renders all-zero") {
  CwtResult w;
  w.n_scales = 4;
  w.n_samples = 16;
  w.w.assign(64, 0.7);
  Scalogram img = render_scalogram(w, 8, 8);
  for (double p : img.pixels) CHECK(p == 0.0);
}

TEST_CASE("a 64x256 matrix resizes to exactly 224x224") {
  CwtResult w;
  w.n_scales = 64;
  w.n_samples = 256;
  w.w.resize(64 * 256);
  Rng rng(5);
  for (double& v : w.w) v = rng.uniform(-1, 1);
  Scalogram img = render_scalogram(w, 224, 224);
  CHECK(img.height == 224);
  CHECK(img.width == 224);
  CHECK(img.pixels.size() == 224 * 224);
}

TEST_CASE("png export writes a decodable header") {
  TempDir dir("png");
  Scalogram img;
  img.height = 16;
  img.width = 16;
  img.pixels.assign(256, 0.0);
  for (std::size_t i = 0; i < 256; ++i) img.pixels[i] = static_cast<double>(i) / 255.0;
  write_png_gray(dir.file("img.png"), img);
  std::string bytes = read_text_file(dir.file("img.png"));
  REQUIRE(bytes.size() > 64);
  CHECK(static_cast<unsigned char>(bytes[0]) == 0x89);
  CHECK(bytes.substr(1, 3) == "PNG");
  CHECK(bytes.find("IHDR") != std::string::npos);
  CHECK(bytes.find("IEND") != std::string::npos);
}

}  // TEST_SUITE
