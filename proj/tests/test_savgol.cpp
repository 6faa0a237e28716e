#include <cmath>

#include "doctest.h"
#include "heartid/rng.hpp"
#include "heartid/savgol.hpp"
#include "test_util.hpp"

using namespace heartid;

TEST_SUITE("savgol") {

TEST_CASE("window-5 order-2 weights match the classic quadratic smoother") {
  std::vector<double> w = savgol_coefficients({.half_window = 2, .poly_order = 2});
  std::vector<double> expected = {-3.0 / 35, 12.0 / 35, 17.0 / 35, 12.0 / 35, -3.0 / 35};
  REQUIRE(w.size() == 5);
  for (std::size_t i = 0; i < 5; ++i)
    CHECK(std::abs(w[i] - expected[i]) < 1e-12);
}

TEST_CASE("weights agree with an independent orthogonal-polynomial oracle") {
  for (auto [m, p] : std::vector<std::pair<int, int>>{{2, 2}, {5, 3}, {4, 4}, {7, 2}, {3, 5}}) {
    std::vector<double> impl = savgol_coefficients({.half_window = m, .poly_order = p});
    std::vector<double> oracle = testutil::gram_savgol_weights(m, p);
    REQUIRE(impl.size() == oracle.size());
    for (std::size_t i = 0; i < impl.size(); ++i)
      CHECK(std::abs(impl[i] - oracle[i]) < 1e-12);
  }
}

TEST_CASE("weights sum to 1") {
  for (auto [m, p] : std::vector<std::pair<int, int>>{{1, 0}, {2, 2}, {5, 3}, {8, 5}, {10, 4}}) {
    std::vector<double> w = savgol_coefficients({.half_window = m, .poly_order = p});
    double sum = 0.0;
    for (double v : w) sum += v;
    CHECK(std::abs(sum - 1.0) < 1e-12);
  }
}

TEST_CASE("three points cannot fit a cubic") {
  CHECK_THROWS_AS(savgol_coefficients({.half_window = 1, .poly_order = 3}),
                  std::invalid_argument);
}

TEST_CASE("constant signals pass through exactly") {
  std::vector<double> x(64, 3.25);
  std::vector<double> y = savgol_filter(x, {.half_window = 5, .poly_order = 3});
  REQUIRE(y.size() == x.size());
  for (double v : y) CHECK(std::abs(v - 3.25) < 1e-12);
}

TEST_CASE("window 11, order 3 reproduces exact cubics on the interior") {
  SavGolConfig cfg{.half_window = 5, .poly_order = 3};
  std::vector<double> x(100);
  for (std::size_t n = 0; n < x.size(); ++n) {
    double t = static_cast<double>(n);
    x[n] = 2.0 + 0.5 * t + 0.02 * t * t + 0.001 * t * t * t;
  }
  std::vector<double> y = savgol_filter(x, cfg);
  for (std::size_t n = 5; n + 5 < x.size(); ++n)
    CHECK(std::abs(y[n] - x[n]) / std::abs(x[n]) < 1e-9);
}

TEST_CASE("polynomials of degree <= p reproduce on the interior") {
  Rng rng(5);
  SavGolConfig cfg{.half_window = 4, .poly_order = 3};
  for (int trial = 0; trial < 5; ++trial) {
    double c0 = rng.uniform(-2, 2), c1 = rng.uniform(-1, 1), c2 = rng.uniform(-0.1, 0.1),
           c3 = rng.uniform(-0.01, 0.01);
    std::vector<double> x(60);
    for (std::size_t n = 0; n < x.size(); ++n) {
      double t = static_cast<double>(n) - 30.0;
      x[n] = c0 + c1 * t + c2 * t * t + c3 * t * t * t;
    }
    std::vector<double> y = savgol_filter(x, cfg);
    for (std::size_t n = 4; n + 4 < x.size(); ++n)
      CHECK(std::abs(y[n] - x[n]) < 1e-9 * std::max(1.0, std::abs(x[n])));
  }
}

TEST_CASE("smoothing a noisy sine shrinks the noise variance") {
  const double fs = 500.0;
  const std::size_t n = 4000;
  Rng rng(11);
  std::vector<double> clean(n), noisy(n);
  for (std::size_t i = 0; i < n; ++i) {
    clean[i] = std::sin(2.0 * M_PI * 10.0 * static_cast<double>(i) / fs);
    noisy[i] = clean[i] + 0.1 * rng.normal();
  }
  std::vector<double> y = savgol_filter(noisy, {.half_window = 5, .poly_order = 3});
  double var_residual = 0.0, var_noise = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 11; i + 11 < n; ++i) {
    double r = y[i] - clean[i];
    double e = noisy[i] - clean[i];
    var_residual += r * r;
    var_noise += e * e;
    ++count;
  }
  CHECK(var_residual / var_noise < 1.0);
}

TEST_CASE("filter is linear") {
  Rng rng(3);
  SavGolConfig cfg{.half_window = 5, .poly_order = 3};
  std::vector<double> x(50), y(50), z(50);
  const double a = 1.7, b = -0.4;
  for (std::size_t i = 0; i < 50; ++i) {
    x[i] = rng.uniform(-1, 1);
    y[i] = rng.uniform(-1, 1);
    z[i] = a * x[i] + b * y[i];
  }
  std::vector<double> fx = savgol_filter(x, cfg);
  std::vector<double> fy = savgol_filter(y, cfg);
  std::vector<double> fz = savgol_filter(z, cfg);
  for (std::size_t i = 0; i < 50; ++i)
    CHECK(std::abs(fz[i] - (a * fx[i] + b * fy[i])) < 1e-12);
}

TEST_CASE("shift equivariance on interior samples") {
  Rng rng(9);
  SavGolConfig cfg{.half_window = 5, .poly_order = 3};
  const std::size_t n = 80, k = 7;
  std::vector<double> x(n);
  for (double& v : x) v = rng.uniform(-1, 1);
  std::vector<double> shifted(n, 0.0);
  for (std::size_t i = 0; i + k < n; ++i) shifted[i + k] = x[i];
  std::vector<double> fx = savgol_filter(x, cfg);
  std::vector<double> fs = savgol_filter(shifted, cfg);
  // compare where both windows sit fully inside real data
  for (std::size_t i = 5; i + 5 + k < n - 5; ++i)
    CHECK(std::abs(fs[i + k] - fx[i]) < 1e-12);
}

TEST_CASE("signal shorter than the window is rejected") {
  std::vector<double> x(8, 1.0);
  CHECK_THROWS_AS(savgol_filter(x, {.half_window = 5, .poly_order = 3}),
                  std::invalid_argument);
}

}  // TEST_SUITE
