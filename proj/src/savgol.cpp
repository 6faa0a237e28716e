#include "heartid/savgol.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace heartid {

namespace {

// Solves the (p+1)x(p+1) normal equations A^T A a = A^T e_j for each window
// impulse; the center evaluation a_0 of each solve is the weight for that
// window position. Gaussian elimination with partial pivoting is plenty for
// p <= 2m <= a few dozen.
std::vector<double> solve_normal_equations(int m, int p) {
  const int w = 2 * m + 1;
  const int d = p + 1;
  // Gram matrix G[j][k] = sum_i i^(j+k)
  std::vector<double> moments(2 * p + 1, 0.0);
  for (int i = -m; i <= m; ++i) {
    double pw = 1.0;
    for (int k = 0; k <= 2 * p; ++k) {
      moments[k] += pw;
      pw *= i;
    }
  }
  // We need row 0 of G^{-1} A^T: weight[i] = sum_k invG[0][k] * i^k.
  // Compute invG row 0 by solving G x = e_0.
  std::vector<std::vector<double>> g(d, std::vector<double>(d + 1, 0.0));
  for (int j = 0; j < d; ++j) {
    for (int k = 0; k < d; ++k) g[j][k] = moments[j + k];
    g[j][d] = (j == 0) ? 1.0 : 0.0;
  }
  for (int col = 0; col < d; ++col) {
    int piv = col;
    for (int r = col + 1; r < d; ++r)
      if (std::abs(g[r][col]) > std::abs(g[piv][col])) piv = r;
    if (std::abs(g[piv][col]) < 1e-300)
      throw std::invalid_argument("savgol normal equations are singular");
    std::swap(g[col], g[piv]);
    for (int r = 0; r < d; ++r) {
      if (r == col) continue;
      double f = g[r][col] / g[col][col];
      for (int c = col; c <= d; ++c) g[r][c] -= f * g[col][c];
    }
  }
  std::vector<double> x0(d);
  for (int j = 0; j < d; ++j) x0[j] = g[j][d] / g[j][j];

  std::vector<double> weights(w);
  for (int i = -m; i <= m; ++i) {
    double acc = 0.0, pw = 1.0;
    for (int k = 0; k < d; ++k) {
      acc += x0[k] * pw;
      pw *= i;
    }
    weights[i + m] = acc;
  }
  return weights;
}

}  // namespace

void SavGolConfig::validate() const {
  if (half_window < 1) throw std::invalid_argument("half_window must be >= 1");
  if (poly_order < 0) throw std::invalid_argument("poly_order must be >= 0");
  if (poly_order > 2 * half_window)
    throw std::invalid_argument(
        "poly_order exceeds 2*half_window: least-squares system is underdetermined");
}

std::vector<double> savgol_coefficients(const SavGolConfig& config) {
  config.validate();
  static std::mutex mu;
  static std::map<std::pair<int, int>, std::vector<double>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto key = std::make_pair(config.half_window, config.poly_order);
  auto it = cache.find(key);
  if (it == cache.end())
    it = cache.emplace(key, solve_normal_equations(config.half_window, config.poly_order)).first;
  return it->second;
}

std::vector<double> savgol_filter(std::span<const double> signal,
                                  const SavGolConfig& config) {
  const std::vector<double> w = savgol_coefficients(config);
  const int m = config.half_window;
  const long n = static_cast<long>(signal.size());
  if (n < 2 * m + 1)
    throw std::invalid_argument("signal shorter than savgol window");

  auto mirrored = [&](long i) -> double {
    if (i < 0) i = -i;
    if (i >= n) i = 2 * (n - 1) - i;
    return signal[static_cast<std::size_t>(i)];
  };

  std::vector<double> out(signal.size());
  for (long i = 0; i < n; ++i) {
    double acc = 0.0;
    if (i >= m && i + m < n) {
      const double* s = signal.data() + (i - m);
      for (int j = 0; j <= 2 * m; ++j) acc += w[static_cast<std::size_t>(j)] * s[j];
    } else {
      for (int j = -m; j <= m; ++j) acc += w[static_cast<std::size_t>(j + m)] * mirrored(i + j);
    }
    out[static_cast<std::size_t>(i)] = acc;
  }
  return out;
}

}  // namespace heartid
