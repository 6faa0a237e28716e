#pragma once

#include <span>
#include <vector>

namespace heartid {

// Savitzky-Golay smoother: least-squares polynomial fit of degree poly_order
// over a sliding window of 2*half_window+1 samples, evaluated at the window
// center. Defaults match an 11-sample window with a cubic fit.
struct SavGolConfig {
  int half_window = 5;
  int poly_order = 3;

  void validate() const;  // throws std::invalid_argument when p > 2m
};

// Symmetric convolution weights of length 2m+1; weights sum to 1.
// Results are cached per config; the cache is safe for concurrent readers.
std::vector<double> savgol_coefficients(const SavGolConfig& config);

// Smooths the signal; output length equals input length. Boundaries use
// mirror padding about the edge samples.
std::vector<double> savgol_filter(std::span<const double> signal,
                                  const SavGolConfig& config);

}  // namespace heartid
