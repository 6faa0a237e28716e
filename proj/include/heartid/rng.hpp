#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

namespace heartid {

// Self-contained splitmix64 generator. Every stochastic step in the toolkit
// draws from this so that runs are reproducible across standard libraries
// (std::normal_distribution and std::shuffle are implementation-defined).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64();

  // Uniform in [0, 1).
  double uniform();
  double uniform(double lo, double hi);

  // Uniform integer in [0, n). n must be > 0.
  std::uint64_t below(std::uint64_t n);

  // Standard normal via Box-Muller, one spare cached.
  double normal();

  template <class T>
  void shuffle(std::vector<T>& v) {
    if (v.size() < 2) return;
    for (std::size_t i = v.size() - 1; i > 0; --i) {
      std::size_t j = static_cast<std::size_t>(below(i + 1));
      std::swap(v[i], v[j]);
    }
  }

 private:
  std::uint64_t state_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

std::uint64_t fnv1a64(std::string_view s);

// Derives a per-stage seed from the global run seed, so one seed flag
// reproduces every stage without coupling their streams.
std::uint64_t fanout_seed(std::uint64_t global_seed, std::string_view stage);

}  // namespace heartid
