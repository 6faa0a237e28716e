#pragma once

#include <cstddef>
#include <vector>

#include "heartid/tensor.hpp"

namespace heartid {

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// First/second moment estimates, one pair per parameter tensor.
struct AdamState {
  std::size_t t = 0;
  std::vector<Tensor> m, v;
};

AdamState make_adam_state(const std::vector<Param*>& params);

// One bias-corrected Adam update from the gradients accumulated in the
// params. Throws NumericalError on non-finite gradients.
void adam_step(std::vector<Param*>& params, AdamState& state, const AdamConfig& config);

}  // namespace heartid
