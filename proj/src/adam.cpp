#include "heartid/adam.hpp"

#include <cmath>
#include <stdexcept>

#include "heartid/errors.hpp"

namespace heartid {

AdamState make_adam_state(const std::vector<Param*>& params) {
  AdamState st;
  st.m.reserve(params.size());
  st.v.reserve(params.size());
  for (const Param* p : params) {
    st.m.emplace_back(p->w.shape);
    st.v.emplace_back(p->w.shape);
  }
  return st;
}

void adam_step(std::vector<Param*>& params, AdamState& state, const AdamConfig& config) {
  if (state.m.size() != params.size())
    throw std::invalid_argument("adam state does not match parameter list");
  ++state.t;
  const double bc1 = 1.0 - std::pow(config.beta1, static_cast<double>(state.t));
  const double bc2 = 1.0 - std::pow(config.beta2, static_cast<double>(state.t));
  for (std::size_t pi = 0; pi < params.size(); ++pi) {
    Param& p = *params[pi];
    Tensor& m = state.m[pi];
    Tensor& v = state.v[pi];
    for (std::size_t i = 0; i < p.w.size(); ++i) {
      const double g = p.g.v[i];
      if (!std::isfinite(g))
        throw NumericalError("non-finite gradient in " + p.name);
      m.v[i] = config.beta1 * m.v[i] + (1.0 - config.beta1) * g;
      v.v[i] = config.beta2 * v.v[i] + (1.0 - config.beta2) * g * g;
      const double mhat = m.v[i] / bc1;
      const double vhat = v.v[i] / bc2;
      p.w.v[i] -= config.lr * mhat / (std::sqrt(vhat) + config.eps);
    }
  }
}

}  // namespace heartid
