#include "heartid/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "heartid/errors.hpp"

namespace heartid {

Tensor::Tensor(std::vector<std::size_t> s) : shape(std::move(s)), v(count(shape), 0.0) {}

std::size_t Tensor::count(const std::vector<std::size_t>& s) {
  std::size_t n = 1;
  for (std::size_t d : s) n *= d;
  return s.empty() ? 0 : n;
}

void Tensor::fill(double x) { std::fill(v.begin(), v.end(), x); }

std::string Tensor::shape_str() const {
  std::ostringstream ss;
  ss << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) ss << (i ? "," : "") << shape[i];
  ss << ']';
  return ss.str();
}

void Tensor::check_finite(const std::string& what) const {
  for (double x : v)
    if (!std::isfinite(x)) throw NumericalError("non-finite value in " + what);
}

}  // namespace heartid
