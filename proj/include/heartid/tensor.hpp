#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace heartid {

// Dense row-major tensor of doubles. All training math is 64-bit so the
// finite-difference oracles stay meaningful.
struct Tensor {
  std::vector<std::size_t> shape;
  std::vector<double> v;

  Tensor() = default;
  explicit Tensor(std::vector<std::size_t> s);

  static std::size_t count(const std::vector<std::size_t>& s);
  std::size_t size() const { return v.size(); }
  bool empty() const { return v.empty(); }

  double* data() { return v.data(); }
  const double* data() const { return v.data(); }

  void fill(double x);
  bool same_shape(const Tensor& other) const { return shape == other.shape; }
  std::string shape_str() const;

  // throws NumericalError naming `what` when any entry is non-finite
  void check_finite(const std::string& what) const;
};

// Trainable parameter: weights plus an accumulated gradient of equal shape.
struct Param {
  std::string name;
  Tensor w;
  Tensor g;

  explicit Param(std::string n, std::vector<std::size_t> shape)
      : name(std::move(n)), w(shape), g(std::move(shape)) {}
  void zero_grad() { g.fill(0.0); }
};

}  // namespace heartid
