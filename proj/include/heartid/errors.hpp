#pragma once

#include <stdexcept>
#include <string>

namespace heartid {

// Bad input data: missing files, malformed records, unsupported formats.
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Numerical failure: non-finite values where finite ones are required.
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace heartid
