#pragma once

#include <string>
#include <vector>

#include "heartid/tensor.hpp"

namespace heartid {

// Self-describing binary checkpoint: magic, version, a config echo string,
// then named parameter blobs (name, shape, float64 data), little-endian.
void save_checkpoint(const std::string& path, const std::string& config_echo,
                     const std::vector<Param*>& params);

struct CheckpointData {
  std::string config_echo;
  std::vector<std::string> names;
  std::vector<Tensor> tensors;
};

CheckpointData load_checkpoint(const std::string& path);

// Copies checkpoint tensors into matching params; throws DataError when a
// name is missing or a shape differs.
void apply_checkpoint(const CheckpointData& data, const std::vector<Param*>& params);

}  // namespace heartid
