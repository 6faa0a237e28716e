#pragma once

#include <memory>
#include <vector>

#include "heartid/layers.hpp"

namespace heartid {

// Multi-kernel 1D feature extractor: `depth` blocks, each running three
// parallel convolutions of different kernel sizes (plus a max-pool path)
// over a bottlenecked input, concatenated and joined by a residual
// connection. Global average pooling and a linear map produce the embedding.
struct Branch1DConfig {
  std::size_t input_len = 256;
  std::vector<std::size_t> kernel_sizes = {9, 19, 39};
  std::size_t channels_per_path = 8;
  std::size_t depth = 2;
  std::size_t embed_dim = 512;  // d1

  void validate() const;  // all kernels odd, embed_dim > 0
};

class Branch1D {
 public:
  Branch1D(const Branch1DConfig& config, Rng& rng);

  // [N, 1, input_len] -> [N, embed_dim]
  Tensor forward(const Tensor& x, bool train, Rng& rng);
  Tensor backward(const Tensor& g_embed);
  void collect_params(std::vector<Param*>& out);
  std::size_t out_dim() const { return config_.embed_dim; }
  const Branch1DConfig& config() const { return config_; }

 private:
  struct Block {
    std::unique_ptr<Conv1d> bottleneck;  // null when input is already narrow
    std::vector<std::unique_ptr<Conv1d>> paths;
    std::unique_ptr<MaxPool1d> pool;
    std::unique_ptr<Conv1d> pool_proj;
    std::unique_ptr<Conv1d> residual_proj;  // null when channels match
    Relu relu;
    std::size_t in_ch = 0, out_ch = 0;
  };
  Tensor block_forward(Block& blk, const Tensor& x, bool train, Rng& rng);
  Tensor block_backward(Block& blk, const Tensor& gy);

  Branch1DConfig config_;
  std::vector<Block> blocks_;
  GlobalAvgPool gap_;
  std::unique_ptr<Dense> embed_;
};

// Small residual 2D feature extractor: a convolutional stem with max
// pooling, then `blocks` residual blocks that double the channel count and
// halve the spatial dims from the second block on.
struct Branch2DConfig {
  std::size_t input_h = 64, input_w = 64;
  std::size_t base_channels = 8;
  std::size_t blocks = 4;
  std::size_t embed_dim = 512;  // d2

  void validate() const;
};

class Branch2D {
 public:
  Branch2D(const Branch2DConfig& config, Rng& rng);

  // [N, 1, input_h, input_w] -> [N, embed_dim]
  Tensor forward(const Tensor& x, bool train, Rng& rng);
  Tensor backward(const Tensor& g_embed);
  void collect_params(std::vector<Param*>& out);
  std::size_t out_dim() const { return config_.embed_dim; }
  const Branch2DConfig& config() const { return config_; }

 private:
  struct Block {
    std::unique_ptr<Conv2d> conv1;
    std::unique_ptr<Conv2d> conv2;
    std::unique_ptr<Conv2d> proj;  // null for identity skip
    Relu relu1, relu2;
  };
  Tensor block_forward(Block& blk, const Tensor& x, bool train, Rng& rng);
  Tensor block_backward(Block& blk, const Tensor& gy);

  Branch2DConfig config_;
  std::unique_ptr<Conv2d> stem_;
  Relu stem_relu_;
  MaxPool2d stem_pool_{2};
  std::vector<Block> blocks_;
  GlobalAvgPool gap_;
  std::unique_ptr<Dense> embed_;
};

std::size_t param_count(const std::vector<Param*>& params);

}  // namespace heartid
