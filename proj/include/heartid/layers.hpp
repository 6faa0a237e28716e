#pragma once

#include <memory>
#include <vector>

#include "heartid/rng.hpp"
#include "heartid/tensor.hpp"

namespace heartid {

// Layers cache what backward needs during forward; calling backward without
// a matching forward throws. Gradients accumulate into Param::g.
class Layer {
 public:
  virtual ~Layer() = default;
  virtual Tensor forward(const Tensor& x, bool train, Rng& rng) = 0;
  virtual Tensor backward(const Tensor& gy) = 0;
  virtual void collect_params(std::vector<Param*>&) {}
};

// fan-in-scaled uniform init: U(-1/sqrt(fan_in), 1/sqrt(fan_in))
void init_uniform(Param& p, std::size_t fan_in, Rng& rng);

// 1D convolution over [N, C, L] with odd kernel, same padding.
class Conv1d : public Layer {
 public:
  Conv1d(std::string name, std::size_t in_ch, std::size_t out_ch, std::size_t kernel,
         std::size_t stride, Rng& rng);
  Tensor forward(const Tensor& x, bool train, Rng& rng) override;
  Tensor backward(const Tensor& gy) override;
  void collect_params(std::vector<Param*>& out) override;

 private:
  std::size_t in_ch_, out_ch_, k_, stride_;
  Param w_, b_;  // w [O, C, K], b [O]
  Tensor x_;
};

// 2D convolution over [N, C, H, W] with odd square kernel, same padding.
class Conv2d : public Layer {
 public:
  Conv2d(std::string name, std::size_t in_ch, std::size_t out_ch, std::size_t kernel,
         std::size_t stride, Rng& rng);
  Tensor forward(const Tensor& x, bool train, Rng& rng) override;
  Tensor backward(const Tensor& gy) override;
  void collect_params(std::vector<Param*>& out) override;

 private:
  std::size_t in_ch_, out_ch_, k_, stride_;
  Param w_, b_;  // w [O, C, K, K], b [O]
  Tensor x_;
};

class Dense : public Layer {
 public:
  Dense(std::string name, std::size_t in_dim, std::size_t out_dim, Rng& rng);
  Tensor forward(const Tensor& x, bool train, Rng& rng) override;
  Tensor backward(const Tensor& gy) override;
  void collect_params(std::vector<Param*>& out) override;
  Param& weight() { return w_; }
  Param& bias() { return b_; }

 private:
  std::size_t in_, out_;
  Param w_, b_;  // w [O, I], b [O]
  Tensor x_;
};

class Relu : public Layer {
 public:
  Tensor forward(const Tensor& x, bool train, Rng& rng) override;
  Tensor backward(const Tensor& gy) override;

 private:
  Tensor x_;
};

class Tanh : public Layer {
 public:
  Tensor forward(const Tensor& x, bool train, Rng& rng) override;
  Tensor backward(const Tensor& gy) override;

 private:
  Tensor y_;
};

class Sigmoid : public Layer {
 public:
  Tensor forward(const Tensor& x, bool train, Rng& rng) override;
  Tensor backward(const Tensor& gy) override;

 private:
  Tensor y_;
};

// Inverted dropout: scales kept activations by 1/(1-p) in train mode,
// identity in eval mode. The mask is drawn from the forward rng, so a
// reseeded rng reproduces it exactly.
class Dropout : public Layer {
 public:
  explicit Dropout(double p) : p_(p) {}
  Tensor forward(const Tensor& x, bool train, Rng& rng) override;
  Tensor backward(const Tensor& gy) override;

 private:
  double p_;
  Tensor mask_;
};

// Max pooling over [N, C, L], stride 1, same padding (odd window).
class MaxPool1d : public Layer {
 public:
  explicit MaxPool1d(std::size_t window) : window_(window) {}
  Tensor forward(const Tensor& x, bool train, Rng& rng) override;
  Tensor backward(const Tensor& gy) override;

 private:
  std::size_t window_;
  Tensor x_;
  std::vector<std::size_t> argmax_;
};

// Max pooling over [N, C, H, W] with window=stride (non-overlapping).
class MaxPool2d : public Layer {
 public:
  explicit MaxPool2d(std::size_t window) : window_(window) {}
  Tensor forward(const Tensor& x, bool train, Rng& rng) override;
  Tensor backward(const Tensor& gy) override;

 private:
  std::size_t window_;
  std::vector<std::size_t> in_shape_;
  std::vector<std::size_t> argmax_;
};

// Global average pooling: [N, C, ...] -> [N, C].
class GlobalAvgPool : public Layer {
 public:
  Tensor forward(const Tensor& x, bool train, Rng& rng) override;
  Tensor backward(const Tensor& gy) override;

 private:
  std::vector<std::size_t> in_shape_;
};

// Softmax over the last axis of [N, C].
Tensor softmax_rows(const Tensor& logits);

// Combined softmax + mean cross-entropy. backward() returns the gradient
// with respect to the logits.
class SoftmaxXent {
 public:
  double forward(const Tensor& logits, const std::vector<int>& labels);
  Tensor backward() const;

 private:
  Tensor probs_;
  std::vector<int> labels_;
};

}  // namespace heartid
