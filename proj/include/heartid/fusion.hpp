#pragma once

#include <memory>
#include <span>
#include <vector>

#include "heartid/layers.hpp"

namespace heartid {

struct FusionConfig {
  enum class Mode { Feature, Score, Attention };
  Mode mode = Mode::Attention;
  double lambda = 0.9;             // Score mode only
  std::size_t latent_dim = 256;    // d, shared projection space
  std::size_t attn_hidden = 128;   // d_attn

  void validate() const;
};

const char* fusion_mode_name(FusionConfig::Mode mode);
FusionConfig::Mode parse_fusion_mode(const std::string& name);

// Early fusion: plain concatenation, output[0..d1) = f1, output[d1..) = f2.
std::vector<double> fuse_features(std::span<const double> f1, std::span<const double> f2);

// Late fusion of class-probability vectors: lambda*s1 + (1-lambda)*s2.
// Inputs must be simplex vectors; the output is one too.
std::vector<double> fuse_scores(std::span<const double> s1, std::span<const double> s2,
                                double lambda);

// Learned gate over two projected feature vectors:
//   f1h = W1 f1 + b1,  f2h = W2 f2 + b2          (shared latent d)
//   h   = tanh(W_attn (f1h ++ f2h) + b_attn)
//   alpha = sigmoid(w_attn . h + c)              (strictly inside (0,1))
//   fused = alpha * f1h + (1-alpha) * f2h        (componentwise convex)
class AttentionFusion {
 public:
  AttentionFusion(std::size_t d1, std::size_t d2, std::size_t latent,
                  std::size_t attn_hidden, Rng& rng);

  struct Output {
    Tensor fused;                // [N, d]
    std::vector<double> alphas;  // per instance
  };
  Output forward(const Tensor& f1, const Tensor& f2, bool train, Rng& rng);

  struct Grads {
    Tensor g_f1, g_f2;
  };
  Grads backward(const Tensor& g_fused);

  void collect_params(std::vector<Param*>& out);
  std::size_t out_dim() const { return latent_; }

  // projected inputs from the last forward (convexity checks, alpha logging)
  const Tensor& projected1() const { return f1h_; }
  const Tensor& projected2() const { return f2h_; }

 private:
  std::size_t latent_;
  std::unique_ptr<Dense> proj1_, proj2_;
  std::unique_ptr<Dense> attn_hidden_layer_;
  Tanh attn_tanh_;
  std::unique_ptr<Dense> attn_out_layer_;
  Sigmoid attn_sigmoid_;
  Tensor f1h_, f2h_, alpha_;  // cached for backward
};

// Accuracy of lambda-weighted score fusion over a grid. scores1/scores2 are
// [N, C] probability tensors from the two unimodal heads. Ties in the best
// row break toward larger lambda.
struct LambdaSweepResult {
  std::vector<double> lambdas;
  std::vector<double> accuracies;  // percent
  double best_lambda = 0.0;
  double best_accuracy = 0.0;
};

std::vector<double> lambda_grid_default();  // {0.1, 0.2, ..., 0.9}

LambdaSweepResult sweep_lambda(const Tensor& scores1, const Tensor& scores2,
                               const std::vector<int>& labels,
                               const std::vector<double>& grid);

}  // namespace heartid
