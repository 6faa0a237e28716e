#include "heartid/fusion.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "heartid/errors.hpp"

namespace heartid {

void FusionConfig::validate() const {
  if (mode == Mode::Score && (lambda < 0.0 || lambda > 1.0))
    throw std::invalid_argument("fusion: lambda must lie in [0,1]");
  if (latent_dim == 0) throw std::invalid_argument("fusion: latent_dim must be > 0");
  if (attn_hidden == 0) throw std::invalid_argument("fusion: attn_hidden must be > 0");
}

const char* fusion_mode_name(FusionConfig::Mode mode) {
  switch (mode) {
    case FusionConfig::Mode::Feature: return "feature";
    case FusionConfig::Mode::Score: return "score";
    case FusionConfig::Mode::Attention: return "attention";
  }
  return "?";
}

FusionConfig::Mode parse_fusion_mode(const std::string& name) {
  if (name == "feature") return FusionConfig::Mode::Feature;
  if (name == "score") return FusionConfig::Mode::Score;
  if (name == "attention") return FusionConfig::Mode::Attention;
  throw std::invalid_argument("unknown fusion mode '" + name +
                              "' (valid: feature, score, attention)");
}

std::vector<double> fuse_features(std::span<const double> f1, std::span<const double> f2) {
  if (f1.empty() || f2.empty())
    throw std::invalid_argument("fuse_features: empty input vector");
  std::vector<double> out;
  out.reserve(f1.size() + f2.size());
  out.insert(out.end(), f1.begin(), f1.end());
  out.insert(out.end(), f2.begin(), f2.end());
  return out;
}

namespace {

void require_simplex(std::span<const double> s, const char* who) {
  double sum = 0.0;
  for (double v : s) {
    if (v < 0.0) throw std::invalid_argument(std::string(who) + ": negative probability");
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-6)
    throw std::invalid_argument(std::string(who) + ": probabilities must sum to 1");
}

}  // namespace

std::vector<double> fuse_scores(std::span<const double> s1, std::span<const double> s2,
                                double lambda) {
  if (lambda < 0.0 || lambda > 1.0)
    throw std::invalid_argument("fuse_scores: lambda outside [0,1]");
  if (s1.size() != s2.size() || s1.empty())
    throw std::invalid_argument("fuse_scores: score vectors must match and be non-empty");
  require_simplex(s1, "fuse_scores(s1)");
  require_simplex(s2, "fuse_scores(s2)");
  std::vector<double> out(s1.size());
  for (std::size_t i = 0; i < s1.size(); ++i)
    out[i] = lambda * s1[i] + (1.0 - lambda) * s2[i];
  return out;
}

// --------------------------------------------------------- AttentionFusion

AttentionFusion::AttentionFusion(std::size_t d1, std::size_t d2, std::size_t latent,
                                 std::size_t attn_hidden, Rng& rng)
    : latent_(latent) {
  if (d1 == 0 || d2 == 0 || latent == 0 || attn_hidden == 0)
    throw std::invalid_argument("attention fusion: zero-sized dimension");
  proj1_ = std::make_unique<Dense>("fusion.proj1", d1, latent, rng);
  proj2_ = std::make_unique<Dense>("fusion.proj2", d2, latent, rng);
  attn_hidden_layer_ = std::make_unique<Dense>("fusion.attn_hidden", 2 * latent, attn_hidden, rng);
  attn_out_layer_ = std::make_unique<Dense>("fusion.attn_out", attn_hidden, 1, rng);
}

AttentionFusion::Output AttentionFusion::forward(const Tensor& f1, const Tensor& f2,
                                                 bool train, Rng& rng) {
  f1h_ = proj1_->forward(f1, train, rng);
  f2h_ = proj2_->forward(f2, train, rng);
  const std::size_t n = f1h_.shape[0], d = latent_;

  Tensor u({n, 2 * d});
  for (std::size_t b = 0; b < n; ++b) {
    std::copy(f1h_.data() + b * d, f1h_.data() + (b + 1) * d, u.data() + b * 2 * d);
    std::copy(f2h_.data() + b * d, f2h_.data() + (b + 1) * d, u.data() + b * 2 * d + d);
  }
  Tensor h = attn_tanh_.forward(attn_hidden_layer_->forward(u, train, rng), train, rng);
  alpha_ = attn_sigmoid_.forward(attn_out_layer_->forward(h, train, rng), train, rng);

  Output out;
  out.fused = Tensor({n, d});
  out.alphas.resize(n);
  for (std::size_t b = 0; b < n; ++b) {
    const double a = alpha_.v[b];
    out.alphas[b] = a;
    const double* p1 = f1h_.data() + b * d;
    const double* p2 = f2h_.data() + b * d;
    double* fp = out.fused.data() + b * d;
    for (std::size_t i = 0; i < d; ++i) fp[i] = a * p1[i] + (1.0 - a) * p2[i];
  }
  return out;
}

AttentionFusion::Grads AttentionFusion::backward(const Tensor& g_fused) {
  if (f1h_.empty()) throw std::logic_error("attention fusion: backward before forward");
  const std::size_t n = f1h_.shape[0], d = latent_;

  Tensor g_f1h({n, d}), g_f2h({n, d}), g_alpha({n, 1});
  for (std::size_t b = 0; b < n; ++b) {
    const double a = alpha_.v[b];
    const double* gp = g_fused.data() + b * d;
    const double* p1 = f1h_.data() + b * d;
    const double* p2 = f2h_.data() + b * d;
    double* g1 = g_f1h.data() + b * d;
    double* g2 = g_f2h.data() + b * d;
    double ga = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      g1[i] = a * gp[i];
      g2[i] = (1.0 - a) * gp[i];
      ga += gp[i] * (p1[i] - p2[i]);
    }
    g_alpha.v[b] = ga;
  }

  Tensor g_z = attn_sigmoid_.backward(g_alpha);
  Tensor g_h = attn_out_layer_->backward(g_z);
  Tensor g_pre = attn_tanh_.backward(g_h);
  Tensor g_u = attn_hidden_layer_->backward(g_pre);
  for (std::size_t b = 0; b < n; ++b) {
    const double* gu = g_u.data() + b * 2 * d;
    double* g1 = g_f1h.data() + b * d;
    double* g2 = g_f2h.data() + b * d;
    for (std::size_t i = 0; i < d; ++i) {
      g1[i] += gu[i];
      g2[i] += gu[d + i];
    }
  }

  Grads out;
  out.g_f1 = proj1_->backward(g_f1h);
  out.g_f2 = proj2_->backward(g_f2h);
  return out;
}

void AttentionFusion::collect_params(std::vector<Param*>& out) {
  proj1_->collect_params(out);
  proj2_->collect_params(out);
  attn_hidden_layer_->collect_params(out);
  attn_out_layer_->collect_params(out);
}

// ------------------------------------------------------------ lambda sweep

std::vector<double> lambda_grid_default() {
  std::vector<double> g;
  for (int i = 1; i <= 9; ++i) g.push_back(i / 10.0);
  return g;
}

LambdaSweepResult sweep_lambda(const Tensor& scores1, const Tensor& scores2,
                               const std::vector<int>& labels,
                               const std::vector<double>& grid) {
  if (scores1.shape.size() != 2 || !scores1.same_shape(scores2))
    throw std::invalid_argument("sweep_lambda: score tensors must be [N,C] and match");
  const std::size_t n = scores1.shape[0], c = scores1.shape[1];
  if (n == 0) throw DataError("sweep_lambda: empty evaluation set");
  if (labels.size() != n)
    throw std::invalid_argument("sweep_lambda: labels do not match scores");
  if (grid.empty()) throw std::invalid_argument("sweep_lambda: empty grid");

  LambdaSweepResult res;
  for (double lambda : grid) {
    if (lambda < 0.0 || lambda > 1.0)
      throw std::invalid_argument("sweep_lambda: lambda outside [0,1]");
    std::size_t correct = 0;
    for (std::size_t b = 0; b < n; ++b) {
      const double* s1 = scores1.data() + b * c;
      const double* s2 = scores2.data() + b * c;
      std::size_t best = 0;
      double best_v = -1.0;
      for (std::size_t k = 0; k < c; ++k) {
        double v = lambda * s1[k] + (1.0 - lambda) * s2[k];
        if (v > best_v) {
          best_v = v;
          best = k;
        }
      }
      if (static_cast<int>(best) == labels[b]) ++correct;
    }
    double acc = 100.0 * static_cast<double>(correct) / static_cast<double>(n);
    res.lambdas.push_back(lambda);
    res.accuracies.push_back(acc);
    if (res.lambdas.size() == 1 || acc >= res.best_accuracy) {  // ties -> larger lambda
      res.best_accuracy = acc;
      res.best_lambda = lambda;
    }
  }
  return res;
}

}  // namespace heartid
