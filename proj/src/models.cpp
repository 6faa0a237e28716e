#include "heartid/models.hpp"

#include <algorithm>
#include <stdexcept>

namespace heartid {

Dataset Dataset::subset(const std::vector<std::size_t>& indices) const {
  Dataset out;
  out.classes = classes;
  out.items.reserve(indices.size());
  for (std::size_t i : indices) out.items.push_back(items.at(i));
  return out;
}

std::vector<int> Dataset::labels() const {
  std::vector<int> out;
  out.reserve(items.size());
  for (const auto& it : items) out.push_back(it.label);
  return out;
}

std::vector<std::string> Dataset::subjects_of_instances() const {
  std::vector<std::string> out;
  out.reserve(items.size());
  for (const auto& it : items) out.push_back(it.subject_id);
  return out;
}

Batch make_batch(const Dataset& data, const std::vector<std::size_t>& indices) {
  Batch b;
  if (indices.empty()) throw std::invalid_argument("make_batch: empty index list");
  const Instance& first = data.items.at(indices[0]);
  const std::size_t n = indices.size();
  if (!first.x1.empty()) {
    const std::size_t l = first.x1.shape.back();
    b.x1 = Tensor({n, 1, l});
    for (std::size_t i = 0; i < n; ++i) {
      const Tensor& x = data.items.at(indices[i]).x1;
      if (x.size() != l) throw std::invalid_argument("make_batch: ragged x1 lengths");
      std::copy(x.v.begin(), x.v.end(), b.x1.data() + i * l);
    }
  }
  if (!first.x2.empty()) {
    const std::size_t h = first.x2.shape[first.x2.shape.size() - 2];
    const std::size_t w = first.x2.shape.back();
    b.x2 = Tensor({n, 1, h, w});
    for (std::size_t i = 0; i < n; ++i) {
      const Tensor& x = data.items.at(indices[i]).x2;
      if (x.size() != h * w) throw std::invalid_argument("make_batch: ragged x2 dims");
      std::copy(x.v.begin(), x.v.end(), b.x2.data() + i * h * w);
    }
  }
  b.labels.reserve(n);
  for (std::size_t i : indices) b.labels.push_back(data.items.at(i).label);
  return b;
}

Dataset remap_to_subjects(const Dataset& data, const std::vector<std::string>& subjects) {
  std::vector<std::string> sorted = subjects;
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  Dataset out;
  out.classes = sorted;
  for (const auto& it : data.items) {
    auto pos = std::lower_bound(sorted.begin(), sorted.end(), it.subject_id);
    if (pos == sorted.end() || *pos != it.subject_id) continue;
    Instance copy = it;
    copy.label = static_cast<int>(pos - sorted.begin());
    out.items.push_back(std::move(copy));
  }
  return out;
}

// --------------------------------------------------------- BranchClassifier

BranchClassifier::BranchClassifier(BranchKind kind, const Branch1DConfig& cfg1,
                                   const Branch2DConfig& cfg2,
                                   std::size_t num_classes, double dropout,
                                   Rng& rng)
    : kind_(kind), dropout_(dropout) {
  if (num_classes < 2)
    throw std::invalid_argument("classifier needs at least 2 classes");
  std::size_t dim = 0;
  if (kind == BranchKind::Temporal1D) {
    b1_ = std::make_unique<Branch1D>(cfg1, rng);
    dim = b1_->out_dim();
  } else {
    b2_ = std::make_unique<Branch2D>(cfg2, rng);
    dim = b2_->out_dim();
  }
  head_ = std::make_unique<Dense>("head", dim, num_classes, rng);
}

Tensor BranchClassifier::forward_logits(const Batch& batch, bool train, Rng& rng) {
  Tensor f = (kind_ == BranchKind::Temporal1D) ? b1_->forward(batch.x1, train, rng)
                                               : b2_->forward(batch.x2, train, rng);
  f = dropout_.forward(f, train, rng);
  return head_->forward(f, train, rng);
}

void BranchClassifier::backward(const Tensor& g_logits) {
  Tensor g = head_->backward(g_logits);
  g = dropout_.backward(g);
  if (kind_ == BranchKind::Temporal1D)
    b1_->backward(g);
  else
    b2_->backward(g);
}

std::vector<Param*> BranchClassifier::params() {
  std::vector<Param*> out;
  if (b1_) b1_->collect_params(out);
  if (b2_) b2_->collect_params(out);
  head_->collect_params(out);
  return out;
}

// --------------------------------------------------------------- FusionModel

FusionModel::FusionModel(const Branch1DConfig& cfg1, const Branch2DConfig& cfg2,
                         const FusionConfig& fusion, std::size_t num_classes,
                         double dropout, Rng& rng)
    : fusion_cfg_(fusion),
      b1_(cfg1, rng),
      b2_(cfg2, rng),
      dropout_(dropout),
      d1_(cfg1.embed_dim),
      d2_(cfg2.embed_dim) {
  fusion_cfg_.validate();
  if (num_classes < 2)
    throw std::invalid_argument("classifier needs at least 2 classes");
  std::size_t fused_dim = 0;
  switch (fusion_cfg_.mode) {
    case FusionConfig::Mode::Feature:
      fused_dim = d1_ + d2_;
      break;
    case FusionConfig::Mode::Attention:
      attention_ = std::make_unique<AttentionFusion>(d1_, d2_, fusion_cfg_.latent_dim,
                                                     fusion_cfg_.attn_hidden, rng);
      fused_dim = attention_->out_dim();
      break;
    case FusionConfig::Mode::Score:
      throw std::invalid_argument(
          "score fusion combines independently trained classifiers; "
          "use BranchClassifier + fuse_scores");
  }
  head_ = std::make_unique<Dense>("head", fused_dim, num_classes, rng);
}

Tensor FusionModel::forward_logits(const Batch& batch, bool train, Rng& rng) {
  Tensor f1 = b1_.forward(batch.x1, train, rng);
  Tensor f2 = b2_.forward(batch.x2, train, rng);
  Tensor fused;
  if (fusion_cfg_.mode == FusionConfig::Mode::Feature) {
    const std::size_t n = f1.shape[0];
    fused = Tensor({n, d1_ + d2_});
    for (std::size_t b = 0; b < n; ++b) {
      std::copy(f1.data() + b * d1_, f1.data() + (b + 1) * d1_,
                fused.data() + b * (d1_ + d2_));
      std::copy(f2.data() + b * d2_, f2.data() + (b + 1) * d2_,
                fused.data() + b * (d1_ + d2_) + d1_);
    }
    alphas_.clear();
  } else {
    AttentionFusion::Output out = attention_->forward(f1, f2, train, rng);
    fused = std::move(out.fused);
    alphas_ = std::move(out.alphas);
  }
  fused = dropout_.forward(fused, train, rng);
  return head_->forward(fused, train, rng);
}

void FusionModel::backward(const Tensor& g_logits) {
  Tensor g = head_->backward(g_logits);
  g = dropout_.backward(g);
  if (fusion_cfg_.mode == FusionConfig::Mode::Feature) {
    const std::size_t n = g.shape[0];
    Tensor g1({n, d1_}), g2({n, d2_});
    for (std::size_t b = 0; b < n; ++b) {
      std::copy(g.data() + b * (d1_ + d2_), g.data() + b * (d1_ + d2_) + d1_,
                g1.data() + b * d1_);
      std::copy(g.data() + b * (d1_ + d2_) + d1_, g.data() + (b + 1) * (d1_ + d2_),
                g2.data() + b * d2_);
    }
    b1_.backward(g1);
    b2_.backward(g2);
  } else {
    AttentionFusion::Grads grads = attention_->backward(g);
    b1_.backward(grads.g_f1);
    b2_.backward(grads.g_f2);
  }
}

std::vector<Param*> FusionModel::params() {
  std::vector<Param*> out;
  b1_.collect_params(out);
  b2_.collect_params(out);
  if (attention_) attention_->collect_params(out);
  head_->collect_params(out);
  return out;
}

}  // namespace heartid
