#pragma once

#include <memory>
#include <vector>

#include "heartid/branches.hpp"
#include "heartid/dataset.hpp"
#include "heartid/fusion.hpp"

namespace heartid {

// Anything the trainer can optimize: forward to logits, backward from the
// logit gradient, expose parameters.
class Model {
 public:
  virtual ~Model() = default;
  virtual Tensor forward_logits(const Batch& batch, bool train, Rng& rng) = 0;
  virtual void backward(const Tensor& g_logits) = 0;
  virtual std::vector<Param*> params() = 0;
  // per-instance attention weights from the last forward; empty when the
  // model has no gate
  virtual std::vector<double> last_alphas() const { return {}; }
};

enum class BranchKind { Temporal1D, Spectral2D };

// One branch plus dropout and a dense softmax classifier head.
class BranchClassifier : public Model {
 public:
  BranchClassifier(BranchKind kind, const Branch1DConfig& cfg1,
                   const Branch2DConfig& cfg2, std::size_t num_classes,
                   double dropout, Rng& rng);

  Tensor forward_logits(const Batch& batch, bool train, Rng& rng) override;
  void backward(const Tensor& g_logits) override;
  std::vector<Param*> params() override;

 private:
  BranchKind kind_;
  std::unique_ptr<Branch1D> b1_;
  std::unique_ptr<Branch2D> b2_;
  Dropout dropout_;
  std::unique_ptr<Dense> head_;
};

// Dual-branch model with feature-level or attention-guided fusion, trained
// end to end. (Score-level fusion combines two independently trained
// BranchClassifiers and lives in the protocol layer.)
class FusionModel : public Model {
 public:
  FusionModel(const Branch1DConfig& cfg1, const Branch2DConfig& cfg2,
              const FusionConfig& fusion, std::size_t num_classes,
              double dropout, Rng& rng);

  Tensor forward_logits(const Batch& batch, bool train, Rng& rng) override;
  void backward(const Tensor& g_logits) override;
  std::vector<Param*> params() override;
  std::vector<double> last_alphas() const override { return alphas_; }

 private:
  FusionConfig fusion_cfg_;
  Branch1D b1_;
  Branch2D b2_;
  std::unique_ptr<AttentionFusion> attention_;
  Dropout dropout_;
  std::unique_ptr<Dense> head_;
  std::vector<double> alphas_;
  std::size_t d1_, d2_;
};

}  // namespace heartid
