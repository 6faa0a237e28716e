#include "heartid/branches.hpp"

#include <stdexcept>

namespace heartid {

namespace {

Tensor concat_channels(const std::vector<Tensor>& parts) {
  const std::size_t n = parts[0].shape[0], l = parts[0].shape[2];
  std::size_t total_ch = 0;
  for (const Tensor& p : parts) total_ch += p.shape[1];
  Tensor y({n, total_ch, l});
  for (std::size_t b = 0; b < n; ++b) {
    std::size_t ch_off = 0;
    for (const Tensor& p : parts) {
      const std::size_t c = p.shape[1];
      const double* src = p.data() + b * c * l;
      double* dst = y.data() + (b * total_ch + ch_off) * l;
      std::copy(src, src + c * l, dst);
      ch_off += c;
    }
  }
  return y;
}

std::vector<Tensor> split_channels(const Tensor& y, const std::vector<std::size_t>& sizes) {
  const std::size_t n = y.shape[0], total_ch = y.shape[1], l = y.shape[2];
  std::vector<Tensor> parts;
  std::size_t ch_off = 0;
  for (std::size_t c : sizes) {
    Tensor p({n, c, l});
    for (std::size_t b = 0; b < n; ++b) {
      const double* src = y.data() + (b * total_ch + ch_off) * l;
      std::copy(src, src + c * l, p.data() + b * c * l);
    }
    ch_off += c;
    parts.push_back(std::move(p));
  }
  return parts;
}

void add_into(Tensor& dst, const Tensor& src) {
  for (std::size_t i = 0; i < dst.v.size(); ++i) dst.v[i] += src.v[i];
}

}  // namespace

std::size_t param_count(const std::vector<Param*>& params) {
  std::size_t n = 0;
  for (const Param* p : params) n += p->w.size();
  return n;
}

// --------------------------------------------------------------- Branch1D

void Branch1DConfig::validate() const {
  if (input_len < 8) throw std::invalid_argument("branch1d: input_len must be >= 8");
  if (kernel_sizes.empty()) throw std::invalid_argument("branch1d: no kernel sizes");
  for (std::size_t k : kernel_sizes)
    if (k % 2 == 0) throw std::invalid_argument("branch1d: kernel sizes must be odd");
  if (channels_per_path == 0 || depth == 0 || embed_dim == 0)
    throw std::invalid_argument("branch1d: zero-sized dimension");
}

Branch1D::Branch1D(const Branch1DConfig& config, Rng& rng) : config_(config) {
  config_.validate();
  const std::size_t cpp = config_.channels_per_path;
  const std::size_t n_paths = config_.kernel_sizes.size() + 1;  // + pool path
  std::size_t in_ch = 1;
  for (std::size_t d = 0; d < config_.depth; ++d) {
    Block blk;
    blk.in_ch = in_ch;
    blk.out_ch = n_paths * cpp;
    std::string base = "b1d.block" + std::to_string(d);
    std::size_t conv_in = in_ch;
    if (in_ch > cpp) {
      blk.bottleneck = std::make_unique<Conv1d>(base + ".bottleneck", in_ch, cpp, 1, 1, rng);
      conv_in = cpp;
    }
    for (std::size_t p = 0; p < config_.kernel_sizes.size(); ++p)
      blk.paths.push_back(std::make_unique<Conv1d>(base + ".path" + std::to_string(p),
                                                   conv_in, cpp,
                                                   config_.kernel_sizes[p], 1, rng));
    blk.pool = std::make_unique<MaxPool1d>(3);
    blk.pool_proj = std::make_unique<Conv1d>(base + ".pool_proj", in_ch, cpp, 1, 1, rng);
    if (in_ch != blk.out_ch)
      blk.residual_proj =
          std::make_unique<Conv1d>(base + ".residual", in_ch, blk.out_ch, 1, 1, rng);
    blocks_.push_back(std::move(blk));
    in_ch = n_paths * cpp;
  }
  embed_ = std::make_unique<Dense>("b1d.embed", in_ch, config_.embed_dim, rng);
}

Tensor Branch1D::block_forward(Block& blk, const Tensor& x, bool train, Rng& rng) {
  Tensor bt = blk.bottleneck ? blk.bottleneck->forward(x, train, rng) : x;
  std::vector<Tensor> parts;
  for (auto& conv : blk.paths) parts.push_back(conv->forward(bt, train, rng));
  Tensor pooled = blk.pool->forward(x, train, rng);
  parts.push_back(blk.pool_proj->forward(pooled, train, rng));
  Tensor y = concat_channels(parts);
  Tensor res = blk.residual_proj ? blk.residual_proj->forward(x, train, rng) : x;
  add_into(y, res);
  return blk.relu.forward(y, train, rng);
}

Tensor Branch1D::block_backward(Block& blk, const Tensor& gy) {
  Tensor g = blk.relu.backward(gy);
  const std::size_t cpp = config_.channels_per_path;
  std::vector<std::size_t> sizes(blk.paths.size() + 1, cpp);
  std::vector<Tensor> gparts = split_channels(g, sizes);

  Tensor gx = blk.residual_proj ? blk.residual_proj->backward(g) : g;

  Tensor g_bt;  // grad into the bottleneck output (shared by conv paths)
  for (std::size_t p = 0; p < blk.paths.size(); ++p) {
    Tensor gp = blk.paths[p]->backward(gparts[p]);
    if (g_bt.empty()) g_bt = std::move(gp);
    else add_into(g_bt, gp);
  }
  if (blk.bottleneck)
    add_into(gx, blk.bottleneck->backward(g_bt));
  else
    add_into(gx, g_bt);

  Tensor g_pool = blk.pool_proj->backward(gparts.back());
  add_into(gx, blk.pool->backward(g_pool));
  return gx;
}

Tensor Branch1D::forward(const Tensor& x, bool train, Rng& rng) {
  if (x.shape.size() != 3 || x.shape[1] != 1 || x.shape[2] != config_.input_len)
    throw std::invalid_argument("branch1d: expected [N,1," +
                                std::to_string(config_.input_len) + "], got " +
                                x.shape_str());
  Tensor h = x;
  for (Block& blk : blocks_) h = block_forward(blk, h, train, rng);
  h = gap_.forward(h, train, rng);
  Tensor out = embed_->forward(h, train, rng);
  out.check_finite("1D branch embedding");
  return out;
}

Tensor Branch1D::backward(const Tensor& g_embed) {
  Tensor g = embed_->backward(g_embed);
  g = gap_.backward(g);
  for (std::size_t i = blocks_.size(); i-- > 0;) g = block_backward(blocks_[i], g);
  return g;
}

void Branch1D::collect_params(std::vector<Param*>& out) {
  for (Block& blk : blocks_) {
    if (blk.bottleneck) blk.bottleneck->collect_params(out);
    for (auto& c : blk.paths) c->collect_params(out);
    blk.pool_proj->collect_params(out);
    if (blk.residual_proj) blk.residual_proj->collect_params(out);
  }
  embed_->collect_params(out);
}

// --------------------------------------------------------------- Branch2D

void Branch2DConfig::validate() const {
  if (input_h < 8 || input_w < 8)
    throw std::invalid_argument("branch2d: input dims must be >= 8");
  if (base_channels == 0 || blocks == 0 || embed_dim == 0)
    throw std::invalid_argument("branch2d: zero-sized dimension");
}

Branch2D::Branch2D(const Branch2DConfig& config, Rng& rng) : config_(config) {
  config_.validate();
  stem_ = std::make_unique<Conv2d>("b2d.stem", 1, config_.base_channels, 3, 1, rng);
  std::size_t ch = config_.base_channels;
  for (std::size_t i = 0; i < config_.blocks; ++i) {
    Block blk;
    std::size_t out_ch = (i == 0) ? ch : ch * 2;
    std::size_t stride = (i == 0) ? 1 : 2;
    std::string base = "b2d.block" + std::to_string(i);
    blk.conv1 = std::make_unique<Conv2d>(base + ".conv1", ch, out_ch, 3, stride, rng);
    blk.conv2 = std::make_unique<Conv2d>(base + ".conv2", out_ch, out_ch, 3, 1, rng);
    if (ch != out_ch || stride != 1)
      blk.proj = std::make_unique<Conv2d>(base + ".proj", ch, out_ch, 1, stride, rng);
    blocks_.push_back(std::move(blk));
    ch = out_ch;
  }
  embed_ = std::make_unique<Dense>("b2d.embed", ch, config_.embed_dim, rng);
}

Tensor Branch2D::block_forward(Block& blk, const Tensor& x, bool train, Rng& rng) {
  Tensor h = blk.conv1->forward(x, train, rng);
  h = blk.relu1.forward(h, train, rng);
  h = blk.conv2->forward(h, train, rng);
  Tensor res = blk.proj ? blk.proj->forward(x, train, rng) : x;
  add_into(h, res);
  return blk.relu2.forward(h, train, rng);
}

Tensor Branch2D::block_backward(Block& blk, const Tensor& gy) {
  Tensor g = blk.relu2.backward(gy);
  Tensor gx = blk.proj ? blk.proj->backward(g) : g;
  Tensor gm = blk.conv2->backward(g);
  gm = blk.relu1.backward(gm);
  add_into(gx, blk.conv1->backward(gm));
  return gx;
}

Tensor Branch2D::forward(const Tensor& x, bool train, Rng& rng) {
  if (x.shape.size() != 4 || x.shape[1] != 1 || x.shape[2] != config_.input_h ||
      x.shape[3] != config_.input_w)
    throw std::invalid_argument("branch2d: expected [N,1," +
                                std::to_string(config_.input_h) + "," +
                                std::to_string(config_.input_w) + "], got " +
                                x.shape_str());
  Tensor h = stem_->forward(x, train, rng);
  h = stem_relu_.forward(h, train, rng);
  h = stem_pool_.forward(h, train, rng);
  for (Block& blk : blocks_) h = block_forward(blk, h, train, rng);
  h = gap_.forward(h, train, rng);
  Tensor out = embed_->forward(h, train, rng);
  out.check_finite("2D branch embedding");
  return out;
}

Tensor Branch2D::backward(const Tensor& g_embed) {
  Tensor g = embed_->backward(g_embed);
  g = gap_.backward(g);
  for (std::size_t i = blocks_.size(); i-- > 0;) g = block_backward(blocks_[i], g);
  g = stem_pool_.backward(g);
  g = stem_relu_.backward(g);
  return stem_->backward(g);
}

void Branch2D::collect_params(std::vector<Param*>& out) {
  stem_->collect_params(out);
  for (Block& blk : blocks_) {
    blk.conv1->collect_params(out);
    blk.conv2->collect_params(out);
    if (blk.proj) blk.proj->collect_params(out);
  }
  embed_->collect_params(out);
}

}  // namespace heartid
