#include "heartid/layers.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "heartid/errors.hpp"

namespace heartid {

namespace {

void require_rank(const Tensor& x, std::size_t rank, const char* who) {
  if (x.shape.size() != rank)
    throw std::invalid_argument(std::string(who) + ": expected rank " +
                                std::to_string(rank) + " input, got " + x.shape_str());
}

void require_forward(const Tensor& cached, const char* who) {
  if (cached.empty())
    throw std::logic_error(std::string(who) + ": backward without matching forward");
}

}  // namespace

void init_uniform(Param& p, std::size_t fan_in, Rng& rng) {
  double bound = 1.0 / std::sqrt(static_cast<double>(std::max<std::size_t>(1, fan_in)));
  for (double& w : p.w.v) w = rng.uniform(-bound, bound);
}

// ---------------------------------------------------------------- Conv1d

Conv1d::Conv1d(std::string name, std::size_t in_ch, std::size_t out_ch,
               std::size_t kernel, std::size_t stride, Rng& rng)
    : in_ch_(in_ch),
      out_ch_(out_ch),
      k_(kernel),
      stride_(stride),
      w_(name + ".w", {out_ch, in_ch, kernel}),
      b_(name + ".b", {out_ch}) {
  if (kernel % 2 == 0) throw std::invalid_argument("Conv1d kernel must be odd");
  init_uniform(w_, in_ch * kernel, rng);
}

Tensor Conv1d::forward(const Tensor& x, bool, Rng&) {
  require_rank(x, 3, "Conv1d");
  if (x.shape[1] != in_ch_)
    throw std::invalid_argument("Conv1d: channel mismatch " + x.shape_str());
  x_ = x;
  const std::size_t n = x.shape[0], l = x.shape[2];
  const std::size_t lo = (l + stride_ - 1) / stride_;
  const long pad = static_cast<long>(k_ / 2);
  Tensor y({n, out_ch_, lo});
  for (std::size_t b = 0; b < n; ++b)
    for (std::size_t o = 0; o < out_ch_; ++o) {
      double* yp = y.data() + (b * out_ch_ + o) * lo;
      for (std::size_t t = 0; t < lo; ++t) {
        double acc = b_.w.v[o];
        const long center = static_cast<long>(t * stride_);
        for (std::size_t c = 0; c < in_ch_; ++c) {
          const double* xp = x.data() + (b * in_ch_ + c) * l;
          const double* wp = w_.w.data() + (o * in_ch_ + c) * k_;
          const long j_lo = std::max(0L, pad - center);
          const long j_hi = std::min<long>(static_cast<long>(k_) - 1,
                                           static_cast<long>(l) - 1 - center + pad);
          for (long j = j_lo; j <= j_hi; ++j)
            acc += wp[j] * xp[center - pad + j];
        }
        yp[t] = acc;
      }
    }
  return y;
}

Tensor Conv1d::backward(const Tensor& gy) {
  require_forward(x_, "Conv1d");
  const std::size_t n = x_.shape[0], l = x_.shape[2];
  const std::size_t lo = gy.shape[2];
  const long pad = static_cast<long>(k_ / 2);
  Tensor gx(x_.shape);
  for (std::size_t b = 0; b < n; ++b)
    for (std::size_t o = 0; o < out_ch_; ++o) {
      const double* gp = gy.data() + (b * out_ch_ + o) * lo;
      for (std::size_t t = 0; t < lo; ++t) {
        const double g = gp[t];
        if (g == 0.0) continue;
        b_.g.v[o] += g;
        const long center = static_cast<long>(t * stride_);
        for (std::size_t c = 0; c < in_ch_; ++c) {
          const double* xp = x_.data() + (b * in_ch_ + c) * l;
          double* gxp = gx.data() + (b * in_ch_ + c) * l;
          double* gwp = w_.g.data() + (o * in_ch_ + c) * k_;
          const double* wp = w_.w.data() + (o * in_ch_ + c) * k_;
          const long j_lo = std::max(0L, pad - center);
          const long j_hi = std::min<long>(static_cast<long>(k_) - 1,
                                           static_cast<long>(l) - 1 - center + pad);
          for (long j = j_lo; j <= j_hi; ++j) {
            gwp[j] += g * xp[center - pad + j];
            gxp[center - pad + j] += g * wp[j];
          }
        }
      }
    }
  x_ = Tensor();  // the tape is spent; reuse must re-run forward
  return gx;
}

void Conv1d::collect_params(std::vector<Param*>& out) {
  out.push_back(&w_);
  out.push_back(&b_);
}

// ---------------------------------------------------------------- Conv2d

Conv2d::Conv2d(std::string name, std::size_t in_ch, std::size_t out_ch,
               std::size_t kernel, std::size_t stride, Rng& rng)
    : in_ch_(in_ch),
      out_ch_(out_ch),
      k_(kernel),
      stride_(stride),
      w_(name + ".w", {out_ch, in_ch, kernel, kernel}),
      b_(name + ".b", {out_ch}) {
  if (kernel % 2 == 0) throw std::invalid_argument("Conv2d kernel must be odd");
  init_uniform(w_, in_ch * kernel * kernel, rng);
}

Tensor Conv2d::forward(const Tensor& x, bool, Rng&) {
  require_rank(x, 4, "Conv2d");
  if (x.shape[1] != in_ch_)
    throw std::invalid_argument("Conv2d: channel mismatch " + x.shape_str());
  x_ = x;
  const std::size_t n = x.shape[0], h = x.shape[2], w = x.shape[3];
  const std::size_t ho = (h + stride_ - 1) / stride_;
  const std::size_t wo = (w + stride_ - 1) / stride_;
  const long pad = static_cast<long>(k_ / 2);
  Tensor y({n, out_ch_, ho, wo});
  for (std::size_t b = 0; b < n; ++b)
    for (std::size_t o = 0; o < out_ch_; ++o) {
      double* yp = y.data() + (b * out_ch_ + o) * ho * wo;
      for (std::size_t ty = 0; ty < ho; ++ty)
        for (std::size_t tx = 0; tx < wo; ++tx) {
          double acc = b_.w.v[o];
          const long cy = static_cast<long>(ty * stride_);
          const long cx = static_cast<long>(tx * stride_);
          for (std::size_t c = 0; c < in_ch_; ++c) {
            const double* xp = x.data() + (b * in_ch_ + c) * h * w;
            const double* wp = w_.w.data() + (o * in_ch_ + c) * k_ * k_;
            const long ky_lo = std::max(0L, pad - cy);
            const long ky_hi = std::min<long>(static_cast<long>(k_) - 1,
                                              static_cast<long>(h) - 1 - cy + pad);
            const long kx_lo = std::max(0L, pad - cx);
            const long kx_hi = std::min<long>(static_cast<long>(k_) - 1,
                                              static_cast<long>(w) - 1 - cx + pad);
            for (long ky = ky_lo; ky <= ky_hi; ++ky) {
              const double* xrow = xp + (cy - pad + ky) * static_cast<long>(w);
              const double* wrow = wp + ky * static_cast<long>(k_);
              for (long kx = kx_lo; kx <= kx_hi; ++kx)
                acc += wrow[kx] * xrow[cx - pad + kx];
            }
          }
          yp[ty * wo + tx] = acc;
        }
    }
  return y;
}

Tensor Conv2d::backward(const Tensor& gy) {
  require_forward(x_, "Conv2d");
  const std::size_t n = x_.shape[0], h = x_.shape[2], w = x_.shape[3];
  const std::size_t ho = gy.shape[2], wo = gy.shape[3];
  const long pad = static_cast<long>(k_ / 2);
  Tensor gx(x_.shape);
  for (std::size_t b = 0; b < n; ++b)
    for (std::size_t o = 0; o < out_ch_; ++o) {
      const double* gp = gy.data() + (b * out_ch_ + o) * ho * wo;
      for (std::size_t ty = 0; ty < ho; ++ty)
        for (std::size_t tx = 0; tx < wo; ++tx) {
          const double g = gp[ty * wo + tx];
          if (g == 0.0) continue;
          b_.g.v[o] += g;
          const long cy = static_cast<long>(ty * stride_);
          const long cx = static_cast<long>(tx * stride_);
          for (std::size_t c = 0; c < in_ch_; ++c) {
            const double* xp = x_.data() + (b * in_ch_ + c) * h * w;
            double* gxp = gx.data() + (b * in_ch_ + c) * h * w;
            double* gwp = w_.g.data() + (o * in_ch_ + c) * k_ * k_;
            const double* wp = w_.w.data() + (o * in_ch_ + c) * k_ * k_;
            const long ky_lo = std::max(0L, pad - cy);
            const long ky_hi = std::min<long>(static_cast<long>(k_) - 1,
                                              static_cast<long>(h) - 1 - cy + pad);
            const long kx_lo = std::max(0L, pad - cx);
            const long kx_hi = std::min<long>(static_cast<long>(k_) - 1,
                                              static_cast<long>(w) - 1 - cx + pad);
            for (long ky = ky_lo; ky <= ky_hi; ++ky) {
              const long row = (cy - pad + ky) * static_cast<long>(w);
              for (long kx = kx_lo; kx <= kx_hi; ++kx) {
                const long xi = row + cx - pad + kx;
                gwp[ky * static_cast<long>(k_) + kx] += g * xp[xi];
                gxp[xi] += g * wp[ky * static_cast<long>(k_) + kx];
              }
            }
          }
        }
    }
  x_ = Tensor();
  return gx;
}

void Conv2d::collect_params(std::vector<Param*>& out) {
  out.push_back(&w_);
  out.push_back(&b_);
}

// ----------------------------------------------------------------- Dense

Dense::Dense(std::string name, std::size_t in_dim, std::size_t out_dim, Rng& rng)
    : in_(in_dim),
      out_(out_dim),
      w_(name + ".w", {out_dim, in_dim}),
      b_(name + ".b", {out_dim}) {
  init_uniform(w_, in_dim, rng);
}

Tensor Dense::forward(const Tensor& x, bool, Rng&) {
  require_rank(x, 2, "Dense");
  if (x.shape[1] != in_)
    throw std::invalid_argument("Dense: dimension mismatch " + x.shape_str());
  x_ = x;
  const std::size_t n = x.shape[0];
  Tensor y({n, out_});
  for (std::size_t b = 0; b < n; ++b) {
    const double* xp = x.data() + b * in_;
    double* yp = y.data() + b * out_;
    for (std::size_t o = 0; o < out_; ++o) {
      const double* wp = w_.w.data() + o * in_;
      double acc = b_.w.v[o];
      for (std::size_t i = 0; i < in_; ++i) acc += wp[i] * xp[i];
      yp[o] = acc;
    }
  }
  return y;
}

Tensor Dense::backward(const Tensor& gy) {
  require_forward(x_, "Dense");
  const std::size_t n = x_.shape[0];
  Tensor gx(x_.shape);
  for (std::size_t b = 0; b < n; ++b) {
    const double* xp = x_.data() + b * in_;
    const double* gp = gy.data() + b * out_;
    double* gxp = gx.data() + b * in_;
    for (std::size_t o = 0; o < out_; ++o) {
      const double g = gp[o];
      if (g == 0.0) continue;
      b_.g.v[o] += g;
      double* gwp = w_.g.data() + o * in_;
      const double* wp = w_.w.data() + o * in_;
      for (std::size_t i = 0; i < in_; ++i) {
        gwp[i] += g * xp[i];
        gxp[i] += g * wp[i];
      }
    }
  }
  x_ = Tensor();
  return gx;
}

void Dense::collect_params(std::vector<Param*>& out) {
  out.push_back(&w_);
  out.push_back(&b_);
}

// ----------------------------------------------------------- activations

Tensor Relu::forward(const Tensor& x, bool, Rng&) {
  x_ = x;
  Tensor y = x;
  for (double& v : y.v) v = v > 0 ? v : 0.0;
  return y;
}

Tensor Relu::backward(const Tensor& gy) {
  require_forward(x_, "Relu");
  Tensor gx = gy;
  for (std::size_t i = 0; i < gx.v.size(); ++i)
    if (x_.v[i] <= 0) gx.v[i] = 0.0;
  return gx;
}

Tensor Tanh::forward(const Tensor& x, bool, Rng&) {
  Tensor y = x;
  for (double& v : y.v) v = std::tanh(v);
  y_ = y;
  return y;
}

Tensor Tanh::backward(const Tensor& gy) {
  require_forward(y_, "Tanh");
  Tensor gx = gy;
  for (std::size_t i = 0; i < gx.v.size(); ++i)
    gx.v[i] *= 1.0 - y_.v[i] * y_.v[i];
  return gx;
}

Tensor Sigmoid::forward(const Tensor& x, bool, Rng&) {
  Tensor y = x;
  for (double& v : y.v) v = 1.0 / (1.0 + std::exp(-v));
  y_ = y;
  return y;
}

Tensor Sigmoid::backward(const Tensor& gy) {
  require_forward(y_, "Sigmoid");
  Tensor gx = gy;
  for (std::size_t i = 0; i < gx.v.size(); ++i)
    gx.v[i] *= y_.v[i] * (1.0 - y_.v[i]);
  return gx;
}

Tensor Dropout::forward(const Tensor& x, bool train, Rng& rng) {
  if (!train || p_ <= 0.0) {
    mask_ = Tensor(x.shape);
    mask_.fill(1.0);
    return x;
  }
  mask_ = Tensor(x.shape);
  const double keep = 1.0 - p_;
  for (std::size_t i = 0; i < mask_.v.size(); ++i)
    mask_.v[i] = (rng.uniform() >= p_) ? 1.0 / keep : 0.0;
  Tensor y = x;
  for (std::size_t i = 0; i < y.v.size(); ++i) y.v[i] *= mask_.v[i];
  return y;
}

Tensor Dropout::backward(const Tensor& gy) {
  require_forward(mask_, "Dropout");
  Tensor gx = gy;
  for (std::size_t i = 0; i < gx.v.size(); ++i) gx.v[i] *= mask_.v[i];
  return gx;
}

// --------------------------------------------------------------- pooling

Tensor MaxPool1d::forward(const Tensor& x, bool, Rng&) {
  require_rank(x, 3, "MaxPool1d");
  x_ = x;
  const std::size_t n = x.shape[0], c = x.shape[1], l = x.shape[2];
  const long half = static_cast<long>(window_ / 2);
  Tensor y(x.shape);
  argmax_.assign(x.size(), 0);
  for (std::size_t b = 0; b < n; ++b)
    for (std::size_t ch = 0; ch < c; ++ch) {
      const double* xp = x.data() + (b * c + ch) * l;
      double* yp = y.data() + (b * c + ch) * l;
      std::size_t* ap = argmax_.data() + (b * c + ch) * l;
      for (long t = 0; t < static_cast<long>(l); ++t) {
        long lo = std::max(0L, t - half), hi = std::min<long>(l - 1, t + half);
        long best = lo;
        for (long j = lo + 1; j <= hi; ++j)
          if (xp[j] > xp[best]) best = j;
        yp[t] = xp[best];
        ap[t] = static_cast<std::size_t>(best);
      }
    }
  return y;
}

Tensor MaxPool1d::backward(const Tensor& gy) {
  require_forward(x_, "MaxPool1d");
  const std::size_t n = x_.shape[0], c = x_.shape[1], l = x_.shape[2];
  Tensor gx(x_.shape);
  for (std::size_t b = 0; b < n; ++b)
    for (std::size_t ch = 0; ch < c; ++ch) {
      const double* gp = gy.data() + (b * c + ch) * l;
      double* gxp = gx.data() + (b * c + ch) * l;
      const std::size_t* ap = argmax_.data() + (b * c + ch) * l;
      for (std::size_t t = 0; t < l; ++t) gxp[ap[t]] += gp[t];
    }
  return gx;
}

Tensor MaxPool2d::forward(const Tensor& x, bool, Rng&) {
  require_rank(x, 4, "MaxPool2d");
  in_shape_ = x.shape;
  const std::size_t n = x.shape[0], c = x.shape[1], h = x.shape[2], w = x.shape[3];
  const std::size_t ho = h / window_, wo = w / window_;
  if (ho == 0 || wo == 0) throw std::invalid_argument("MaxPool2d: input smaller than window");
  Tensor y({n, c, ho, wo});
  argmax_.assign(y.size(), 0);
  std::size_t oi = 0;
  for (std::size_t b = 0; b < n; ++b)
    for (std::size_t ch = 0; ch < c; ++ch) {
      const double* xp = x.data() + (b * c + ch) * h * w;
      for (std::size_t ty = 0; ty < ho; ++ty)
        for (std::size_t tx = 0; tx < wo; ++tx, ++oi) {
          std::size_t best = (ty * window_) * w + tx * window_;
          for (std::size_t dy = 0; dy < window_; ++dy)
            for (std::size_t dx = 0; dx < window_; ++dx) {
              std::size_t idx = (ty * window_ + dy) * w + tx * window_ + dx;
              if (xp[idx] > xp[best]) best = idx;
            }
          y.v[oi] = xp[best];
          argmax_[oi] = (b * c + ch) * h * w + best;
        }
    }
  return y;
}

Tensor MaxPool2d::backward(const Tensor& gy) {
  if (in_shape_.empty())
    throw std::logic_error("MaxPool2d: backward without matching forward");
  Tensor gx(in_shape_);
  for (std::size_t i = 0; i < gy.size(); ++i) gx.v[argmax_[i]] += gy.v[i];
  return gx;
}

Tensor GlobalAvgPool::forward(const Tensor& x, bool, Rng&) {
  if (x.shape.size() < 3)
    throw std::invalid_argument("GlobalAvgPool: expected [N, C, ...] input");
  in_shape_ = x.shape;
  const std::size_t n = x.shape[0], c = x.shape[1];
  std::size_t spatial = 1;
  for (std::size_t i = 2; i < x.shape.size(); ++i) spatial *= x.shape[i];
  Tensor y({n, c});
  for (std::size_t b = 0; b < n; ++b)
    for (std::size_t ch = 0; ch < c; ++ch) {
      const double* xp = x.data() + (b * c + ch) * spatial;
      double acc = 0.0;
      for (std::size_t i = 0; i < spatial; ++i) acc += xp[i];
      y.v[b * c + ch] = acc / static_cast<double>(spatial);
    }
  return y;
}

Tensor GlobalAvgPool::backward(const Tensor& gy) {
  if (in_shape_.empty())
    throw std::logic_error("GlobalAvgPool: backward without matching forward");
  const std::size_t n = in_shape_[0], c = in_shape_[1];
  std::size_t spatial = 1;
  for (std::size_t i = 2; i < in_shape_.size(); ++i) spatial *= in_shape_[i];
  Tensor gx(in_shape_);
  const double inv = 1.0 / static_cast<double>(spatial);
  for (std::size_t b = 0; b < n; ++b)
    for (std::size_t ch = 0; ch < c; ++ch) {
      double g = gy.v[b * c + ch] * inv;
      double* gxp = gx.data() + (b * c + ch) * spatial;
      for (std::size_t i = 0; i < spatial; ++i) gxp[i] += g;
    }
  return gx;
}

// ---------------------------------------------------------- softmax/xent

Tensor softmax_rows(const Tensor& logits) {
  if (logits.shape.size() != 2)
    throw std::invalid_argument("softmax: expected [N, C] logits");
  const std::size_t n = logits.shape[0], c = logits.shape[1];
  Tensor p(logits.shape);
  for (std::size_t b = 0; b < n; ++b) {
    const double* lp = logits.data() + b * c;
    double* pp = p.data() + b * c;
    double mx = lp[0];
    for (std::size_t i = 1; i < c; ++i) mx = std::max(mx, lp[i]);
    double sum = 0.0;
    for (std::size_t i = 0; i < c; ++i) {
      pp[i] = std::exp(lp[i] - mx);
      sum += pp[i];
    }
    for (std::size_t i = 0; i < c; ++i) pp[i] /= sum;
  }
  return p;
}

double SoftmaxXent::forward(const Tensor& logits, const std::vector<int>& labels) {
  if (logits.shape.size() != 2 || logits.shape[0] != labels.size())
    throw std::invalid_argument("SoftmaxXent: logits/labels shape mismatch");
  logits.check_finite("logits");
  probs_ = softmax_rows(logits);
  labels_ = labels;
  const std::size_t n = logits.shape[0], c = logits.shape[1];
  double loss = 0.0;
  for (std::size_t b = 0; b < n; ++b) {
    int y = labels[b];
    if (y < 0 || static_cast<std::size_t>(y) >= c)
      throw std::invalid_argument("SoftmaxXent: label out of range");
    loss -= std::log(std::max(probs_.v[b * c + y], 1e-300));
  }
  return loss / static_cast<double>(n);
}

Tensor SoftmaxXent::backward() const {
  if (probs_.empty()) throw std::logic_error("SoftmaxXent: backward before forward");
  const std::size_t n = probs_.shape[0], c = probs_.shape[1];
  Tensor g = probs_;
  for (std::size_t b = 0; b < n; ++b)
    g.v[b * c + labels_[b]] -= 1.0;
  const double inv = 1.0 / static_cast<double>(n);
  for (double& v : g.v) v *= inv;
  return g;
}

}  // namespace heartid
