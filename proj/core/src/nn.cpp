// Copyright 2026 The awmark Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "awm/nn.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <cstring>
#include <istream>
#include <ostream>

namespace awm::nn {

namespace {

using MatRM = Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MapM = Eigen::Map<MatRM>;
using MapCM = Eigen::Map<const MatRM>;
using MapV = Eigen::Map<Eigen::VectorXf>;
using MapCV = Eigen::Map<const Eigen::VectorXf>;

thread_local std::vector<float> tl_col;     // im2col scratch
thread_local std::vector<float> tl_colg;    // col-gradient scratch

// Builds the (cin*k*k, h*w) im2col matrix for stride-1 same-padding conv.
void im2col2d(const float* x, int cin, int h, int w, int k, std::vector<float>& col) {
  const int pad = k / 2;
  const int64_t cols = static_cast<int64_t>(h) * w;
  col.assign(static_cast<size_t>(cin) * k * k * cols, 0.0f);
  for (int c = 0; c < cin; ++c) {
    const float* plane = x + static_cast<int64_t>(c) * h * w;
    for (int dy = 0; dy < k; ++dy) {
      for (int dx = 0; dx < k; ++dx) {
        float* row = col.data() + ((static_cast<int64_t>(c) * k + dy) * k + dx) * cols;
        const int sy = dy - pad, sx = dx - pad;
        const int y0 = std::max(0, -sy), y1 = std::min(h, h - sy);
        const int x0 = std::max(0, -sx), x1 = std::min(w, w - sx);
        if (x1 <= x0) continue;
        for (int y = y0; y < y1; ++y)
          std::memcpy(row + static_cast<int64_t>(y) * w + x0,
                      plane + static_cast<int64_t>(y + sy) * w + (x0 + sx),
                      static_cast<size_t>(x1 - x0) * sizeof(float));
      }
    }
  }
}

// Scatter-add of a col-shaped gradient back onto the input plane.
void col2im2d(const std::vector<float>& colg, int cin, int h, int w, int k, float* gx) {
  const int pad = k / 2;
  const int64_t cols = static_cast<int64_t>(h) * w;
  for (int c = 0; c < cin; ++c) {
    float* plane = gx + static_cast<int64_t>(c) * h * w;
    for (int dy = 0; dy < k; ++dy) {
      for (int dx = 0; dx < k; ++dx) {
        const float* row = colg.data() + ((static_cast<int64_t>(c) * k + dy) * k + dx) * cols;
        const int sy = dy - pad, sx = dx - pad;
        const int y0 = std::max(0, -sy), y1 = std::min(h, h - sy);
        const int x0 = std::max(0, -sx), x1 = std::min(w, w - sx);
        for (int y = y0; y < y1; ++y) {
          float* dst = plane + static_cast<int64_t>(y + sy) * w + (x0 + sx);
          const float* src = row + static_cast<int64_t>(y) * w + x0;
          for (int i = 0; i < x1 - x0; ++i) dst[i] += src[i];
        }
      }
    }
  }
}

void im2col1d(const float* x, int cin, int len, int k, int stride, int pad, int lout,
              std::vector<float>& col) {
  col.assign(static_cast<size_t>(cin) * k * lout, 0.0f);
  for (int c = 0; c < cin; ++c) {
    const float* plane = x + static_cast<int64_t>(c) * len;
    for (int dk = 0; dk < k; ++dk) {
      float* row = col.data() + (static_cast<int64_t>(c) * k + dk) * lout;
      for (int o = 0; o < lout; ++o) {
        const int i = o * stride + dk - pad;
        if (i >= 0 && i < len) row[o] = plane[i];
      }
    }
  }
}

}  // namespace

Linear Linear::make(int in, int out, float w_std, Rng& rng) {
  Linear l;
  l.in = in;
  l.out = out;
  l.w = Tensor::randn({out, in}, rng, w_std);
  l.b = Tensor::zeros({out});
  l.gw = Tensor::zeros({out, in});
  l.gb = Tensor::zeros({out});
  return l;
}

void Linear::forward(const float* x, float* y) const {
  MapV(y, out).noalias() = MapCM(w.data(), out, in) * MapCV(x, in) + MapCV(b.data(), out);
}

void Linear::backward(const float* x, const float* gy, float* gx) {
  MapM(gw.data(), out, in).noalias() += MapCV(gy, out) * MapCV(x, in).transpose();
  MapV(gb.data(), out).noalias() += MapCV(gy, out);
  if (gx) MapV(gx, in).noalias() += MapCM(w.data(), out, in).transpose() * MapCV(gy, out);
}

void Linear::collect(const std::string& prefix, std::vector<ParamRef>& out_refs) {
  out_refs.push_back({prefix + ".w", &w, &gw});
  out_refs.push_back({prefix + ".b", &b, &gb});
}

Conv2d Conv2d::make(int cin, int cout, int k, float w_std, Rng& rng) {
  if (k % 2 == 0) raise(ErrorKind::config, "Conv2d kernel must be odd");
  Conv2d c;
  c.cin = cin;
  c.cout = cout;
  c.k = k;
  c.w = Tensor::randn({cout, cin * k * k}, rng, w_std);
  c.b = Tensor::zeros({cout});
  c.gw = Tensor::zeros({cout, cin * k * k});
  c.gb = Tensor::zeros({cout});
  return c;
}

void Conv2d::forward(const float* x, int h, int wd, float* y) const {
  const int64_t cols = static_cast<int64_t>(h) * wd;
  im2col2d(x, cin, h, wd, k, tl_col);
  MapM ym(y, cout, cols);
  ym.noalias() = MapCM(w.data(), cout, cin * k * k) * MapCM(tl_col.data(), cin * k * k, cols);
  ym.colwise() += MapCV(b.data(), cout);
}

void Conv2d::backward(const float* x, int h, int wd, const float* gy, float* gx_accum) {
  const int64_t cols = static_cast<int64_t>(h) * wd;
  im2col2d(x, cin, h, wd, k, tl_col);
  MapCM gym(gy, cout, cols);
  MapM(gw.data(), cout, cin * k * k).noalias() +=
      gym * MapCM(tl_col.data(), cin * k * k, cols).transpose();
  MapV(gb.data(), cout).noalias() += gym.rowwise().sum();
  if (gx_accum) {
    tl_colg.resize(static_cast<size_t>(cin) * k * k * cols);
    MapM(tl_colg.data(), cin * k * k, cols).noalias() =
        MapCM(w.data(), cout, cin * k * k).transpose() * gym;
    col2im2d(tl_colg, cin, h, wd, k, gx_accum);
  }
}

void Conv2d::collect(const std::string& prefix, std::vector<ParamRef>& out_refs) {
  out_refs.push_back({prefix + ".w", &w, &gw});
  out_refs.push_back({prefix + ".b", &b, &gb});
}

Conv1d Conv1d::make(int cin, int cout, int k, int stride, float w_std, Rng& rng) {
  Conv1d c;
  c.cin = cin;
  c.cout = cout;
  c.k = k;
  c.stride = stride;
  c.pad = k / 2;
  c.w = Tensor::randn({cout, cin * k}, rng, w_std);
  c.b = Tensor::zeros({cout});
  c.gw = Tensor::zeros({cout, cin * k});
  c.gb = Tensor::zeros({cout});
  return c;
}

void Conv1d::forward(const float* x, int len, float* y) const {
  const int lout = out_len(len);
  im2col1d(x, cin, len, k, stride, pad, lout, tl_col);
  MapM ym(y, cout, lout);
  ym.noalias() = MapCM(w.data(), cout, cin * k) * MapCM(tl_col.data(), cin * k, lout);
  ym.colwise() += MapCV(b.data(), cout);
}

void Conv1d::backward(const float* x, int len, const float* gy, float* gx_accum) {
  const int lout = out_len(len);
  im2col1d(x, cin, len, k, stride, pad, lout, tl_col);
  MapCM gym(gy, cout, lout);
  MapM(gw.data(), cout, cin * k).noalias() += gym * MapCM(tl_col.data(), cin * k, lout).transpose();
  MapV(gb.data(), cout).noalias() += gym.rowwise().sum();
  if (gx_accum) {
    tl_colg.resize(static_cast<size_t>(cin) * k * lout);
    MapM(tl_colg.data(), cin * k, lout).noalias() =
        MapCM(w.data(), cout, cin * k).transpose() * gym;
    for (int c = 0; c < cin; ++c) {
      float* plane = gx_accum + static_cast<int64_t>(c) * len;
      for (int dk = 0; dk < k; ++dk) {
        const float* row = tl_colg.data() + (static_cast<int64_t>(c) * k + dk) * lout;
        for (int o = 0; o < lout; ++o) {
          const int i = o * stride + dk - pad;
          if (i >= 0 && i < len) plane[i] += row[o];
        }
      }
    }
  }
}

void Conv1d::collect(const std::string& prefix, std::vector<ParamRef>& out_refs) {
  out_refs.push_back({prefix + ".w", &w, &gw});
  out_refs.push_back({prefix + ".b", &b, &gb});
}

DenseBlock2d DenseBlock2d::make(int cin, int cout, int width, int layers, int k, float final_std,
                                Rng& rng) {
  if (layers < 1) raise(ErrorKind::config, "DenseBlock2d needs at least one layer");
  DenseBlock2d d;
  d.cin = cin;
  d.cout = cout;
  d.width = width;
  d.layers = layers;
  d.k = k;
  d.convs.reserve(static_cast<size_t>(layers));
  for (int i = 0; i < layers; ++i) {
    const int ci = cin + i * width;
    const int co = (i == layers - 1) ? cout : width;
    const float std = (i == layers - 1)
                          ? final_std
                          : std::sqrt(2.0f / (static_cast<float>(ci) * k * k));
    d.convs.push_back(Conv2d::make(ci, co, k, std, rng));
  }
  return d;
}

void DenseBlock2d::forward(const Tensor& x, Tensor& y, Ctx* ctx) const {
  const int h = static_cast<int>(x.dim(1)), w = static_cast<int>(x.dim(2));
  const int64_t plane = static_cast<int64_t>(h) * w;
  Tensor local;
  Tensor& feats = ctx ? ctx->feats : local;
  feats = Tensor({cin + (layers - 1) * width, h, w});
  std::memcpy(feats.data(), x.data(), static_cast<size_t>(cin) * plane * sizeof(float));
  if (ctx) {
    ctx->h = h;
    ctx->w = w;
  }

  for (int i = 0; i < layers - 1; ++i) {
    float* hid = feats.data() + (static_cast<int64_t>(cin) + static_cast<int64_t>(i) * width) * plane;
    convs[static_cast<size_t>(i)].forward(feats.data(), h, w, hid);
    const int64_t n = static_cast<int64_t>(width) * plane;
    for (int64_t j = 0; j < n; ++j) hid[j] = leaky_relu(hid[j]);
  }
  if (y.shape() != std::vector<int64_t>{cout, h, w}) y = Tensor({cout, h, w});
  convs.back().forward(feats.data(), h, w, y.data());
}

void DenseBlock2d::backward(const Ctx& ctx, const Tensor& gy, Tensor& gx) {
  const int h = ctx.h, w = ctx.w;
  const int64_t plane = static_cast<int64_t>(h) * w;
  Tensor gfeats({cin + (layers - 1) * width, h, w});

  convs.back().backward(ctx.feats.data(), h, w, gy.data(), gfeats.data());
  for (int i = layers - 2; i >= 0; --i) {
    const int64_t off = (static_cast<int64_t>(cin) + static_cast<int64_t>(i) * width) * plane;
    const float* hid = ctx.feats.data() + off;
    float* ghid = gfeats.data() + off;
    const int64_t n = static_cast<int64_t>(width) * plane;
    for (int64_t j = 0; j < n; ++j) ghid[j] *= hid[j] > 0.0f ? 1.0f : 0.2f;
    convs[static_cast<size_t>(i)].backward(ctx.feats.data(), h, w, ghid, gfeats.data());
  }
  float* gxd = gx.data();
  const float* src = gfeats.data();
  const int64_t n = static_cast<int64_t>(cin) * plane;
  for (int64_t j = 0; j < n; ++j) gxd[j] += src[j];
}

void DenseBlock2d::collect(const std::string& prefix, std::vector<ParamRef>& out_refs) {
  for (size_t i = 0; i < convs.size(); ++i)
    convs[i].collect(prefix + ".conv" + std::to_string(i + 1), out_refs);
}

Adam::Adam(std::vector<ParamRef> params, AdamConfig cfg) : params_(std::move(params)), cfg_(cfg) {
  m_.reserve(params_.size());
  v_.reserve(params_.size());
  for (const auto& p : params_) {
    m_.emplace_back(static_cast<size_t>(p.value->size()), 0.0f);
    v_.emplace_back(static_cast<size_t>(p.value->size()), 0.0f);
  }
}

void Adam::zero_grad() {
  for (auto& p : params_) p.grad->zero();
}

double Adam::grad_norm() const {
  double acc = 0.0;
  for (const auto& p : params_) acc += p.grad->sum_sq();
  return std::sqrt(acc);
}

double Adam::clip_grad_norm(double max_norm) {
  const double norm = grad_norm();
  if (norm > max_norm && norm > 0.0) {
    const float s = static_cast<float>(max_norm / norm);
    for (auto& p : params_) p.grad->scale_(s);
  }
  return norm;
}

void Adam::step(double lr) {
  ++t_;
  const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
  const float b1 = static_cast<float>(cfg_.beta1), b2 = static_cast<float>(cfg_.beta2);
  for (size_t i = 0; i < params_.size(); ++i) {
    float* w = params_[i].value->data();
    const float* g = params_[i].grad->data();
    float* m = m_[i].data();
    float* v = v_[i].data();
    const int64_t n = params_[i].value->size();
    for (int64_t j = 0; j < n; ++j) {
      m[j] = b1 * m[j] + (1.0f - b1) * g[j];
      v[j] = b2 * v[j] + (1.0f - b2) * g[j] * g[j];
      const double mhat = m[j] / bc1;
      const double vhat = v[j] / bc2;
      w[j] -= static_cast<float>(lr * mhat / (std::sqrt(vhat) + cfg_.eps));
    }
  }
}

void Adam::save_state(std::ostream& os) const {
  const uint64_t n = params_.size();
  const int64_t t = t_;
  os.write("AWMOPT01", 8);
  os.write(reinterpret_cast<const char*>(&t), sizeof t);
  os.write(reinterpret_cast<const char*>(&n), sizeof n);
  for (size_t i = 0; i < params_.size(); ++i) {
    const uint64_t sz = m_[i].size();
    os.write(reinterpret_cast<const char*>(&sz), sizeof sz);
    os.write(reinterpret_cast<const char*>(m_[i].data()), static_cast<std::streamsize>(sz * 4));
    os.write(reinterpret_cast<const char*>(v_[i].data()), static_cast<std::streamsize>(sz * 4));
  }
}

void Adam::load_state(std::istream& is) {
  char magic[8];
  is.read(magic, 8);
  if (!is || std::memcmp(magic, "AWMOPT01", 8) != 0)
    raise(ErrorKind::io, "bad optimizer state header");
  uint64_t n = 0;
  is.read(reinterpret_cast<char*>(&t_), sizeof t_);
  is.read(reinterpret_cast<char*>(&n), sizeof n);
  if (n != params_.size()) raise(ErrorKind::config, "optimizer state does not match model");
  for (size_t i = 0; i < params_.size(); ++i) {
    uint64_t sz = 0;
    is.read(reinterpret_cast<char*>(&sz), sizeof sz);
    if (sz != m_[i].size()) raise(ErrorKind::config, "optimizer state tensor size mismatch");
    is.read(reinterpret_cast<char*>(m_[i].data()), static_cast<std::streamsize>(sz * 4));
    is.read(reinterpret_cast<char*>(v_[i].data()), static_cast<std::streamsize>(sz * 4));
  }
  if (!is) raise(ErrorKind::io, "truncated optimizer state");
}

void zero_grads(const std::vector<ParamRef>& params) {
  for (const auto& p : params) p.grad->zero();
}

void accumulate_grads(const std::vector<ParamRef>& dst, const std::vector<ParamRef>& src) {
  if (dst.size() != src.size()) raise(ErrorKind::config, "accumulate_grads: registry mismatch");
  for (size_t i = 0; i < dst.size(); ++i) dst[i].grad->add_(*src[i].grad);
}

void copy_values(const std::vector<ParamRef>& dst, const std::vector<ParamRef>& src) {
  if (dst.size() != src.size()) raise(ErrorKind::config, "copy_values: registry mismatch");
  for (size_t i = 0; i < dst.size(); ++i) {
    if (!dst[i].value->same_shape(*src[i].value))
      raise(ErrorKind::config, "copy_values: shape mismatch at " + dst[i].name);
    std::memcpy(dst[i].value->data(), src[i].value->data(),
                static_cast<size_t>(src[i].value->size()) * sizeof(float));
  }
}

}  // namespace awm::nn
