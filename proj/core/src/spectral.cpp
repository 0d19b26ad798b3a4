// Copyright 2026 The awmark Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "awm/spectral.hpp"

#include <Eigen/Dense>

#include <cmath>

namespace awm {

namespace {

using MatRM = Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MapM = Eigen::Map<MatRM>;
using MapCM = Eigen::Map<const MatRM>;

constexpr float kMagFloor = 1e-8f;

// Reflection (no edge repeat): maps a padded index offset to a source index.
inline int64_t reflect_index(int64_t i, int64_t n) {
  while (i < 0 || i >= n) {
    if (i < 0) i = -i;
    if (i >= n) i = 2 * (n - 1) - i;
  }
  return i;
}

}  // namespace

const char* to_string(ChannelSemantics s) {
  return s == ChannelSemantics::magnitude_phase ? "magnitude_phase" : "real_imag";
}

ChannelSemantics channel_semantics_from_string(const std::string& s) {
  if (s == "magnitude_phase") return ChannelSemantics::magnitude_phase;
  if (s == "real_imag") return ChannelSemantics::real_imag;
  raise(ErrorKind::config, "unknown channel semantics '" + s + "'");
}

SpectralTransform::SpectralTransform(SpectralConfig cfg) : cfg_(cfg) {
  if (cfg_.win_length <= 0 || cfg_.win_length % 2 != 0)
    raise(ErrorKind::config, "win_length must be positive and even");
  if (cfg_.hop <= 0 || cfg_.hop > cfg_.win_length)
    raise(ErrorKind::config, "hop must be in (0, win_length]");
  const int w = cfg_.win_length;
  bins_ = w / 2 + 1;

  window_.resize(static_cast<size_t>(w));
  for (int n = 0; n < w; ++n)
    window_[static_cast<size_t>(n)] =
        static_cast<float>(0.54 - 0.46 * std::cos(2.0 * M_PI * n / w));

  fwd_cos_.resize(static_cast<size_t>(bins_) * w);
  fwd_sin_.resize(static_cast<size_t>(bins_) * w);
  inv_cos_.resize(static_cast<size_t>(w) * bins_);
  inv_sin_.resize(static_cast<size_t>(w) * bins_);
  for (int k = 0; k < bins_; ++k) {
    const double ck = (k == 0 || k == w / 2) ? 1.0 : 2.0;
    for (int n = 0; n < w; ++n) {
      const double a = 2.0 * M_PI * k * n / w;
      fwd_cos_[static_cast<size_t>(k) * w + n] = static_cast<float>(window_[n] * std::cos(a));
      fwd_sin_[static_cast<size_t>(k) * w + n] = static_cast<float>(-window_[n] * std::sin(a));
      inv_cos_[static_cast<size_t>(n) * bins_ + k] = static_cast<float>(ck / w * std::cos(a));
      inv_sin_[static_cast<size_t>(n) * bins_ + k] = static_cast<float>(-ck / w * std::sin(a));
    }
  }
}

int SpectralTransform::frames(int num_samples) const {
  if (num_samples <= 0 || num_samples % cfg_.hop != 0)
    raise(ErrorKind::shape, "signal length " + std::to_string(num_samples) +
                                " is not a positive multiple of hop " + std::to_string(cfg_.hop));
  return num_samples / cfg_.hop + 1;
}

Tensor SpectralTransform::stft(std::span<const float> x, StftCtx* ctx) const {
  const int64_t n = static_cast<int64_t>(x.size());
  const int t_frames = frames(static_cast<int>(n));
  const int w = cfg_.win_length, pad = w / 2;

  // gather centered frames through reflection padding
  MatRM fm(w, t_frames);
  for (int t = 0; t < t_frames; ++t) {
    const int64_t start = static_cast<int64_t>(t) * cfg_.hop - pad;
    for (int j = 0; j < w; ++j)
      fm(j, t) = x[static_cast<size_t>(reflect_index(start + j, n))];
  }

  Tensor re({bins_, t_frames}), im({bins_, t_frames});
  MapM(re.data(), bins_, t_frames).noalias() = MapCM(fwd_cos_.data(), bins_, w) * fm;
  MapM(im.data(), bins_, t_frames).noalias() = MapCM(fwd_sin_.data(), bins_, w) * fm;

  Tensor out({2, bins_, t_frames});
  const int64_t plane = static_cast<int64_t>(bins_) * t_frames;
  if (cfg_.semantics == ChannelSemantics::real_imag) {
    std::copy(re.data(), re.data() + plane, out.data());
    std::copy(im.data(), im.data() + plane, out.data() + plane);
  } else {
    Tensor mag({bins_, t_frames});
    for (int64_t i = 0; i < plane; ++i) {
      const float r = re[i], q = im[i];
      mag[i] = std::sqrt(r * r + q * q);
      out[i] = mag[i];
      out[plane + i] = std::atan2(q, r);
    }
    if (ctx) ctx->mag = std::move(mag);
  }
  if (ctx) {
    ctx->length = static_cast<int>(n);
    ctx->re = std::move(re);
    ctx->im = std::move(im);
  }
  return out;
}

std::vector<float> SpectralTransform::stft_backward(const Tensor& grad,
                                                    const StftCtx& ctx) const {
  const int t_frames = frames(ctx.length);
  grad.require_shape({2, bins_, t_frames}, "stft_backward");
  const int64_t plane = static_cast<int64_t>(bins_) * t_frames;
  const int w = cfg_.win_length, pad = w / 2;

  Tensor g_re({bins_, t_frames}), g_im({bins_, t_frames});
  if (cfg_.semantics == ChannelSemantics::real_imag) {
    std::copy(grad.data(), grad.data() + plane, g_re.data());
    std::copy(grad.data() + plane, grad.data() + 2 * plane, g_im.data());
  } else {
    for (int64_t i = 0; i < plane; ++i) {
      const float r = ctx.re[i], q = ctx.im[i];
      const float m = std::max(ctx.mag[i], kMagFloor);
      const float m2 = m * m;
      const float gm = grad[i], gp = grad[plane + i];
      g_re[i] = gm * r / m - gp * q / m2;
      g_im[i] = gm * q / m + gp * r / m2;
    }
  }

  MatRM gf(w, t_frames);
  MapM gfm(gf.data(), w, t_frames);
  gfm.noalias() = MapCM(fwd_cos_.data(), bins_, w).transpose() * MapM(g_re.data(), bins_, t_frames);
  gfm.noalias() += MapCM(fwd_sin_.data(), bins_, w).transpose() * MapM(g_im.data(), bins_, t_frames);

  std::vector<float> gx(static_cast<size_t>(ctx.length), 0.0f);
  for (int t = 0; t < t_frames; ++t) {
    const int64_t start = static_cast<int64_t>(t) * cfg_.hop - pad;
    for (int j = 0; j < w; ++j)
      gx[static_cast<size_t>(reflect_index(start + j, ctx.length))] += gf(j, t);
  }
  return gx;
}

std::vector<float> SpectralTransform::istft(const Tensor& spec, int length, IstftCtx* ctx) const {
  const int t_frames = frames(length);
  spec.require_shape({2, bins_, t_frames}, "istft");
  const int64_t plane = static_cast<int64_t>(bins_) * t_frames;
  const int w = cfg_.win_length, pad = w / 2;

  Tensor re({bins_, t_frames}), im({bins_, t_frames});
  if (cfg_.semantics == ChannelSemantics::real_imag) {
    std::copy(spec.data(), spec.data() + plane, re.data());
    std::copy(spec.data() + plane, spec.data() + 2 * plane, im.data());
  } else {
    for (int64_t i = 0; i < plane; ++i) {
      const float m = spec[i], p = spec[plane + i];
      re[i] = m * std::cos(p);
      im[i] = m * std::sin(p);
    }
  }

  MatRM y(w, t_frames);
  MapM ym(y.data(), w, t_frames);
  ym.noalias() = MapCM(inv_cos_.data(), w, bins_) * MapM(re.data(), bins_, t_frames);
  ym.noalias() += MapCM(inv_sin_.data(), w, bins_) * MapM(im.data(), bins_, t_frames);

  const int64_t padded = static_cast<int64_t>(length) + 2 * pad;
  std::vector<float> acc(static_cast<size_t>(padded), 0.0f);
  std::vector<float> den(static_cast<size_t>(padded), 0.0f);
  for (int t = 0; t < t_frames; ++t) {
    const int64_t start = static_cast<int64_t>(t) * cfg_.hop;
    for (int j = 0; j < w; ++j) {
      acc[static_cast<size_t>(start + j)] += window_[static_cast<size_t>(j)] * y(j, t);
      den[static_cast<size_t>(start + j)] += window_[static_cast<size_t>(j)] * window_[static_cast<size_t>(j)];
    }
  }

  std::vector<float> out(static_cast<size_t>(length));
  for (int64_t i = 0; i < length; ++i)
    out[static_cast<size_t>(i)] = acc[static_cast<size_t>(i + pad)] / den[static_cast<size_t>(i + pad)];

  if (ctx) {
    ctx->length = length;
    ctx->spec = spec;
    ctx->den = std::move(den);
  }
  return out;
}

Tensor SpectralTransform::istft_backward(std::span<const float> grad, const IstftCtx& ctx) const {
  const int t_frames = frames(ctx.length);
  if (static_cast<int64_t>(grad.size()) != ctx.length)
    raise(ErrorKind::shape, "istft_backward: gradient length mismatch");
  const int64_t plane = static_cast<int64_t>(bins_) * t_frames;
  const int w = cfg_.win_length, pad = w / 2;

  const int64_t padded = static_cast<int64_t>(ctx.length) + 2 * pad;
  std::vector<float> gacc(static_cast<size_t>(padded), 0.0f);
  for (int64_t i = 0; i < ctx.length; ++i)
    gacc[static_cast<size_t>(i + pad)] = grad[static_cast<size_t>(i)] / ctx.den[static_cast<size_t>(i + pad)];

  MatRM gy(w, t_frames);
  for (int t = 0; t < t_frames; ++t) {
    const int64_t start = static_cast<int64_t>(t) * cfg_.hop;
    for (int j = 0; j < w; ++j)
      gy(j, t) = window_[static_cast<size_t>(j)] * gacc[static_cast<size_t>(start + j)];
  }

  Tensor g_re({bins_, t_frames}), g_im({bins_, t_frames});
  MapM(g_re.data(), bins_, t_frames).noalias() =
      MapCM(inv_cos_.data(), w, bins_).transpose() * MapM(gy.data(), w, t_frames);
  MapM(g_im.data(), bins_, t_frames).noalias() =
      MapCM(inv_sin_.data(), w, bins_).transpose() * MapM(gy.data(), w, t_frames);

  Tensor out({2, bins_, t_frames});
  if (cfg_.semantics == ChannelSemantics::real_imag) {
    std::copy(g_re.data(), g_re.data() + plane, out.data());
    std::copy(g_im.data(), g_im.data() + plane, out.data() + plane);
  } else {
    for (int64_t i = 0; i < plane; ++i) {
      const float m = ctx.spec[i], p = ctx.spec[plane + i];
      const float c = std::cos(p), s = std::sin(p);
      out[i] = g_re[i] * c + g_im[i] * s;
      out[plane + i] = m * (-g_re[i] * s + g_im[i] * c);
    }
  }
  return out;
}

}  // namespace awm
