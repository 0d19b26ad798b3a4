// Copyright 2026 The awmark Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef AWM_NN_HPP
#define AWM_NN_HPP

#include <iosfwd>
#include <string>
#include <vector>

#include "awm/tensor.hpp"

namespace awm::nn {

struct ParamRef {
  std::string name;
  Tensor* value;
  Tensor* grad;
};

// Affine map y = W x + b. Weights are (out, in) row-major.
struct Linear {
  int in = 0, out = 0;
  Tensor w, b, gw, gb;

  static Linear make(int in, int out, float w_std, Rng& rng);
  void forward(const float* x, float* y) const;
  // Accumulates parameter grads; if gx is non-null, accumulates input grad.
  void backward(const float* x, const float* gy, float* gx);
  void collect(const std::string& prefix, std::vector<ParamRef>& out_refs);
};

// 2-D convolution, stride 1, odd kernel, same padding. Maps (cin,H,W) to
// (cout,H,W); realized as im2col + GEMM.
struct Conv2d {
  int cin = 0, cout = 0, k = 3;
  Tensor w, b, gw, gb;  // w is (cout, cin*k*k)

  static Conv2d make(int cin, int cout, int k, float w_std, Rng& rng);
  void forward(const float* x, int h, int wd, float* y) const;
  void backward(const float* x, int h, int wd, const float* gy, float* gx_accum);
  void collect(const std::string& prefix, std::vector<ParamRef>& out_refs);
};

// 1-D strided convolution for the discriminator. Maps (cin,L) to (cout,Lout).
struct Conv1d {
  int cin = 0, cout = 0, k = 0, stride = 1, pad = 0;
  Tensor w, b, gw, gb;  // w is (cout, cin*k)

  static Conv1d make(int cin, int cout, int k, int stride, float w_std, Rng& rng);
  int out_len(int len) const { return (len + 2 * pad - k) / stride + 1; }
  void forward(const float* x, int len, float* y) const;
  void backward(const float* x, int len, const float* gy, float* gx_accum);
  void collect(const std::string& prefix, std::vector<ParamRef>& out_refs);
};

inline float leaky_relu(float x, float slope = 0.2f) { return x > 0.0f ? x : slope * x; }

// Five-layer (configurable) 2-D CNN with dense connections: layer j sees the
// block input concatenated with every earlier hidden activation. Hidden
// layers use LeakyReLU(0.2); the projection layer is linear.
struct DenseBlock2d {
  int cin = 2, cout = 2, width = 32, layers = 5, k = 3;
  std::vector<Conv2d> convs;

  struct Ctx {
    Tensor feats;  // (cin + (layers-1)*width, H, W): input plane + hidden activations
    int h = 0, w = 0;
  };

  static DenseBlock2d make(int cin, int cout, int width, int layers, int k, float final_std,
                           Rng& rng);
  void forward(const Tensor& x, Tensor& y, Ctx* ctx) const;
  // gx is accumulated into (caller zeroes).
  void backward(const Ctx& ctx, const Tensor& gy, Tensor& gx);
  void collect(const std::string& prefix, std::vector<ParamRef>& out_refs);
};

struct AdamConfig {
  double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
};

class Adam {
 public:
  explicit Adam(std::vector<ParamRef> params, AdamConfig cfg = {});

  void zero_grad();
  double grad_norm() const;
  // Returns the pre-clip norm; scales grads in place when above max_norm.
  double clip_grad_norm(double max_norm);
  void step(double lr);
  int64_t steps_taken() const { return t_; }

  void save_state(std::ostream& os) const;
  void load_state(std::istream& is);

 private:
  std::vector<ParamRef> params_;
  std::vector<std::vector<float>> m_, v_;
  AdamConfig cfg_;
  int64_t t_ = 0;
};

void zero_grads(const std::vector<ParamRef>& params);
// out[i] += src[i] for parallel registries of identical models.
void accumulate_grads(const std::vector<ParamRef>& dst, const std::vector<ParamRef>& src);
void copy_values(const std::vector<ParamRef>& dst, const std::vector<ParamRef>& src);

}  // namespace awm::nn

#endif  // AWM_NN_HPP
