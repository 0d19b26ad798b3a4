// Copyright 2026 The awmark Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef AWM_TENSOR_HPP
#define AWM_TENSOR_HPP

#include <cstdint>
#include <vector>

#include "awm/common.hpp"

namespace awm {

// Dense row-major float tensor. Deliberately minimal: shape + contiguous
// storage; the layers in nn.hpp own all the interesting math.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(std::vector<int64_t> shape);

  static Tensor zeros(std::vector<int64_t> shape);
  static Tensor randn(std::vector<int64_t> shape, Rng& rng, float stddev = 1.0f);

  float* data() { return v_.data(); }
  const float* data() const { return v_.data(); }
  int64_t size() const { return static_cast<int64_t>(v_.size()); }
  int ndim() const { return static_cast<int>(shape_.size()); }
  int64_t dim(int i) const { return shape_[static_cast<size_t>(i)]; }
  const std::vector<int64_t>& shape() const { return shape_; }
  bool empty() const { return v_.empty(); }

  float& operator[](int64_t i) { return v_[static_cast<size_t>(i)]; }
  float operator[](int64_t i) const { return v_[static_cast<size_t>(i)]; }

  bool same_shape(const Tensor& o) const { return shape_ == o.shape_; }
  void require_shape(const std::vector<int64_t>& shape, const char* what) const;

  void fill(float value);
  void zero() { fill(0.0f); }
  void add_(const Tensor& o);          // this += o
  void axpy_(float a, const Tensor& o);  // this += a * o
  void scale_(float a);

  double sum_sq() const;
  float max_abs() const;
  bool all_finite() const;

 private:
  std::vector<int64_t> shape_;
  std::vector<float> v_;
};

}  // namespace awm

#endif  // AWM_TENSOR_HPP
