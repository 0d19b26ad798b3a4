// Copyright 2026 The awmark Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "awm/tensor.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

namespace awm {

namespace {
int64_t shape_size(const std::vector<int64_t>& shape) {
  int64_t n = 1;
  for (int64_t d : shape) {
    if (d < 0) raise(ErrorKind::shape, "negative tensor dimension");
    n *= d;
  }
  return n;
}

std::string shape_str(const std::vector<int64_t>& shape) {
  std::ostringstream os;
  os << "(";
  for (size_t i = 0; i < shape.size(); ++i) os << (i ? "," : "") << shape[i];
  os << ")";
  return os.str();
}
}  // namespace

Tensor::Tensor(std::vector<int64_t> shape)
    : shape_(std::move(shape)), v_(static_cast<size_t>(shape_size(shape_)), 0.0f) {}

Tensor Tensor::zeros(std::vector<int64_t> shape) { return Tensor(std::move(shape)); }

Tensor Tensor::randn(std::vector<int64_t> shape, Rng& rng, float stddev) {
  Tensor t(std::move(shape));
  rng.fill_normal(t.data(), t.size(), stddev);
  return t;
}

void Tensor::require_shape(const std::vector<int64_t>& shape, const char* what) const {
  if (shape_ != shape)
    raise(ErrorKind::shape, std::string(what) + ": expected shape " + shape_str(shape) +
                                ", got " + shape_str(shape_));
}

void Tensor::fill(float value) { std::fill(v_.begin(), v_.end(), value); }

void Tensor::add_(const Tensor& o) {
  if (!same_shape(o)) raise(ErrorKind::shape, "add_: shape mismatch");
  const float* src = o.data();
  float* dst = v_.data();
  for (size_t i = 0; i < v_.size(); ++i) dst[i] += src[i];
}

void Tensor::axpy_(float a, const Tensor& o) {
  if (!same_shape(o)) raise(ErrorKind::shape, "axpy_: shape mismatch");
  const float* src = o.data();
  float* dst = v_.data();
  for (size_t i = 0; i < v_.size(); ++i) dst[i] += a * src[i];
}

void Tensor::scale_(float a) {
  for (auto& x : v_) x *= a;
}

double Tensor::sum_sq() const {
  double acc = 0.0;
  for (float x : v_) acc += static_cast<double>(x) * x;
  return acc;
}

float Tensor::max_abs() const {
  float m = 0.0f;
  for (float x : v_) m = std::max(m, std::fabs(x));
  return m;
}

bool Tensor::all_finite() const {
  for (float x : v_)
    if (!std::isfinite(x)) return false;
  return true;
}

}  // namespace awm
