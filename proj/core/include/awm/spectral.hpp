// Copyright 2026 The awmark Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef AWM_SPECTRAL_HPP
#define AWM_SPECTRAL_HPP

#include <span>
#include <vector>

#include "awm/tensor.hpp"

namespace awm {

// How the two spectrogram channels are interpreted.
enum class ChannelSemantics { magnitude_phase, real_imag };

const char* to_string(ChannelSemantics s);
ChannelSemantics channel_semantics_from_string(const std::string& s);

struct SpectralConfig {
  int win_length = 1000;  // Hamming window and FFT size
  int hop = 400;
  ChannelSemantics semantics = ChannelSemantics::magnitude_phase;
};

// Bidirectional STFT with analytic gradients for both directions.
//
// Frames are centered (reflection padding of win/2 on both sides), so a
// signal of N samples (N a multiple of hop) yields N/hop + 1 frames and
// win/2 + 1 bins; the inverse uses window-squared normalized overlap-add
// and is an exact inverse on STFT outputs.
class SpectralTransform {
 public:
  explicit SpectralTransform(SpectralConfig cfg);

  const SpectralConfig& config() const { return cfg_; }
  int bins() const { return bins_; }
  int frames(int num_samples) const;

  struct StftCtx {
    int length = 0;
    Tensor re, im;  // (F, T)
    Tensor mag;     // magnitude_phase only
  };
  struct IstftCtx {
    int length = 0;
    Tensor spec;             // input copy (2, F, T)
    std::vector<float> den;  // overlap-add normalizer over the padded domain
  };

  Tensor stft(std::span<const float> x) const { return stft(x, nullptr); }
  Tensor stft(std::span<const float> x, StftCtx* ctx) const;
  std::vector<float> stft_backward(const Tensor& grad, const StftCtx& ctx) const;

  std::vector<float> istft(const Tensor& spec, int length) const {
    return istft(spec, length, nullptr);
  }
  std::vector<float> istft(const Tensor& spec, int length, IstftCtx* ctx) const;
  Tensor istft_backward(std::span<const float> grad, const IstftCtx& ctx) const;

 private:
  SpectralConfig cfg_;
  int bins_ = 0;
  std::vector<float> window_;
  std::vector<float> fwd_cos_, fwd_sin_;  // (bins, win), window folded in
  std::vector<float> inv_cos_, inv_sin_;  // (win, bins), 1/win and bin weights folded in
};

}  // namespace awm

#endif  // AWM_SPECTRAL_HPP
