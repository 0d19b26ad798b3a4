// Copyright 2026 The awmark Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef AWM_AUDIO_IO_HPP
#define AWM_AUDIO_IO_HPP

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "awm/common.hpp"

namespace awm {

inline constexpr int kReferenceSampleRate = 16000;
inline constexpr double kSilenceRmsThreshold = 1e-4;

// Mono audio, nominal amplitude range [-1, 1].
struct Waveform {
  std::vector<float> samples;
  int sample_rate = kReferenceSampleRate;

  int64_t size() const { return static_cast<int64_t>(samples.size()); }
  double duration_s() const { return static_cast<double>(samples.size()) / sample_rate; }
};

// Decoded audio file before mono reduction.
struct AudioFile {
  std::vector<float> interleaved;
  int channels = 0;
  int sample_rate = 0;
  int64_t frames() const {
    return channels ? static_cast<int64_t>(interleaved.size()) / channels : 0;
  }
};

enum class WavEncoding { pcm8, pcm16, pcm24, float32 };

// Reads a PCM WAV file (8/16/24-bit integer or 32-bit float).
AudioFile read_audio_file(const std::filesystem::path& path);

// Writes a mono 16-bit PCM WAV. Samples are clamped to [-1, 1] first.
void write_wav(const Waveform& w, const std::filesystem::path& path);

// Low-level writer used by tests and tools to produce specific encodings.
void write_wav_raw(const std::filesystem::path& path, std::span<const float> interleaved,
                   int channels, int sample_rate, WavEncoding enc);

// Windowed-sinc (polyphase-quality) sample rate conversion. Output length is
// round(n * to_rate / from_rate). Identity when the rates match.
std::vector<float> resample(std::span<const float> x, int from_rate, int to_rate);

// Load, average channels to mono, resample to target_rate, clamp to [-1, 1].
Waveform ingest(const std::filesystem::path& path, int target_rate = kReferenceSampleRate);

double rms(std::span<const float> x);

struct SegmentBatch {
  std::vector<std::vector<float>> items;
  int eul_samples = 0;
  int window_samples = 0;
};

// Cuts non-overlapping training windows of eul_samples*(1+shift_headroom)
// samples; windows below the silence RMS threshold are dropped.
SegmentBatch chunk_for_training(const Waveform& w, int eul_samples, double shift_headroom,
                                double silence_rms = kSilenceRmsThreshold);

struct ManifestEntry {
  std::string path;   // resolved against the manifest's directory
  std::string split;  // optional: train / valid / test ("" when untagged)
};

// Newline-delimited corpus manifest: "path" or "path <split>".
std::vector<ManifestEntry> read_manifest(const std::filesystem::path& manifest_path);

// In-memory pool of training windows drawn from a corpus manifest.
class SegmentDataset {
 public:
  struct Options {
    int eul_samples = 16000;
    double shift_headroom = 0.1;
    double silence_rms = kSilenceRmsThreshold;
    int64_t max_windows = 8192;
    int target_rate = kReferenceSampleRate;
    std::string split_filter;  // empty = accept all entries
    uint64_t seed = 1;         // file-order shuffling
  };

  static SegmentDataset load(const std::filesystem::path& manifest, const Options& opt);

  int64_t size() const { return static_cast<int64_t>(windows_.size()); }
  const std::vector<float>& window(int64_t i) const { return windows_[static_cast<size_t>(i)]; }
  int window_samples() const { return window_samples_; }
  int eul_samples() const { return eul_samples_; }

 private:
  std::vector<std::vector<float>> windows_;
  int window_samples_ = 0;
  int eul_samples_ = 0;
};

}  // namespace awm

#endif  // AWM_AUDIO_IO_HPP
