// Copyright 2026 The awmark Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "awm/audio_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>

namespace awm {

namespace {

constexpr uint16_t kFormatPcm = 1;
constexpr uint16_t kFormatFloat = 3;
constexpr uint16_t kFormatExtensible = 0xFFFE;

uint32_t read_u32(const uint8_t* p) {
  return static_cast<uint32_t>(p[0]) | (static_cast<uint32_t>(p[1]) << 8) |
         (static_cast<uint32_t>(p[2]) << 16) | (static_cast<uint32_t>(p[3]) << 24);
}
uint16_t read_u16(const uint8_t* p) {
  return static_cast<uint16_t>(p[0] | (p[1] << 8));
}

void put_u32(std::vector<uint8_t>& out, uint32_t v) {
  out.push_back(v & 0xff);
  out.push_back((v >> 8) & 0xff);
  out.push_back((v >> 16) & 0xff);
  out.push_back((v >> 24) & 0xff);
}
void put_u16(std::vector<uint8_t>& out, uint16_t v) {
  out.push_back(v & 0xff);
  out.push_back((v >> 8) & 0xff);
}

float clamp1(float x) { return std::clamp(x, -1.0f, 1.0f); }

}  // namespace

AudioFile read_audio_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(ErrorKind::io, "cannot open " + path.string());
  std::vector<uint8_t> buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (buf.size() < 44 || std::memcmp(buf.data(), "RIFF", 4) != 0 ||
      std::memcmp(buf.data() + 8, "WAVE", 4) != 0)
    raise(ErrorKind::io, path.string() + ": not a RIFF/WAVE file");

  uint16_t format = 0, channels = 0, bits = 0;
  uint32_t rate = 0;
  const uint8_t* data = nullptr;
  size_t data_len = 0;

  size_t pos = 12;
  while (pos + 8 <= buf.size()) {
    const char* id = reinterpret_cast<const char*>(buf.data() + pos);
    const uint32_t len = read_u32(buf.data() + pos + 4);
    const size_t body = pos + 8;
    if (body + len > buf.size()) raise(ErrorKind::io, path.string() + ": truncated chunk");
    if (std::memcmp(id, "fmt ", 4) == 0) {
      if (len < 16) raise(ErrorKind::io, path.string() + ": short fmt chunk");
      format = read_u16(buf.data() + body);
      channels = read_u16(buf.data() + body + 2);
      rate = read_u32(buf.data() + body + 4);
      bits = read_u16(buf.data() + body + 14);
      if (format == kFormatExtensible && len >= 40)
        format = read_u16(buf.data() + body + 24);  // first word of SubFormat GUID
    } else if (std::memcmp(id, "data", 4) == 0) {
      data = buf.data() + body;
      data_len = len;
    }
    pos = body + len + (len & 1);  // chunks are word-aligned
  }

  if (!channels || !rate) raise(ErrorKind::io, path.string() + ": missing fmt chunk");
  if (!data) raise(ErrorKind::io, path.string() + ": missing data chunk");

  const int bytes = bits / 8;
  if (bytes == 0 || data_len % (static_cast<size_t>(bytes) * channels) != 0)
    data_len -= data_len % (static_cast<size_t>(bytes) * channels);
  const int64_t count = static_cast<int64_t>(data_len) / bytes;

  AudioFile f;
  f.channels = channels;
  f.sample_rate = static_cast<int>(rate);
  f.interleaved.resize(static_cast<size_t>(count));

  if (format == kFormatPcm && bits == 8) {
    for (int64_t i = 0; i < count; ++i)
      f.interleaved[i] = (static_cast<int>(data[i]) - 128) / 128.0f;
  } else if (format == kFormatPcm && bits == 16) {
    for (int64_t i = 0; i < count; ++i) {
      int16_t v;
      std::memcpy(&v, data + 2 * i, 2);
      f.interleaved[i] = clamp1(v / 32767.0f);
    }
  } else if (format == kFormatPcm && bits == 24) {
    for (int64_t i = 0; i < count; ++i) {
      const uint8_t* p = data + 3 * i;
      int32_t v = (p[0] << 8) | (p[1] << 16) | (static_cast<int32_t>(p[2]) << 24);
      v >>= 8;
      f.interleaved[i] = clamp1(v / 8388607.0f);
    }
  } else if (format == kFormatPcm && bits == 32) {
    for (int64_t i = 0; i < count; ++i) {
      int32_t v;
      std::memcpy(&v, data + 4 * i, 4);
      f.interleaved[i] = clamp1(static_cast<float>(v / 2147483647.0));
    }
  } else if (format == kFormatFloat && bits == 32) {
    for (int64_t i = 0; i < count; ++i) {
      float v;
      std::memcpy(&v, data + 4 * i, 4);
      f.interleaved[i] = v;
    }
  } else {
    raise(ErrorKind::io, path.string() + ": unsupported WAV encoding (format " +
                             std::to_string(format) + ", " + std::to_string(bits) + " bit)");
  }
  return f;
}

void write_wav_raw(const std::filesystem::path& path, std::span<const float> interleaved,
                   int channels, int sample_rate, WavEncoding enc) {
  if (channels <= 0) raise(ErrorKind::validation, "write_wav_raw: channels must be positive");
  int bytes = 2;
  uint16_t format = kFormatPcm, bits = 16;
  switch (enc) {
    case WavEncoding::pcm8: bytes = 1; bits = 8; break;
    case WavEncoding::pcm16: bytes = 2; bits = 16; break;
    case WavEncoding::pcm24: bytes = 3; bits = 24; break;
    case WavEncoding::float32: bytes = 4; bits = 32; format = kFormatFloat; break;
  }
  const uint32_t data_len = static_cast<uint32_t>(interleaved.size() * bytes);

  std::vector<uint8_t> out;
  out.reserve(44 + data_len);
  out.insert(out.end(), {'R', 'I', 'F', 'F'});
  put_u32(out, 36 + data_len);
  out.insert(out.end(), {'W', 'A', 'V', 'E', 'f', 'm', 't', ' '});
  put_u32(out, 16);
  put_u16(out, format);
  put_u16(out, static_cast<uint16_t>(channels));
  put_u32(out, static_cast<uint32_t>(sample_rate));
  put_u32(out, static_cast<uint32_t>(sample_rate * channels * bytes));
  put_u16(out, static_cast<uint16_t>(channels * bytes));
  put_u16(out, bits);
  out.insert(out.end(), {'d', 'a', 't', 'a'});
  put_u32(out, data_len);

  for (float x : interleaved) {
    const float c = clamp1(x);
    switch (enc) {
      case WavEncoding::pcm8:
        out.push_back(static_cast<uint8_t>(std::lrint(c * 127.0f) + 128));
        break;
      case WavEncoding::pcm16: {
        const int16_t v = static_cast<int16_t>(std::lrint(c * 32767.0f));
        out.push_back(v & 0xff);
        out.push_back((v >> 8) & 0xff);
        break;
      }
      case WavEncoding::pcm24: {
        const int32_t v = static_cast<int32_t>(std::lrint(c * 8388607.0f));
        out.push_back(v & 0xff);
        out.push_back((v >> 8) & 0xff);
        out.push_back((v >> 16) & 0xff);
        break;
      }
      case WavEncoding::float32: {
        uint32_t v;
        std::memcpy(&v, &c, 4);
        put_u32(out, v);
        break;
      }
    }
  }

  std::ofstream os(path, std::ios::binary);
  if (!os) raise(ErrorKind::io, "cannot open " + path.string() + " for writing");
  os.write(reinterpret_cast<const char*>(out.data()), static_cast<std::streamsize>(out.size()));
  if (!os) raise(ErrorKind::io, "short write to " + path.string());
}

void write_wav(const Waveform& w, const std::filesystem::path& path) {
  if (w.samples.empty()) raise(ErrorKind::validation, "refusing to write empty waveform");
  write_wav_raw(path, w.samples, 1, w.sample_rate, WavEncoding::pcm16);
}

std::vector<float> resample(std::span<const float> x, int from_rate, int to_rate) {
  if (from_rate <= 0 || to_rate <= 0)
    raise(ErrorKind::validation, "resample: rates must be positive");
  if (from_rate == to_rate) return std::vector<float>(x.begin(), x.end());
  const int64_t n = static_cast<int64_t>(x.size());
  const double ratio = static_cast<double>(to_rate) / from_rate;
  const int64_t out_n = static_cast<int64_t>(std::llround(n * ratio));
  std::vector<float> y(static_cast<size_t>(out_n), 0.0f);
  if (n == 0) return y;

  // Blackman-windowed sinc, cutoff at the lower of the two Nyquist rates.
  const double fc = std::min(1.0, ratio);
  const double half_width = 24.0 / fc;  // in source samples
  for (int64_t j = 0; j < out_n; ++j) {
    const double p = j / ratio;
    const int64_t lo = std::max<int64_t>(0, static_cast<int64_t>(std::ceil(p - half_width)));
    const int64_t hi = std::min<int64_t>(n - 1, static_cast<int64_t>(std::floor(p + half_width)));
    double num = 0.0, den = 0.0;
    for (int64_t i = lo; i <= hi; ++i) {
      const double d = i - p;
      const double u = fc * d;
      const double s = (std::fabs(u) < 1e-12) ? 1.0 : std::sin(M_PI * u) / (M_PI * u);
      const double t = d / half_width;  // in [-1, 1]
      const double wnd = 0.42 + 0.5 * std::cos(M_PI * t) + 0.08 * std::cos(2.0 * M_PI * t);
      const double k = fc * s * wnd;
      num += k * x[static_cast<size_t>(i)];
      den += k;
    }
    y[static_cast<size_t>(j)] = den != 0.0 ? static_cast<float>(num / den) : 0.0f;
  }
  return y;
}

Waveform ingest(const std::filesystem::path& path, int target_rate) {
  const AudioFile f = read_audio_file(path);
  if (f.frames() == 0) raise(ErrorKind::validation, path.string() + ": zero-length audio");

  std::vector<float> mono(static_cast<size_t>(f.frames()));
  if (f.channels == 1) {
    mono.assign(f.interleaved.begin(), f.interleaved.end());
  } else {
    for (int64_t i = 0; i < f.frames(); ++i) {
      double acc = 0.0;
      for (int c = 0; c < f.channels; ++c)
        acc += f.interleaved[static_cast<size_t>(i * f.channels + c)];
      mono[static_cast<size_t>(i)] = static_cast<float>(acc / f.channels);
    }
  }

  Waveform w;
  w.sample_rate = target_rate;
  w.samples = (f.sample_rate == target_rate) ? std::move(mono)
                                             : resample(mono, f.sample_rate, target_rate);
  for (auto& s : w.samples) {
    if (!std::isfinite(s)) raise(ErrorKind::validation, path.string() + ": non-finite sample");
    s = clamp1(s);
  }
  if (w.samples.empty()) raise(ErrorKind::validation, path.string() + ": empty after resample");
  return w;
}

double rms(std::span<const float> x) {
  if (x.empty()) return 0.0;
  double acc = 0.0;
  for (float v : x) acc += static_cast<double>(v) * v;
  return std::sqrt(acc / static_cast<double>(x.size()));
}

SegmentBatch chunk_for_training(const Waveform& w, int eul_samples, double shift_headroom,
                                double silence_rms) {
  if (shift_headroom < 0.0 || shift_headroom > 0.5)
    raise(ErrorKind::validation, "chunk_for_training: shift_headroom must be in [0, 0.5]");
  if (eul_samples <= 0) raise(ErrorKind::validation, "chunk_for_training: bad eul_samples");

  SegmentBatch batch;
  batch.eul_samples = eul_samples;
  batch.window_samples = eul_samples + static_cast<int>(std::lround(eul_samples * shift_headroom));
  const int64_t win = batch.window_samples;
  for (int64_t start = 0; start + win <= w.size(); start += win) {
    std::span<const float> view(w.samples.data() + start, static_cast<size_t>(win));
    if (rms(view) < silence_rms) continue;
    batch.items.emplace_back(view.begin(), view.end());
  }
  return batch;
}

std::vector<ManifestEntry> read_manifest(const std::filesystem::path& manifest_path) {
  std::ifstream in(manifest_path);
  if (!in) raise(ErrorKind::io, "cannot open manifest " + manifest_path.string());
  const auto base = manifest_path.parent_path();
  std::vector<ManifestEntry> entries;
  std::string line;
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    ManifestEntry e;
    const auto ws = line.find_first_of(" \t");
    if (ws == std::string::npos) {
      e.path = line;
    } else {
      e.path = line.substr(0, ws);
      const auto rest = line.find_first_not_of(" \t", ws);
      if (rest != std::string::npos) e.split = line.substr(rest);
    }
    std::filesystem::path p(e.path);
    if (p.is_relative()) p = base / p;
    e.path = p.string();
    entries.push_back(std::move(e));
  }
  return entries;
}

SegmentDataset SegmentDataset::load(const std::filesystem::path& manifest, const Options& opt) {
  auto entries = read_manifest(manifest);
  std::erase_if(entries, [&](const ManifestEntry& e) {
    return !opt.split_filter.empty() && e.split != opt.split_filter;
  });
  if (entries.empty())
    raise(ErrorKind::config, "manifest " + manifest.string() + " has no entries" +
                                 (opt.split_filter.empty() ? "" : " for split '" + opt.split_filter + "'"));

  // Shuffle file order so a window cap still samples across the corpus.
  Rng rng = Rng::derive(opt.seed, {0xda7a5e7ULL});
  for (size_t i = entries.size(); i > 1; --i)
    std::swap(entries[i - 1], entries[static_cast<size_t>(rng.uniform_int(static_cast<int64_t>(i)))]);

  SegmentDataset ds;
  ds.eul_samples_ = opt.eul_samples;
  for (const auto& e : entries) {
    if (ds.size() >= opt.max_windows) break;
    Waveform w = ingest(e.path, opt.target_rate);
    SegmentBatch batch = chunk_for_training(w, opt.eul_samples, opt.shift_headroom, opt.silence_rms);
    ds.window_samples_ = batch.window_samples;
    for (auto& item : batch.items) {
      if (ds.size() >= opt.max_windows) break;
      ds.windows_.push_back(std::move(item));
    }
  }
  if (ds.windows_.empty())
    raise(ErrorKind::config, "no usable (non-silent) windows in " + manifest.string());
  return ds;
}

}  // namespace awm
