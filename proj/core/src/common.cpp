// Copyright 2026 The awmark Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "awm/common.hpp"

#include <cmath>
#include <cstdio>

namespace awm {

void raise(ErrorKind kind, const std::string& msg) { throw Error(kind, msg); }

void log_info(const std::string& msg) { std::fprintf(stderr, "[awmark] %s\n", msg.c_str()); }
void log_warn(const std::string& msg) { std::fprintf(stderr, "[awmark] warning: %s\n", msg.c_str()); }

namespace {

inline uint64_t splitmix64(uint64_t& x) {
  x += 0x9e3779b97f4a7c15ULL;
  uint64_t z = x;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

}  // namespace

Rng::Rng(uint64_t seed) {
  uint64_t x = seed;
  for (auto& s : s_) s = splitmix64(x);
}

Rng Rng::derive(uint64_t seed, std::initializer_list<uint64_t> path) {
  uint64_t x = seed;
  uint64_t acc = splitmix64(x);
  for (uint64_t p : path) {
    x = acc ^ (p + 0x9e3779b97f4a7c15ULL);
    acc = splitmix64(x);
  }
  return Rng(acc);
}

uint64_t Rng::next_u64() {
  const uint64_t result = rotl(s_[1] * 5, 7) * 9;
  const uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

double Rng::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

int64_t Rng::uniform_int(int64_t n) {
  // modulo bias is negligible for n << 2^64 but rejection keeps it exact
  if (n <= 0) raise(ErrorKind::validation, "uniform_int: n must be positive");
  const uint64_t un = static_cast<uint64_t>(n);
  const uint64_t limit = UINT64_MAX - UINT64_MAX % un;
  uint64_t v;
  do {
    v = next_u64();
  } while (v >= limit);
  return static_cast<int64_t>(v % un);
}

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u1 = 0.0;
  while (u1 <= 1e-300) u1 = uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double a = 2.0 * M_PI * u2;
  spare_ = r * std::sin(a);
  has_spare_ = true;
  return r * std::cos(a);
}

void Rng::fill_normal(float* dst, int64_t n, float stddev) {
  for (int64_t i = 0; i < n; ++i) dst[i] = stddev * static_cast<float>(normal());
}

Bits random_bits(Rng& rng, int n) {
  Bits out(static_cast<size_t>(n));
  for (auto& b : out) b = static_cast<uint8_t>(rng.next_u64() & 1u);
  return out;
}

Bits bits_from_hex(const std::string& hex, int nbits) {
  if (nbits < 0) raise(ErrorKind::validation, "bit length must be nonnegative");
  std::vector<uint8_t> nibbles;
  nibbles.reserve(hex.size());
  for (char c : hex) {
    int v;
    if (c >= '0' && c <= '9') v = c - '0';
    else if (c >= 'a' && c <= 'f') v = c - 'a' + 10;
    else if (c >= 'A' && c <= 'F') v = c - 'A' + 10;
    else {
      raise(ErrorKind::validation, "invalid hex digit in '" + hex + "'");
    }
    nibbles.push_back(static_cast<uint8_t>(v));
  }
  // value as a bit string, MSB first
  Bits all;
  all.reserve(nibbles.size() * 4);
  for (uint8_t nib : nibbles)
    for (int k = 3; k >= 0; --k) all.push_back((nib >> k) & 1u);
  // the value must fit in nbits
  const int64_t excess = static_cast<int64_t>(all.size()) - nbits;
  if (excess < 0) {
    Bits padded(static_cast<size_t>(nbits), 0);
    std::copy(all.begin(), all.end(), padded.begin() + static_cast<size_t>(-excess));
    return padded;
  }
  for (int64_t i = 0; i < excess; ++i) {
    if (all[static_cast<size_t>(i)] != 0)
      raise(ErrorKind::validation, "hex value '" + hex + "' does not fit in " +
                                       std::to_string(nbits) + " bits");
  }
  return Bits(all.begin() + excess, all.end());
}

std::string bits_to_hex(const Bits& bits) {
  if (bits.empty()) return "0";
  const int pad = (4 - static_cast<int>(bits.size()) % 4) % 4;
  std::string out;
  int nib = 0, count = pad;
  for (size_t i = 0; i < bits.size() + 0; ++i) {
    nib = (nib << 1) | (bits[i] & 1);
    if (++count == 4) {
      out.push_back("0123456789abcdef"[nib]);
      nib = 0;
      count = 0;
    }
  }
  return out;
}

std::string bits_to_string(const Bits& bits) {
  std::string s;
  s.reserve(bits.size());
  for (auto b : bits) s.push_back(b ? '1' : '0');
  return s;
}

uint64_t fnv1a64(const std::string& data) {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string to_hex64(uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return std::string(buf);
}

}  // namespace awm
