// Copyright 2026 The awmark Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef AWM_COMMON_HPP
#define AWM_COMMON_HPP

#include <cstdint>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <vector>

namespace awm {

// Error taxonomy shared by the library and the CLI exit-code mapping.
enum class ErrorKind {
  validation,   // bad arguments / malformed inputs
  io,           // file system and stream failures
  config,       // inconsistent configuration / manifest
  shape,        // tensor or signal dimension mismatch
  capability,   // missing optional capability (e.g. external codec)
  domain,       // operation has no valid result (e.g. nothing encodable)
  not_found,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& msg) : std::runtime_error(msg), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] void raise(ErrorKind kind, const std::string& msg);

void log_info(const std::string& msg);
void log_warn(const std::string& msg);

// Deterministic, platform-independent PRNG (xoshiro256** seeded via
// splitmix64). All randomness in the library flows through this so that
// runs are reproducible bit-for-bit across machines.
class Rng {
 public:
  explicit Rng(uint64_t seed);

  // Derives an independent stream from a seed and a path of indices,
  // e.g. Rng::derive(seed, {step, item, kPurposeTag}).
  static Rng derive(uint64_t seed, std::initializer_list<uint64_t> path);

  uint64_t next_u64();
  double uniform();                       // [0, 1)
  double uniform(double lo, double hi);   // [lo, hi)
  int64_t uniform_int(int64_t n);         // [0, n)
  double normal();                        // standard normal (Box-Muller)
  void fill_normal(float* dst, int64_t n, float stddev = 1.0f);

 private:
  uint64_t s_[4];
  double spare_ = 0.0;
  bool has_spare_ = false;
};

// Bit-vector helpers. Bits are stored one per byte, values in {0, 1}.
using Bits = std::vector<uint8_t>;

Bits random_bits(Rng& rng, int n);
// Parses a hex string into exactly `nbits` bits, most significant first.
// Throws ErrorKind::validation if the value does not fit in nbits.
Bits bits_from_hex(const std::string& hex, int nbits);
std::string bits_to_hex(const Bits& bits);
std::string bits_to_string(const Bits& bits);

// FNV-1a over a byte string; used for config fingerprints.
uint64_t fnv1a64(const std::string& data);
std::string to_hex64(uint64_t v);

}  // namespace awm

#endif  // AWM_COMMON_HPP
