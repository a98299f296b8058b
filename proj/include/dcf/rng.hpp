#pragma once

#include <cmath>
#include <cstdint>

#include "dcf/errors.hpp"

namespace dcf {

// Generator identifier recorded in output metadata.
inline constexpr const char* kGeneratorName = "splitmix64";

// SplitMix64: tiny, fast, splittable 64-bit generator (Steele et al.).
// One instance per simulated node keeps replications independent and
// the whole simulator deterministic under any event ordering.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform double in [0, 1) with 53 random bits.
  double next_double() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Exponential variate with the given rate (mean 1/rate).
  double exponential(double rate) {
    if (!(rate > 0.0)) {
      throw InvalidArgumentError("exponential: rate must be > 0");
    }
    // -log1p(-u) is -log(1-u) without cancellation for small u.
    return -std::log1p(-next_double()) / rate;
  }

  // Uniform integer in [0, n). Multiply-shift map; the O(n/2^64) bias is
  // far below anything observable at the window sizes used here.
  std::uint64_t uniform_below(std::uint64_t n) {
    if (n == 0) {
      throw InvalidArgumentError("uniform_below: n must be > 0");
    }
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next()) * n) >> 64);
  }

 private:
  std::uint64_t state_;
};

// Deterministically derives an independent stream seed from (seed, salt).
// Used for per-node streams and per-replication seeds.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t salt) {
  SplitMix64 g(seed ^ (0xD1B54A32D192ED03ULL * (salt + 0x632BE59BD9B4E019ULL)));
  g.next();
  return g.next();
}

}  // namespace dcf
