// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>

namespace iotembed {

// splitmix64 generator. The <random> distributions are implementation
// defined, so seeded outputs would differ between standard libraries; this
// one produces the same stream everywhere.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform integer in [lo, hi], unbiased (rejection sampling).
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
    const std::uint64_t span = static_cast<std::uint64_t>(hi) - static_cast<std::uint64_t>(lo) + 1;
    if (span == 0) return static_cast<std::int64_t>(next_u64());
    const std::uint64_t limit = ~0ULL - ~0ULL % span;
    std::uint64_t x;
    do {
      x = next_u64();
    } while (x >= limit);
    return lo + static_cast<std::int64_t>(x % span);
  }

  // Uniform double in [0, 1).
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform_real(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Index in [0, n).
  std::size_t pick(std::size_t n) {
    return static_cast<std::size_t>(uniform_int(0, static_cast<std::int64_t>(n) - 1));
  }

 private:
  std::uint64_t state_;
};

// Derives an independent stream from (seed, salt); used to give each batch
// or replica its own reproducible sub-stream.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t salt) {
  Rng r(seed ^ (salt * 0xd6e8feb86659fd93ULL + 0x2545f4914f6cdd1dULL));
  return r.next_u64();
}

}  // namespace iotembed
