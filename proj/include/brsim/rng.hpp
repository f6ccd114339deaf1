#pragma once

#include <cstdint>

#include "brsim/frame.hpp"

namespace brsim {

/// SplitMix64 finalizer, used only to derive stream seeds.
///   z += 0x9E3779B97F4A7C15
///   z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
///   z = (z ^ (z >> 27)) * 0x94D049BB133111EB
///   return z ^ (z >> 31)
constexpr std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Per-node xorshift64* stream.
///
/// Seeding: state = splitmix64(splitmix64(run_seed) ^ node), replaced by 1
/// if zero. Each step:
///   x ^= x >> 12;  x ^= x << 25;  x ^= x >> 27;
///   out = x * 0x2545F4914F6CDD1D
/// uniform(bound) rejects outputs >= 2^64 - (2^64 mod bound) and returns
/// out mod bound, so every draw is exactly uniform and reproducible.
class RngStream {
 public:
  RngStream(std::uint64_t run_seed, NodeId node)
      : state_(splitmix64(splitmix64(run_seed) ^ node.value)) {
    if (state_ == 0) state_ = 1;
  }

  std::uint64_t next() {
    state_ ^= state_ >> 12;
    state_ ^= state_ << 25;
    state_ ^= state_ >> 27;
    ++draws_;
    return state_ * 0x2545F4914F6CDD1DULL;
  }

  /// Uniform integer in [0, bound). bound must be >= 1.
  std::uint32_t uniform(std::uint32_t bound) {
    if (bound <= 1) return 0;
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound + 1) % bound;
    for (;;) {
      const std::uint64_t r = next();
      if (r <= limit) return static_cast<std::uint32_t>(r % bound);
    }
  }

  std::uint64_t draws() const { return draws_; }

 private:
  std::uint64_t state_;
  std::uint64_t draws_ = 0;
};

}  // namespace brsim
