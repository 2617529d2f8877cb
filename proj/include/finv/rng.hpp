#pragma once

#include <cstdint>

namespace finv {

// Counter-based splittable generator: draw k of an experiment runs on its
// own stream (seed, k), so results do not depend on scheduling or ordering.
// The sequence is the splitmix64 output function over key + counter.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0)
      : key_(mix(seed + 0x9E3779B97F4A7C15ull * (stream + 1))) {}

  std::uint64_t next() { return mix(key_ + 0x9E3779B97F4A7C15ull * ++counter_); }

  // Exactly uniform on {0, ..., bound-1} (Lemire's debiased multiply).
  std::uint64_t below(std::uint64_t bound) {
    for (;;) {
      const std::uint64_t x = next();
      const unsigned __int128 m = static_cast<unsigned __int128>(x) * bound;
      const std::uint64_t low = static_cast<std::uint64_t>(m);
      if (low < bound && low < (-bound) % bound) continue;
      return static_cast<std::uint64_t>(m >> 64);
    }
  }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ull;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBull;
    z ^= z >> 31;
    return z;
  }

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace finv
