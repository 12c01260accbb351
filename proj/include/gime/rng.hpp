#pragma once

// Seeded, portable random generator used everywhere randomness is needed.
//
// The generator is xoshiro256** seeded through the splitmix64 finalizer.
// Substreams are derived as
//
//   substream(seed, index) = Rng(mix64(seed + GOLDEN * (index + 1)))
//
// where mix64 is the splitmix64 output function and GOLDEN is
// 0x9E3779B97F4A7C15. This derivation is part of the output contract:
// subset draws and reports produced from the same (seed, index) pairs are
// identical across platforms and releases.

#include <cstdint>
#include <vector>

namespace gime {

inline constexpr uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

inline uint64_t mix64(uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

class Rng {
 public:
  explicit Rng(uint64_t seed) {
    uint64_t sm = seed;
    for (auto& word : state_) {
      sm += kGolden;
      word = mix64(sm);
    }
  }

  static Rng substream(uint64_t seed, uint64_t index) {
    return Rng(mix64(seed + kGolden * (index + 1)));
  }

  uint64_t next() {
    const uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // Unbiased integer in [0, n) via threshold rejection.
  uint64_t bounded(uint64_t n) {
    const uint64_t threshold = (0 - n) % n;
    for (;;) {
      const uint64_t r = next();
      if (r >= threshold) return r % n;
    }
  }

  // Uniform double in [0, 1) with 53 random bits.
  double next_double() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

 private:
  static uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

  uint64_t state_[4];
};

// Uniform sample of `n` distinct indices from [0, pool_size), ascending.
// Partial Fisher-Yates over an explicit index array; deterministic in rng.
std::vector<uint64_t> sample_without_replacement(uint64_t pool_size, uint64_t n,
                                                 Rng& rng);

// Same draw against a caller-owned scratch identity array, avoiding the
// per-draw allocation. `scratch` must hold the identity permutation of
// [0, pool_size); it is restored before returning.
std::vector<uint64_t> sample_without_replacement(std::vector<uint64_t>& scratch,
                                                 uint64_t n, Rng& rng);

}  // namespace gime
