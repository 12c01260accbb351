#pragma once

// FNV-1a 64-bit content digest. Not cryptographic; used to detect config or
// manifest drift between runs and partial states.

#include <cstdint>
#include <string>
#include <string_view>

namespace gime {

inline uint64_t fnv1a64(std::string_view data, uint64_t seed = 0xCBF29CE484222325ULL) {
  uint64_t h = seed;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

inline std::string hex_digest(std::string_view data) {
  static const char* digits = "0123456789abcdef";
  uint64_t h = fnv1a64(data);
  // Second pass with a different seed widens the digest to 128 bits.
  uint64_t h2 = fnv1a64(data, 0x9E3779B97F4A7C15ULL);
  std::string out;
  out.reserve(32);
  for (int i = 60; i >= 0; i -= 4) out.push_back(digits[(h >> i) & 0xF]);
  for (int i = 60; i >= 0; i -= 4) out.push_back(digits[(h2 >> i) & 0xF]);
  return out;
}

}  // namespace gime
