#pragma once

#include <cstdint>
#include <string_view>

namespace hcflow {

// Counter-based streams: the value for (seed, stream, index) does not depend on the order of
// evaluation, so per-edge draws are reproducible and can be taken in any order.

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

constexpr std::uint64_t streamTag(std::string_view name) {
  std::uint64_t h = 0xCBF29CE484222325ull;  // FNV-1a
  for (char c : name) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001B3ull;
  }
  return h;
}

inline std::uint64_t counterHash(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
  return splitmix64(splitmix64(splitmix64(seed) ^ stream) + index);
}

// Uniform in [0, 1) with 53 random bits.
inline double counterUniform(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
  return static_cast<double>(counterHash(seed, stream, index) >> 11) * 0x1.0p-53;
}

inline constexpr std::uint64_t kCapacityStream = streamTag("capacity");
inline constexpr std::uint64_t kThinStream = streamTag("thin");

}  // namespace hcflow
