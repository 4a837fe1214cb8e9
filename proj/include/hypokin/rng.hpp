#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace hypokin {

// All randomness in the toolkit flows from one root seed. Substreams are
// derived deterministically from (seed, tag) so that modules never share or
// race on generator state.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

inline std::uint64_t tag_hash(std::string_view tag) {
  // FNV-1a
  std::uint64_t h = 1469598103934665603ull;
  for (char c : tag) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ull;
  }
  return h;
}

inline std::mt19937_64 substream(std::uint64_t seed, std::string_view tag,
                                 std::uint64_t index = 0) {
  std::uint64_t s = splitmix64(seed ^ tag_hash(tag));
  s = splitmix64(s ^ (0x517cc1b727220a95ull * (index + 1)));
  return std::mt19937_64(s);
}

}  // namespace hypokin
