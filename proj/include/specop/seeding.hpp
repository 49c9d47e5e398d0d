#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace specop {

using Rng = std::mt19937_64;

/// splitmix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : text) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Seed of stream `index` in family `tag` under `master`. Streams depend only
/// on these three values, never on the order in which they are requested.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::string_view tag,
                                    std::uint64_t index) {
  return mix64(mix64(master ^ fnv1a(tag)) + mix64(index));
}

inline Rng make_rng(std::uint64_t master, std::string_view tag,
                    std::uint64_t index) {
  return Rng(derive_seed(master, tag, index));
}

}  // namespace specop
