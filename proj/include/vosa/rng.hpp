#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace vosa {

using Rng = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x)
{
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Independent, reproducible stream `stream` derived from a base seed.
inline Rng derive_rng(std::uint64_t seed, std::uint64_t stream)
{
  return Rng(splitmix64(splitmix64(seed) ^ splitmix64(stream + 0x51ED270B27D2C0A5ULL)));
}

/// 64-bit FNV-1a; used for config and snapshot hashes in logs.
inline std::uint64_t fnv1a(const void* data, std::size_t n, std::uint64_t h = 0xCBF29CE484222325ULL)
{
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 0x100000001B3ULL;
  }
  return h;
}

inline std::uint64_t fnv1a(std::string_view s, std::uint64_t h = 0xCBF29CE484222325ULL)
{
  return fnv1a(s.data(), s.size(), h);
}

}  // namespace vosa
