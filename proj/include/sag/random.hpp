#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

namespace sag {

/// Seeded 64-bit generator shared by every sampling site.
using Rng = std::mt19937_64;

/// Unbiased draw from {0, ..., n-1}. Implemented here rather than through
/// std::uniform_int_distribution so index streams are identical across
/// standard library implementations.
inline std::size_t uniform_index(Rng& rng, std::size_t n) {
  const std::uint64_t bound = n;
  const std::uint64_t limit = Rng::max() - (Rng::max() % bound + 1) % bound;
  std::uint64_t r;
  do {
    r = rng();
  } while (r > limit);
  return static_cast<std::size_t>(r % bound);
}

/// Uniform double in [0, 1) from the top 53 bits.
inline double uniform_unit(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace sag
