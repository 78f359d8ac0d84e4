#pragma once

#include <cstdint>
#include <vector>

namespace fracfact {

// Deterministic PRNG helpers. Seeded runs must replay byte-identically across
// platforms, so nothing here goes through std::uniform_int_distribution or
// std::shuffle (both implementation-defined).

struct SplitMix64 {
  std::uint64_t state;

  explicit SplitMix64(std::uint64_t seed) : state(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }
};

inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  SplitMix64 rng(seed ^ (0xD1B54A32D192ED03ULL * (stream + 1)));
  rng.next();
  return rng.next();
}

// Uniform draw in [0, bound) by rejection.
inline std::uint64_t uniform_below(SplitMix64& rng, std::uint64_t bound) {
  std::uint64_t threshold = (0 - bound) % bound;
  for (;;) {
    std::uint64_t x = rng.next();
    if (x >= threshold) return x % bound;
  }
}

template <typename T>
void fisher_yates(std::vector<T>& items, SplitMix64& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    std::size_t j = static_cast<std::size_t>(uniform_below(rng, i));
    std::swap(items[i - 1], items[j]);
  }
}

}  // namespace fracfact
