#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace roppt {

// All randomness in the library flows through these helpers so that results
// are reproducible bit-for-bit across standard library implementations
// (std::shuffle and the distribution classes are implementation-defined).

// Uniform in [0,1) with 53-bit resolution.
inline double uniform_unit(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Uniform in [-half_width, half_width].
inline double uniform_sym(std::mt19937_64& rng, double half_width) {
  return (2.0 * uniform_unit(rng) - 1.0) * half_width;
}

// Uniform integer in [0, m). Requires m > 0. The modulo bias is far below
// anything observable at the corpus sizes involved.
inline int bounded(std::mt19937_64& rng, int m) {
  return static_cast<int>(rng() % static_cast<std::uint64_t>(m));
}

// Fisher-Yates with explicit draws.
inline void shuffle_indices(std::vector<int>& v, std::mt19937_64& rng) {
  for (int i = static_cast<int>(v.size()) - 1; i > 0; --i) {
    int j = bounded(rng, i + 1);
    std::swap(v[static_cast<std::size_t>(i)], v[static_cast<std::size_t>(j)]);
  }
}

}  // namespace roppt
