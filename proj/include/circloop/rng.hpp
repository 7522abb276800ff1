#pragma once

#include <cstdint>
#include <random>

namespace circloop {

// Thin wrappers over mt19937_64 so every draw is reproducible from the raw
// 64-bit stream alone. std::uniform_*_distribution is implementation-defined,
// which would make generated documents differ between standard libraries.

inline double uniform_real(std::mt19937_64& rng, double lo, double hi) {
  double unit = static_cast<double>(rng() >> 11) * 0x1.0p-53;  // [0, 1)
  return lo + unit * (hi - lo);
}

/// Uniform draw from [0, n). n must be >= 1.
inline size_t uniform_index(std::mt19937_64& rng, size_t n) {
  return static_cast<size_t>(rng() % n);
}

/// Uniform draw from [lo, hi], both inclusive.
inline int uniform_int(std::mt19937_64& rng, int lo, int hi) {
  return lo + static_cast<int>(uniform_index(rng, static_cast<size_t>(hi - lo + 1)));
}

}  // namespace circloop
