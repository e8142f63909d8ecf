#pragma once

#include <random>

namespace acms {

/// Uniform in [0, 1) from the top 53 bits; unlike std::uniform_real_distribution
/// the sequence is the same on every standard library.
inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace acms
