#pragma once

#include <cstdint>
#include <random>

namespace perish {

using Rng = std::mt19937_64;

// Uniform draw in [0,1) from the top 53 bits of the generator output.
// Bit-identical across platforms, one generator call per draw.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Independent stream seed for a given purpose tag. Replications never share
// generator state; each simulation owns one stream.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t tag) {
  return splitmix64(base ^ splitmix64(tag));
}

}  // namespace perish
