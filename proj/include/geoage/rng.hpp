#pragma once

#include <cmath>
#include <cstdint>

namespace geoage {

// Counter-based random numbers: every draw is a pure function of
// (seed, stream, counter), so results do not depend on evaluation order.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t counter_hash(std::uint64_t seed, std::uint64_t stream,
                                  std::uint64_t counter) {
  std::uint64_t h = mix64(seed ^ 0x6a09e667f3bcc909ULL);
  h = mix64(h ^ stream);
  return mix64(h ^ (counter * 0xd1b54a32d192ed03ULL));
}

// Uniform in [0, 1).
inline double counter_uniform(std::uint64_t seed, std::uint64_t stream,
                              std::uint64_t counter) {
  return static_cast<double>(counter_hash(seed, stream, counter) >> 11) *
         0x1.0p-53;
}

inline double counter_exponential(std::uint64_t seed, std::uint64_t stream,
                                  std::uint64_t counter) {
  return -std::log1p(-counter_uniform(seed, stream, counter));
}

// Derives an independent seed for a sub-task (e.g. one realization).
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  return mix64(mix64(seed) ^ mix64(index + 0x243f6a8885a308d3ULL));
}

}  // namespace geoage
