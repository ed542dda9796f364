#pragma once

#include <cstdint>

namespace frametol {

// splitmix64. Deterministic across platforms and compilers, which the
// seeded experiment suites rely on for byte-identical reruns.
struct SplitMix64 {
  std::uint64_t state;

  explicit constexpr SplitMix64(std::uint64_t seed) : state(seed) {}

  constexpr std::uint64_t next() {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // uniform in [0, 1), 53-bit resolution
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // uniform in [-radius, radius]
  double symmetric(double radius) { return radius * (2.0 * uniform01() - 1.0); }
};

// Streams are derived by counter, never by sharing state, so trials can
// run in any order and still reproduce bit-identically.
inline SplitMix64 derive_stream(std::uint64_t seed, std::uint64_t counter) {
  SplitMix64 mix(seed ^ (0x9e3779b97f4a7c15ull * (counter + 1)));
  return SplitMix64(mix.next());
}

}  // namespace frametol
