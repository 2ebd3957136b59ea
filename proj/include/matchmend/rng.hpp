#pragma once

#include <cstdint>
#include <random>

namespace matchmend {

// Seed mixer used to derive per-run seeds from a master seed
// (run_seed = master_seed XOR splitmix64(run_index)).
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Uniform double in [0, 1) from exactly one engine draw.
template <class Rng>
double canonical_unit(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Uniform integer in [0, n) via rejection sampling; one draw per attempt.
template <class Rng>
int uniform_below(Rng& rng, int n) {
  const std::uint64_t bound = static_cast<std::uint64_t>(n);
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  std::uint64_t v;
  do {
    v = rng();
  } while (v >= limit);
  return static_cast<int>(v % bound);
}

}  // namespace matchmend
