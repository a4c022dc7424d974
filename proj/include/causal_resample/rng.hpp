#ifndef CAUSAL_RESAMPLE_RNG_HPP
#define CAUSAL_RESAMPLE_RNG_HPP

#include <cstdint>
#include <initializer_list>
#include <random>

namespace causal_resample {

using Rng = std::mt19937_64;

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Stable 64-bit mix of a master seed and a coordinate path. The result depends
// only on the values and their order, never on scheduling.
constexpr std::uint64_t derive_seed(std::uint64_t master,
                                    std::initializer_list<std::uint64_t> coords) {
  std::uint64_t h = splitmix64(master);
  for (std::uint64_t c : coords) {
    h = splitmix64(h ^ splitmix64(c + 0x632be59bd9b4e019ULL));
  }
  return h;
}

}  // namespace causal_resample

#endif  // CAUSAL_RESAMPLE_RNG_HPP
