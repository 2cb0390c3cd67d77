#ifndef MIMOSIM_RNG_HPP
#define MIMOSIM_RNG_HPP

#include <complex>
#include <cstdint>
#include <random>

namespace mimosim {

// splitmix64 finalizer
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Derives an independent substream key from a master seed and a path of
// integer tags. Every stochastic quantity in a run is keyed this way, so
// trials can be replayed or executed in parallel without shared RNG state.
inline std::uint64_t substream(std::uint64_t seed, std::uint64_t a,
                               std::uint64_t b = 0, std::uint64_t c = 0,
                               std::uint64_t d = 0) {
  std::uint64_t s = mix64(seed);
  s = mix64(s ^ a);
  s = mix64(s ^ b);
  s = mix64(s ^ c);
  return mix64(s ^ d);
}

inline std::mt19937_64 make_rng(std::uint64_t key) {
  return std::mt19937_64(key);
}

// Circularly-symmetric complex Gaussian with E|z|^2 = 1. A fresh
// distribution per call keeps the draw a pure function of the engine state
// (normal_distribution caches internally otherwise).
inline std::complex<double> complex_gaussian(std::mt19937_64& rng) {
  std::normal_distribution<double> dist(0.0, 1.0);
  const double scale = 0.7071067811865476;  // 1/sqrt(2)
  const double re = dist(rng) * scale;
  const double im = dist(rng) * scale;
  return {re, im};
}

}  // namespace mimosim

#endif
