#pragma once

#include <cstdint>
#include <random>

namespace pedagogue {

using Rng = std::mt19937_64;

// splitmix64 (Steele, Lea, Flood 2014). Used only to derive seeds, never as
// the sampling generator itself.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Seed-splitting rule: stream s of master seed m is seeded with
// splitmix64(m + (s + 1) * golden). Streams are independent enough for
// Monte-Carlo work and reproducible regardless of scheduling order.
inline std::uint64_t substream_seed(std::uint64_t master, std::uint64_t stream) {
  return splitmix64(master + (stream + 1) * 0x9e3779b97f4a7c15ULL);
}

inline Rng make_stream(std::uint64_t master, std::uint64_t stream) {
  return Rng(substream_seed(master, stream));
}

}  // namespace pedagogue
