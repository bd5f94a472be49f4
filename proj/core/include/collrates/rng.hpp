#pragma once

#include <cstdint>
#include <random>
#include <string_view>

// Reproducible random streams. A stream is named by (seed, purpose tag,
// index); distinct names give statistically independent mt19937_64 engines,
// and the same name always gives the same sequence.
namespace collrates {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// FNV-1a, so tags stay stable across compilers (std::hash is not).
inline std::uint64_t tag_hash(std::string_view tag) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : tag) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::mt19937_64 make_stream(std::uint64_t seed, std::string_view tag, std::uint64_t index = 0) {
  std::uint64_t state = seed ^ tag_hash(tag);
  state ^= splitmix64(state) + index * 0xd1b54a32d192ed03ULL;
  std::seed_seq seq{static_cast<std::uint32_t>(splitmix64(state)),
                    static_cast<std::uint32_t>(splitmix64(state)),
                    static_cast<std::uint32_t>(splitmix64(state)),
                    static_cast<std::uint32_t>(splitmix64(state))};
  return std::mt19937_64(seq);
}

// Uniform on [0, 1) with 53 random bits; unlike std::uniform_real_distribution
// the value is fixed by the engine output alone.
inline double uniform01(std::mt19937_64& engine) {
  return static_cast<double>(engine() >> 11) * 0x1.0p-53;
}

}  // namespace collrates
