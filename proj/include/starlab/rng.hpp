#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace starlab {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer; a bijective 64-bit mixer.
constexpr uint64_t mix64(uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// FNV-1a over an experiment tag, so tags can key streams.
constexpr uint64_t tag_hash(std::string_view tag) {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : tag) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Key for stream (seed, tag, a, b, c). Folding each coordinate through mix64
/// makes the key a pure function of its arguments, so replicate i sees the
/// same stream no matter which thread runs it.
constexpr uint64_t stream_key(uint64_t seed, std::string_view tag, uint64_t a, uint64_t b = 0,
                              uint64_t c = 0) {
  uint64_t k = mix64(seed);
  k = mix64(k ^ tag_hash(tag));
  k = mix64(k ^ a);
  k = mix64(k ^ (b + 0x632be59bd9b4e019ULL));
  k = mix64(k ^ (c + 0x8cb92ba72f3d8dd7ULL));
  return k;
}

/// The key is already well mixed, so the standard one-word initialization
/// suffices; a seed_seq costs an order of magnitude more per replicate.
inline Rng make_rng(uint64_t key) { return Rng(key); }

inline Rng make_stream(uint64_t seed, std::string_view tag, uint64_t a, uint64_t b = 0,
                       uint64_t c = 0) {
  return make_rng(stream_key(seed, tag, a, b, c));
}

/// Uniform integer in [0, bound), bound > 0 (Lemire's multiply-and-reject).
inline uint64_t uniform_below(Rng& rng, uint64_t bound) {
  unsigned __int128 product = static_cast<unsigned __int128>(rng()) * bound;
  auto low = static_cast<uint64_t>(product);
  if (low < bound) {
    const uint64_t threshold = -bound % bound;
    while (low < threshold) {
      product = static_cast<unsigned __int128>(rng()) * bound;
      low = static_cast<uint64_t>(product);
    }
  }
  return static_cast<uint64_t>(product >> 64);
}

/// Uniform double in [0, 1) with 53 random bits.
inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace starlab
