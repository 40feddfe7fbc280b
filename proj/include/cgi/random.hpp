#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace cgi {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Derives an independent child seed from a parent seed and a tag path.
inline std::uint64_t derive_seed(std::uint64_t seed,
                                 std::initializer_list<std::uint64_t> tags) {
  std::uint64_t h = mix64(seed);
  for (std::uint64_t t : tags) h = mix64(h ^ mix64(t + 0x632be59bd9b4e019ULL));
  return h;
}

/// Stream tags used with derive_seed.
namespace stream {
inline constexpr std::uint64_t kNode = 1;
inline constexpr std::uint64_t kEdgeSample = 2;
inline constexpr std::uint64_t kBijection = 3;
inline constexpr std::uint64_t kPrimes = 4;
inline constexpr std::uint64_t kTester = 5;
inline constexpr std::uint64_t kRestart = 6;
inline constexpr std::uint64_t kInstance = 7;
}  // namespace stream

/// Uniform integer in [0, bound).
inline std::uint64_t uniform_below(Rng& rng, std::uint64_t bound) {
  return std::uniform_int_distribution<std::uint64_t>(0, bound - 1)(rng);
}

}  // namespace cgi
