#pragma once

#include <cstdint>
#include <random>

namespace clocksim {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ull;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

/// Seed for the tie-break stream of one auction. Depends only on the run
/// seed and the 1-based auction index, never on driver identities, so
/// permuting drivers leaves the stream untouched.
inline std::uint64_t auction_stream_seed(std::uint64_t run_seed, int auction_index) {
  std::uint64_t state = run_seed ^ (0x6a09e667f3bcc909ull * static_cast<std::uint64_t>(auction_index));
  splitmix64(state);
  return splitmix64(state);
}

/// Unbiased draw from {0, .., bound-1}. Hand-rolled rejection sampling so
/// the sequence is identical across standard library implementations
/// (std::uniform_int_distribution is not portable bit-for-bit).
inline std::size_t uniform_index(std::mt19937_64& rng, std::size_t bound) {
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound + 1) % bound;
  std::uint64_t draw;
  do {
    draw = rng();
  } while (draw > limit);
  return static_cast<std::size_t>(draw % bound);
}

}  // namespace clocksim
