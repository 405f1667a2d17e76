#pragma once

// Substream derivation for the Monte Carlo engines.  Each source of
// randomness (Brownian increments, fractional noise, jump counts, jump
// times, jump sizes) gets its own engine keyed by (seed, purpose,
// block), so the sources stay independent and results do not depend on
// how path blocks are scheduled across threads.

#include <cstdint>
#include <random>

namespace mfbm {

enum class StreamPurpose : std::uint64_t {
  brownian = 1,
  fractional = 2,
  jump_count = 3,
  jump_time = 4,
  jump_size = 5,
  conditional = 6,
};

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::mt19937_64 make_stream(std::uint64_t seed, StreamPurpose purpose,
                                   std::uint64_t block = 0) {
  const std::uint64_t mixed =
      splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(purpose) ^
                                   splitmix64(block)));
  return std::mt19937_64(mixed);
}

}  // namespace mfbm
