#pragma once

#include <cstdint>
#include <random>

namespace wdecor {

using Rng = std::mt19937_64;

/// Independent randomness streams derived from one 64-bit seed. Pilot
/// simulations for lambda selection never share a stream with trials.
enum class Stream : std::uint32_t {
  Trial = 0,
  Pilot = 1,
};

inline Rng make_rng(std::uint64_t seed, Stream stream = Stream::Trial) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), 0x9e3779b9u};
  return Rng(seq);
}

}  // namespace wdecor
