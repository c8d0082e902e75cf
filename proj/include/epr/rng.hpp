#pragma once

#include <cstdint>
#include <random>

namespace epr {

using Rng = std::mt19937_64;

/// Purpose tags keep the emission, detector and noise substreams of one run
/// statistically independent of each other.
enum class Stream : std::uint32_t { emissions = 1, side_a = 2, side_b = 3, dark_a = 4, dark_b = 5 };

/// Deterministic substream seed for (base seed, configuration index, repeat
/// index, purpose). Any lane of a parallel run can rebuild its own engine
/// from these four numbers alone.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint32_t config_index,
                                 std::uint32_t repeat_index, Stream stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(base), static_cast<std::uint32_t>(base >> 32),
                    config_index, repeat_index, static_cast<std::uint32_t>(stream)};
  std::uint32_t words[2];
  seq.generate(words, words + 2);
  return (static_cast<std::uint64_t>(words[0]) << 32) | words[1];
}

}  // namespace epr
