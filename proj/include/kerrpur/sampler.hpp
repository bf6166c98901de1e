#pragma once

#include <cstdint>
#include <vector>

#include "kerrpur/protocol.hpp"

namespace kerrpur {

/// Trials are grouped into fixed-size blocks; each block owns a generator seeded from
/// (seed, block index). Which thread runs a block never affects what it draws.
inline constexpr std::uint64_t kTrialsPerBlock = 4096;

/// Reference implementation: one thread walks every block in order.
std::vector<std::uint64_t> sample_leaf_counts_serial(const OutcomeTree& tree, std::uint64_t trials,
                                                     std::uint64_t seed);

/// OpenMP over blocks, per-thread count vectors summed at the end. Bit-identical to serial.
std::vector<std::uint64_t> sample_leaf_counts_parallel(const OutcomeTree& tree, std::uint64_t trials,
                                                       std::uint64_t seed);

std::vector<std::uint64_t> sample_leaf_counts(const OutcomeTree& tree, std::uint64_t trials, std::uint64_t seed,
                                              Execution execution);

/// Number of OpenMP threads available (1 when built without OpenMP).
int sampler_threads();

}  // namespace kerrpur
