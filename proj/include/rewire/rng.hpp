#pragma once

#include <cstdint>
#include <random>

namespace rewire {

using Rng = std::mt19937_64;

/// Mixes a master seed and a stream id into an independent generator.
/// Distinct (seed, stream) pairs give statistically independent substreams.
Rng make_rng(std::uint64_t seed, std::uint64_t stream = 0);

/// SplitMix64 finalizer; used to derive child seeds deterministically.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

/// Uniform index in [0, size). `size` must be positive.
std::size_t uniform_index(Rng& rng, std::size_t size);

}  // namespace rewire
