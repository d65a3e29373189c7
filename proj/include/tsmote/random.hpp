#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <string>

namespace tsmote {

using Rng = std::mt19937_64;

/// splitmix64 finaliser.
std::uint64_t mix64(std::uint64_t x);

/// Independent stream for a (seed, tag, indices...) tuple. Streams for
/// different cells never depend on the order in which cells are processed.
Rng derive_stream(std::uint64_t seed, std::string_view tag,
                  std::initializer_list<std::uint64_t> indices = {});

/// Uniform double in [0, 1).
double uniform01(Rng& rng);

/// Uniform integer in [0, n).
std::size_t uniform_index(Rng& rng, std::size_t n);

} // namespace tsmote
