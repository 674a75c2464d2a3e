#pragma once

#include <cstdint>

namespace ccsketch {

// SplitMix64 finalizer (Steele, Lea, Flood 2014).
constexpr std::uint64_t mix64(std::uint64_t z) noexcept
{
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// Counter-based hash keyed by (seed, i, j, lane). Each argument is pushed
// through a full mixing round, so neighbouring counters decorrelate.
constexpr std::uint64_t counter_hash(std::uint64_t seed, std::uint64_t i,
                                     std::uint64_t j, std::uint64_t lane) noexcept
{
    std::uint64_t h = mix64(seed);
    h = mix64(h ^ i);
    h = mix64(h ^ (j * 0xD6E8FEB86659FD93ULL));
    h = mix64(h ^ (lane * 0xA0761D6478BD642FULL));
    return h;
}

// Top 52 bits mapped to the midpoint of their cell. The largest value is
// 1 - 2^-53, still representable, so neither endpoint is reachable.
constexpr double open_unit(std::uint64_t h) noexcept
{
    return (static_cast<double>(h >> 12) + 0.5) * 0x1.0p-52;
}

} // namespace ccsketch
