#pragma once

#include <cstdint>
#include <random>

namespace kpart {

/// SplitMix64 finalizer, used to derive independent per-stream seeds.
constexpr std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// mt19937_64 seeded from a base seed and a stream id. The engine output is fixed by
/// the standard, so streams are reproducible across platforms.
inline std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t stream)
{
    return std::mt19937_64(splitmix64(seed ^ splitmix64(stream)));
}

/// Unbiased integer in [lo, hi] by rejection. std::uniform_int_distribution is
/// implementation-defined and would break cross-platform reproducibility.
inline std::int64_t uniform_int(std::mt19937_64& rng, std::int64_t lo, std::int64_t hi)
{
    const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
    if (span == 0) return static_cast<std::int64_t>(rng());
    const std::uint64_t limit = (~std::uint64_t{0}) - ((~std::uint64_t{0}) % span + 1) % span;
    std::uint64_t draw = rng();
    while (draw > limit) draw = rng();
    return lo + static_cast<std::int64_t>(draw % span);
}

} // namespace kpart
