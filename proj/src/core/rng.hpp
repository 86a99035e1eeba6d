#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace spinsense {

/// Deterministic stream derivation: every Monte-Carlo unit of work draws from
/// an engine seeded by (master seed, tag words), so results are reproducible
/// regardless of execution order or worker count.
namespace rng {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t mix(std::uint64_t seed, std::initializer_list<std::uint64_t> tags) {
    std::uint64_t state = seed;
    std::uint64_t out = splitmix64(state);
    for (std::uint64_t tag : tags) {
        state ^= tag + 0x9e3779b97f4a7c15ULL + (state << 6) + (state >> 2);
        out = splitmix64(state);
    }
    return out;
}

/// Independent engine for the stream identified by (seed, tags).
inline std::mt19937_64 stream(std::uint64_t seed, std::initializer_list<std::uint64_t> tags) {
    return std::mt19937_64(mix(seed, tags));
}

/// Uniform double in [0, 1) with 53 random bits.  Used instead of
/// std::uniform_real_distribution, whose output is implementation defined.
inline double unit_double(std::mt19937_64& engine) {
    return double(engine() >> 11) * 0x1.0p-53;
}

} // namespace rng
} // namespace spinsense
