#ifndef TMICOR_RNG_HPP
#define TMICOR_RNG_HPP

#include <cstdint>
#include <random>

namespace tmicor {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Seed of substream `index` under `seed`. Streams depend only on the pair,
/// never on the order in which they are requested.
constexpr std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t index) {
    return mix64(mix64(seed) ^ mix64(index + 0x632be59bd9b4e019ULL));
}

inline Rng substream(std::uint64_t seed, std::uint64_t index) {
    return Rng(substream_seed(seed, index));
}

} // namespace tmicor

#endif
