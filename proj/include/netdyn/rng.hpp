#pragma once

#include <cstdint>
#include <random>

namespace netdyn {

using Rng = std::mt19937_64;

// SplitMix64 finalizer; used to decorrelate master seeds from stream ids.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Seed for an independent stream `stream` under master seed `seed`.
constexpr std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t stream) noexcept {
    return mix64(mix64(seed) ^ mix64(stream + 0x632be59bd9b4e019ULL));
}

inline Rng make_rng(std::uint64_t seed, std::uint64_t stream = 0) {
    std::seed_seq seq{static_cast<std::uint32_t>(stream_seed(seed, stream)),
                      static_cast<std::uint32_t>(stream_seed(seed, stream) >> 32),
                      static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(stream)};
    return Rng(seq);
}

// Uniform double in [0, 1) from the top 53 bits; avoids implementation-defined
// std::uniform_real_distribution so streams are reproducible across stdlibs.
inline double uniform01(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Uniform integer in [0, bound) by Lemire's multiply-shift with rejection.
inline std::uint64_t uniform_below(Rng& rng, std::uint64_t bound) {
    __uint128_t m = static_cast<__uint128_t>(rng()) * bound;
    auto low = static_cast<std::uint64_t>(m);
    if (low < bound) {
        const std::uint64_t threshold = (0 - bound) % bound;
        while (low < threshold) {
            m = static_cast<__uint128_t>(rng()) * bound;
            low = static_cast<std::uint64_t>(m);
        }
    }
    return static_cast<std::uint64_t>(m >> 64);
}

}  // namespace netdyn
