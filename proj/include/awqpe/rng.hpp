#pragma once

#include <cstdint>
#include <random>

namespace awqpe {

inline constexpr std::uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ull;

// splitmix64 finalizer (Steele/Lea/Flood mixing constants).
constexpr std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

// Stream seed derivation: element `index` of the splitmix64 stream started at
// `base`. Used for per-block and per-case seeds so that results do not depend
// on execution schedule.
constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
    return mix64(base + (index + 1) * kGoldenGamma);
}

// Uniform double in [0, 1) with 53 random bits. Avoids
// std::uniform_real_distribution, whose output is implementation-defined.
inline double uniform_unit(std::mt19937_64& gen) {
    return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

} // namespace awqpe
