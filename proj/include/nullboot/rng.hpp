#pragma once

#include <cstdint>
#include <random>

namespace nullboot {

using Rng = std::mt19937_64;

// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Child seed for stream `index` under `parent`. Children of one parent never depend on each
// other, so replicate q always sees the same stream regardless of how many replicates run.
constexpr std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t index) {
    return mix64(mix64(parent) ^ mix64(index + 0x632be59bd9b4e019ULL));
}

constexpr std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t a, std::uint64_t b) {
    return derive_seed(derive_seed(parent, a), b);
}

}  // namespace nullboot
